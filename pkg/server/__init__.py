# JSON API over the core solvers
