# Numerical core: torus fields, cell problem, Legendre transform, Hopf-Lax, viscous solvers, effective diffusion
