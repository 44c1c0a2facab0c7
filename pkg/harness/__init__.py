# eps-sweeps, rate fits, reports and the command line
