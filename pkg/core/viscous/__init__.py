# eps-scale viscous solutions and Schrodinger / Doob kernels
from core.viscous.box import BoxGrid, GaugedState, gaussian, splitting_steps
from core.viscous.eps import EpsProblem, small_time_ratio, solve_eps, solve_eps_many, truncation_depth
from core.viscous.fd import godunov, solve_eps_fd
from core.viscous.kernels import (
    BallisticBand,
    KernelEstimate,
    ballistic_band,
    doob_kernel,
    doob_reconstruct,
    drift_kernel,
    evolve_fokker_planck,
    schrodinger_kernel,
)
from core.viscous.montecarlo import MonteCarloEstimate, feynman_kac_mc, heat_kernel

__all__ = [
    'BoxGrid', 'GaugedState', 'gaussian', 'splitting_steps', 'EpsProblem', 'small_time_ratio',
    'solve_eps', 'solve_eps_many', 'truncation_depth', 'godunov', 'solve_eps_fd', 'BallisticBand',
    'KernelEstimate', 'ballistic_band', 'doob_kernel', 'doob_reconstruct', 'drift_kernel', 'evolve_fokker_planck',
    'schrodinger_kernel',
    'MonteCarloEstimate', 'feynman_kac_mc', 'heat_kernel',
]
