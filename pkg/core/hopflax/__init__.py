# Hopf-Lax evaluation of the homogenized solution and its diagnostics
from core.hopflax.data import (
    CATALOG_VERSION,
    LipschitzData,
    affine_data,
    capped_norm,
    constant_data,
    huber_data,
    load_data,
    smooth_data,
    tabulated_data,
)
from core.hopflax.solver import (
    CurvatureProbe,
    HopfLaxSolution,
    QuadraticGrowth,
    minimizer_consistency,
    quad_growth_diag,
    search_radius,
    small_time_check,
    solve,
    solve_many,
    twice_differentiability_probe,
)

__all__ = [
    'CATALOG_VERSION', 'LipschitzData', 'affine_data', 'capped_norm', 'constant_data', 'huber_data',
    'load_data', 'smooth_data', 'tabulated_data', 'CurvatureProbe', 'HopfLaxSolution',
    'QuadraticGrowth', 'minimizer_consistency', 'quad_growth_diag', 'search_radius',
    'small_time_check', 'solve', 'solve_many', 'twice_differentiability_probe',
]
