# Cell problem for H(y, p) = 1/2 |p|^2 + V(y)
from core.cell.potential import (
    Potential,
    constant_potential,
    cosine_potential,
    load_potential,
    random_trig_potential,
    zero_potential,
)
from core.cell.solver import (
    CellSolution,
    PrincipalPair,
    as_vector,
    assemble_cell,
    check_spd,
    grad_hbar,
    hess_hbar,
    principal_pair,
    residuals,
    solve_cell,
)

__all__ = [
    'Potential', 'constant_potential', 'cosine_potential', 'load_potential',
    'random_trig_potential', 'zero_potential', 'CellSolution', 'PrincipalPair', 'as_vector',
    'assemble_cell', 'check_spd', 'grad_hbar', 'hess_hbar', 'principal_pair', 'residuals', 'solve_cell',
]
