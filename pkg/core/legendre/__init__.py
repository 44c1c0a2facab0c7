# Effective Hamiltonian model and its Legendre transform
from core.legendre.model import HamiltonianModel
from core.legendre.transform import LagrangianTable, LagrangianValue, d2L, dL, legendre

__all__ = ['HamiltonianModel', 'LagrangianTable', 'LagrangianValue', 'd2L', 'dL', 'legendre']
