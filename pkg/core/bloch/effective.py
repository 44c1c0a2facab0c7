"""
Model: periodic diffusion A = 1/2 Lap + b.D on T^n, its invariant density m
       (-1/2 Lap m + div(b m) = 0, mean m = 1), effective drift bbar = mean(b m),
       correctors A chi_j = -(b_j - bbar_j) with mean(chi_j m) = 0, and
       Q_jk = mean((e_j + D chi_j).(e_k + D chi_k) m).
Purpose: Effective (bbar, Q) of a drift, either given explicitly or taken from a cell
         solution as the Doob drift b_p = -p - Dv_p.
Dependencies: numpy, scipy.linalg (LU of the bordered systems), core/torus, core/cell.
Ext Hooks: A matrix-free GMRES solve would lift the dense limit in 2D.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from core.cell import CellSolution, Potential, as_vector, check_spd, solve_cell
from core.cell.operators import generator_matrix
from core.config import BLOCH_DEFAULT_POINTS, CELL_MIN_POINTS, PIVOT_TOLERANCE
from core.errors import (ConfigError, InvariantViolation, MismatchedSolutions, NullspaceDegenerate,
                         SolveFailure)
from core.torus import (ScalarField, TorusGrid, VectorField, divergence, evaluate_tensor, gradient,
                        laplacian, mean, read_vector_field)

logger = logging.getLogger(__name__)

SOURCES = ('explicit', 'doob')


@dataclass(frozen=True)
class DriftSpec:
    """A periodic drift b and where it came from; source 'doob' carries the p of b = -p - Dv_p."""
    b: VectorField
    source: str = 'explicit'
    p: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        if self.source not in SOURCES:
            raise InvariantViolation(f"Drift source must be one of {SOURCES}, got '{self.source}'")
        if self.source == 'doob' and self.p is None:
            raise InvariantViolation("A Doob drift needs the p it was built at")

    @classmethod
    def from_function(cls, grid: TorusGrid, fns: Sequence) -> 'DriftSpec':
        comps = tuple(ScalarField.from_function(grid, fn).values for fn in fns)
        return cls(VectorField(grid, comps))

    @classmethod
    def constant(cls, c, dim: int = 1, points: int = BLOCH_DEFAULT_POINTS) -> 'DriftSpec':
        c = as_vector(c, dim)
        grid = TorusGrid(dim, points)
        return cls(VectorField(grid, tuple(np.full(grid.shape, float(cj)) for cj in c)))

    @classmethod
    def from_cell(cls, cell: CellSolution) -> 'DriftSpec':
        return cls(cell.drift(), 'doob', tuple(float(v) for v in cell.p))

    @property
    def dim(self) -> int:
        return self.b.grid.dim

    @property
    def points(self) -> int:
        return self.b.grid.points

    @property
    def label(self) -> str:
        if self.source == 'doob':
            return 'doob(' + ','.join(f"{v:g}" for v in self.p) + ')'
        return 'explicit'

    def on_grid(self, points: int) -> 'DriftSpec':
        """The same trigonometric drift sampled on N = points nodes per axis."""
        if points == self.points:
            return self
        grid = TorusGrid(self.dim, points)
        comps = tuple(evaluate_tensor(self.b.component(j), [grid.axis()] * self.dim)
                      for j in range(self.dim))
        return DriftSpec(VectorField(grid, comps), self.source, self.p)

    def check_against(self, cell: CellSolution) -> None:
        """Raise unless this is the Doob drift -p - Dv_p of `cell` (to 1e-10)."""
        if self.source != 'doob' or not np.allclose(self.p, cell.p, atol=1e-14, rtol=0.0):
            raise MismatchedSolutions(f"Drift {self.label} is not the Doob drift at p={cell.p}")
        expected = DriftSpec.from_cell(cell).on_grid(self.points)
        gap = max(float(np.abs(a - e).max()) for a, e in zip(self.b.components, expected.b.components))
        if gap > 1e-10:
            raise MismatchedSolutions(f"Drift differs from -p - Dv_p by {gap:.3e}")


@dataclass(frozen=True)
class EffectiveDiffusion:
    m: ScalarField
    b_bar: np.ndarray
    chi: Tuple[ScalarField, ...]
    Q: np.ndarray
    drift: DriftSpec
    residuals: Dict[str, float] = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.m.grid.dim

    @property
    def max_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.Q).max())

    def summary(self) -> dict:
        return {
            'drift': self.drift.label,
            'N': self.m.grid.points,
            'b_bar': [float(v) for v in self.b_bar],
            'Q': [[float(v) for v in row] for row in self.Q],
            'residuals': dict(self.residuals),
        }


def load_drift(spec: str, dim: int = 1, points: int = BLOCH_DEFAULT_POINTS,
               potential: Optional[Potential] = None) -> DriftSpec:
    """Resolve 'zero', 'constant:c[,c2]', 'sine' (b_j = sin 2 pi x_j), 'doob:p[,p2]' (needs a
    potential) or a vector field stem written by write_vector_field."""
    grid = TorusGrid(dim, points)
    if spec == 'zero':
        return DriftSpec.constant(np.zeros(dim), dim, points)
    if spec.startswith('constant:'):
        return DriftSpec.constant([float(v) for v in spec.split(':', 1)[1].split(',')], dim, points)
    if spec == 'sine':
        return DriftSpec.from_function(
            grid, [lambda *xs, j=j: np.sin(2 * np.pi * xs[j]) for j in range(dim)])
    if spec.startswith('doob:'):
        if potential is None:
            raise ConfigError("A 'doob:p' drift needs a potential")
        p = [float(v) for v in spec.split(':', 1)[1].split(',')]
        return DriftSpec.from_cell(solve_cell(potential, p, points))
    return DriftSpec(read_vector_field(spec, dim)).on_grid(points)


def _check_points(points: int) -> None:
    if points < CELL_MIN_POINTS:
        raise InvariantViolation(f"Effective diffusion solves need N >= {CELL_MIN_POINTS}, got {points}")


def _generator(drift: DriftSpec) -> np.ndarray:
    return generator_matrix(drift.dim, drift.points, drift=list(drift.b.components))


def _bordered_solve(K: np.ndarray, rhs: np.ndarray, failure, what: str) -> np.ndarray:
    try:
        lu, piv = scipy.linalg.lu_factor(K, overwrite_a=True)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise failure(f"{what}: LU factorization failed: {e}") from e
    pivots = np.abs(np.diag(lu))
    if pivots.min() <= PIVOT_TOLERANCE * pivots.max():
        raise failure(f"{what}: bordered system is singular (pivot ratio {pivots.min() / pivots.max():.2e}); "
                      "the generator's nullspace is not one-dimensional at this resolution")
    x = scipy.linalg.lu_solve((lu, piv), rhs)
    if not np.all(np.isfinite(x)):
        raise failure(f"{what}: solve produced non-finite values")
    return x


def stationarity_residual(drift: DriftSpec, m: ScalarField) -> float:
    flux = VectorField(m.grid, tuple(c * m.values for c in drift.b.components))
    return float(np.abs(-0.5 * laplacian(m).values + divergence(flux).values).max())


def corrector_residual(drift: DriftSpec, chi: ScalarField, j: int, b_bar_j: float) -> float:
    Dchi = gradient(chi)
    A_chi = 0.5 * laplacian(chi).values + sum(b * d for b, d in zip(drift.b.components, Dchi.components))
    return float(np.abs(A_chi + drift.b.components[j] - b_bar_j).max())


def invariant_density(b: DriftSpec, N: int = BLOCH_DEFAULT_POINTS) -> ScalarField:
    """m with A* m = 0 and mean m = 1, from the system bordered by the mass constraint."""
    _check_points(N)
    drift = b.on_grid(N)
    A = _generator(drift)
    size = A.shape[0]
    K = np.zeros((size + 1, size + 1))
    K[:size, :size] = A.T
    K[:size, size] = 1.0
    K[size, :size] = 1.0
    rhs = np.zeros(size + 1)
    rhs[size] = size
    sol = _bordered_solve(K, rhs, NullspaceDegenerate, "invariant density")
    m = ScalarField(drift.b.grid, sol[:size])
    if m.min() <= 0.0:
        raise NullspaceDegenerate(f"Invariant density is not positive (min {m.min():.3e}) at N={N}; "
                                  "increase the resolution")
    logger.debug("Invariant density N=%d: multiplier %.2e, min %.6g", N, sol[size], m.min())
    return m


def correctors(b: DriftSpec, m: ScalarField, b_bar, N: int = BLOCH_DEFAULT_POINTS):
    """chi_j with A chi_j = -(b_j - bbar_j), mean(chi_j m) = 0, all j from one factorization."""
    _check_points(N)
    drift = b.on_grid(N)
    if m.grid != drift.b.grid:
        raise InvariantViolation("Invariant density and drift live on different grids")
    b_bar = as_vector(b_bar, drift.dim)
    A = _generator(drift)
    size = A.shape[0]
    K = np.zeros((size + 1, size + 1))
    K[:size, :size] = A
    K[:size, size] = 1.0
    K[size, :size] = m.flat() / size
    rhs = np.zeros((size + 1, drift.dim))
    for j in range(drift.dim):
        rhs[:size, j] = -(drift.b.components[j].ravel() - b_bar[j])
    sol = _bordered_solve(K, rhs, SolveFailure, "correctors")
    return [ScalarField(m.grid, sol[:size, j]) for j in range(drift.dim)]


def effective_diffusion(b: DriftSpec, N: int = BLOCH_DEFAULT_POINTS) -> EffectiveDiffusion:
    drift = b.on_grid(N)
    m = invariant_density(drift, N)
    b_bar = np.array([mean(m.with_values(c * m.values)) for c in drift.b.components])
    chi = correctors(drift, m, b_bar, N)
    grads = [gradient(c).components for c in chi]
    dim = drift.dim
    Q = np.empty((dim, dim))
    for j in range(dim):
        for k in range(dim):
            dot = sum((float(j == l) + grads[j][l]) * (float(k == l) + grads[k][l]) for l in range(dim))
            Q[j, k] = float(np.mean(dot * m.values))
    Q = check_spd(Q, "Effective diffusion Q")
    residuals = {
        'stationarity_residual': stationarity_residual(drift, m),
        'corrector_residual': max(corrector_residual(drift, c, j, b_bar[j]) for j, c in enumerate(chi)),
    }
    logger.info("Effective diffusion %s N=%d: bbar=%s Q=%s", drift.label, N, b_bar, Q.tolist())
    return EffectiveDiffusion(m, b_bar, tuple(chi), Q, drift, residuals)
