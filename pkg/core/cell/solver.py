"""
Model: cell problem -1/2 Lap v_p + 1/2 |p + Dv_p|^2 + V = Hbar(p) for the quadratic Hamiltonian.
Purpose: Hbar(p) as the principal eigenvalue of the tilted operator
         L_p phi = 1/2 Lap phi - p.D phi + (1/2|p|^2 + V) phi, with r_p = exp(-v_p) its positive
         eigenfunction, pi_p = r_p r_{-p} / mean, and the derivatives DHbar, D^2Hbar.
Dependencies: numpy, scipy.linalg (LU, dense eig), core/torus, core/cell/operators.py.
Ext Hooks: Matrix-free shift-and-invert for resolutions past the dense limits.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np
import scipy.linalg

from core.cell.operators import generator_matrix
from core.cell.potential import Potential
from core.config import (CELL_DEFAULT_POINTS, CELL_MIN_POINTS, DENSE_LIMIT_1D, DENSE_LIMIT_2D,
                         EIGEN_MAX_ITERATIONS, EIGEN_TOLERANCE, HESSIAN_STEP, P_MAX, POSITIVITY_FLOOR,
                         SHIFT_MARGIN)
from core.errors import (InvariantViolation, MismatchedSolutions, NonConvergence,
                         NoPositiveEigenvector, NotPositiveDefinite, OperatingRangeError)
from core.torus import ScalarField, VectorField, divergence, gradient, laplacian

logger = logging.getLogger(__name__)


def as_vector(p, dim: int) -> np.ndarray:
    vec = np.atleast_1d(np.asarray(p, dtype=float)).reshape(-1)
    if vec.size != dim:
        raise InvariantViolation(f"Vector {p} does not match dimension {dim}")
    return vec


@dataclass(frozen=True)
class PrincipalPair:
    """Principal eigenvalue of L_p and its eigenfunction, normalized r(0) = 1."""
    p: np.ndarray
    hbar: float
    r: ScalarField


@dataclass(frozen=True)
class CellSolution:
    p: np.ndarray
    hbar: float
    v: ScalarField
    r: ScalarField
    pi: ScalarField
    e_p: float
    resolution: int
    potential: Potential
    r_minus: Optional[ScalarField] = None

    @property
    def dim(self) -> int:
        return self.v.grid.dim

    def drift(self) -> VectorField:
        """b_p = -p - Dv_p, the drift of the Doob-transformed diffusion."""
        return gradient(self.v).shifted(self.p).scaled(-1.0)


def _check_request(V: Potential, p: np.ndarray, N: int) -> None:
    if N < CELL_MIN_POINTS:
        raise InvariantViolation(f"Cell solves need N >= {CELL_MIN_POINTS}, got {N}")
    if np.linalg.norm(p) > P_MAX:
        raise OperatingRangeError(f"|p| = {np.linalg.norm(p):.3g} outside operating range |p| <= {P_MAX}")
    limit = DENSE_LIMIT_1D if V.dim == 1 else DENSE_LIMIT_2D
    if N > limit:
        logger.warning("N=%d exceeds the dense limit %d for dim %d; expect slow solves", N, limit, V.dim)


def _shift_invert(A: np.ndarray, sigma: float) -> tuple:
    """Power iteration with (sigma I - A)^{-1}; returns (eigenvalue, vector) or None on stall."""
    size = A.shape[0]
    # round-off floor of the LU solves scales with the operator norm
    noise = 64.0 * np.finfo(float).eps * float(np.abs(A).sum(axis=1).max())
    M = -A
    M[np.diag_indices_from(M)] += sigma
    lu = scipy.linalg.lu_factor(M, overwrite_a=True)
    x = np.full(size, 1.0 / np.sqrt(size))
    lam_prev = np.inf
    for it in range(EIGEN_MAX_ITERATIONS):
        y = scipy.linalg.lu_solve(lu, x)
        mu = float(x @ y) / float(x @ x)
        lam = sigma - 1.0 / mu
        y /= np.linalg.norm(y)
        y *= np.sign(y[np.argmax(np.abs(y))])
        dx = float(np.abs(y - x).max())
        x = y
        if abs(lam - lam_prev) <= max(EIGEN_TOLERANCE * max(1.0, abs(lam)), noise) \
                and dx <= max(1e-11, noise):
            logger.debug("Shift-invert converged in %d iterations (lambda=%.15g)", it + 1, lam)
            return lam, x
        lam_prev = lam
    return None


def _dense_principal(A: np.ndarray) -> tuple:
    try:
        w, vecs = scipy.linalg.eig(A)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise NonConvergence(f"Dense eigendecomposition failed: {e}") from e
    i = int(np.argmax(w.real))
    vec = vecs[:, i]
    vec = vec / vec[np.argmax(np.abs(vec))]
    if abs(w[i].imag) > 1e-8 or np.abs(vec.imag).max() > 1e-8:
        raise NonConvergence("Principal eigenpair is not real")
    return float(w[i].real), vec.real


def principal_pair(V: Potential, p, N: Optional[int] = None) -> PrincipalPair:
    """Maximal-real-part eigenpair of the tilted operator with positive eigenvector. Negative entries
    smaller than POSITIVITY_FLOOR * max are lifted to that floor; larger ones raise."""
    N = N or V.points
    p = as_vector(p, V.dim)
    _check_request(V, p, N)
    pot = V.resampled(N)
    grid = pot.field.grid
    half_p2 = 0.5 * float(p @ p)
    if pot.is_constant:
        return PrincipalPair(p, half_p2 + pot.vmax, ScalarField.constant(grid, 1.0))

    A = generator_matrix(grid.dim, N, drift=-p, potential=half_p2 + pot.field.flat())
    sigma = half_p2 + pot.vmax + SHIFT_MARGIN
    result = _shift_invert(A, sigma)
    if result is None:
        logger.warning("Shift-invert stalled at p=%s; falling back to dense eig", p)
        result = _dense_principal(A)
    hbar, x = result

    x = x * np.sign(x[np.argmax(np.abs(x))])
    floor = POSITIVITY_FLOOR * x.max()
    if x.min() < -floor:
        raise NoPositiveEigenvector(
            f"Principal eigenvector changes sign (min/max = {x.min() / x.max():.2e}) at p={p}, N={N}; "
            "increase the resolution")
    # entries within the floor of zero are round-off
    x = np.where(x > 0.0, x, floor)
    r = ScalarField(grid, x / x[0])
    return PrincipalPair(p, hbar, r)


def assemble_cell(V: Potential, pair: PrincipalPair, pair_minus: PrincipalPair) -> CellSolution:
    """Bundle two principal solves at p and -p into a CellSolution."""
    if not np.allclose(pair.p, -pair_minus.p, atol=1e-14):
        raise MismatchedSolutions(f"Expected solves at p and -p, got {pair.p} and {pair_minus.p}")
    grid = pair.r.grid
    pot = V.resampled(grid.points)
    v = pair.r.with_values(-np.log(pair.r.values))
    v = v.with_values(v.values - v.values.flat[0])
    prod = pair.r.values * pair_minus.r.values
    pi = pair.r.with_values(prod / prod.mean())
    e_p = 0.5 * float(pair.p @ pair.p) - pair.hbar
    return CellSolution(pair.p, pair.hbar, v, pair.r, pi, e_p, grid.points, pot, pair_minus.r)


def solve_cell(V: Potential, p, N: Optional[int] = None) -> CellSolution:
    N = N or V.points or CELL_DEFAULT_POINTS
    p = as_vector(p, V.dim)
    sol = assemble_cell(V, principal_pair(V, p, N), principal_pair(V, -p, N))
    logger.debug("Cell solve p=%s N=%d hbar=%.15g", p, N, sol.hbar)
    return sol


def grad_hbar(sol_p: CellSolution, sol_minus_p: Optional[CellSolution] = None) -> np.ndarray:
    """DHbar(p) = mean((p + Dv_p) pi_p)."""
    pi = sol_p.pi
    if sol_minus_p is not None:
        if not np.allclose(sol_minus_p.p, -sol_p.p, atol=1e-14):
            raise MismatchedSolutions("grad_hbar needs solutions at p and -p")
        if sol_minus_p.resolution != sol_p.resolution or \
                not np.array_equal(sol_minus_p.potential.field.values, sol_p.potential.field.values):
            raise MismatchedSolutions("grad_hbar needs solutions of the same potential and resolution")
        prod = sol_p.r.values * sol_minus_p.r.values
        pi = pi.with_values(prod / prod.mean())
    Dv = gradient(sol_p.v)
    return np.array([float(np.mean((sol_p.p[j] + Dv.components[j]) * pi.values))
                     for j in range(sol_p.dim)])


def check_spd(M: np.ndarray, what: str) -> np.ndarray:
    M = 0.5 * (M + M.T)
    smallest = float(np.linalg.eigvalsh(M).min())
    if smallest <= 0.0:
        raise NotPositiveDefinite(f"{what} has eigenvalue {smallest:.3e} <= 0")
    return M


def hess_hbar(V: Potential, p, h: float = HESSIAN_STEP, N: Optional[int] = None) -> np.ndarray:
    """Central differences of grad_hbar, symmetrized; raises if not positive definite."""
    if not 1e-4 <= h <= 1e-2:
        raise InvariantViolation(f"Hessian step h must lie in [1e-4, 1e-2], got {h}")
    p = as_vector(p, V.dim)
    M = np.empty((V.dim, V.dim))
    for j in range(V.dim):
        e = np.zeros(V.dim)
        e[j] = h
        M[:, j] = (grad_hbar(solve_cell(V, p + e, N)) - grad_hbar(solve_cell(V, p - e, N))) / (2 * h)
    return check_spd(M, "D^2 Hbar")


def residuals(sol: CellSolution) -> Dict[str, float]:
    """Sup-norms of the cell equation and of the pi_p stationarity equation."""
    Dv = gradient(sol.v)
    tilted = Dv.shifted(sol.p)
    cell = (-0.5 * laplacian(sol.v).values + 0.5 * tilted.norm() ** 2
            + sol.potential.field.values - sol.hbar)
    flux = VectorField(sol.v.grid, tuple(c * sol.pi.values for c in tilted.components))
    stationarity = -0.5 * laplacian(sol.pi).values - divergence(flux).values
    return {
        'cell_residual': float(np.abs(cell).max()),
        'stationarity_residual': float(np.abs(stationarity).max()),
    }
