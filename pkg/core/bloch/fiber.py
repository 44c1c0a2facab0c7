"""
Model: Bloch fibers A_xi = e^{-i xi.x} A e^{i xi.x} = 1/2 (D + i xi)^2 + b.(D + i xi) of the
       periodic diffusion, with principal eigenvalue lambda(xi) = i bbar.xi - 1/2 xi.Q xi + O(|xi|^3).
Purpose: lambda(xi) from the complex collocation matrix, and (bbar, Q) read back from
         five-point differences of lambda along coordinate and diagonal directions.
Dependencies: numpy, scipy.linalg (dense eigvals), scipy.sparse.linalg (ARPACK shift-invert),
              core/cell/operators.py, core/bloch/effective.py.
Ext Hooks: N/A.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse.linalg

from core.bloch.effective import DriftSpec
from core.cell import as_vector, check_spd
from core.cell.operators import generator_matrix
from core.config import BLOCH_DEFAULT_POINTS, FIBER_SPARSE_LIMIT, FIBER_STEP
from core.errors import InvariantViolation, NonConvergence

logger = logging.getLogger(__name__)

# ARPACK target to the right of the spectrum, which lies in Re lambda <= 0
SHIFT = 0.5


@dataclass(frozen=True)
class FiberExpansion:
    b_bar: np.ndarray
    Q: np.ndarray
    step: float


def _principal(A: np.ndarray) -> complex:
    if A.shape[0] <= FIBER_SPARSE_LIMIT:
        try:
            w = scipy.linalg.eigvals(A)
        except (np.linalg.LinAlgError, ValueError) as e:
            raise NonConvergence(f"Fiber eigenvalues failed: {e}") from e
    else:
        try:
            w = scipy.sparse.linalg.eigs(A, k=4, sigma=SHIFT, return_eigenvectors=False)
        except (scipy.sparse.linalg.ArpackNoConvergence, scipy.sparse.linalg.ArpackError) as e:
            raise NonConvergence(f"ARPACK did not converge on the fiber: {e}") from e
    return complex(w[np.argmax(w.real)])


def bloch_fiber(b: DriftSpec, xi, N: int = BLOCH_DEFAULT_POINTS) -> complex:
    """Maximal-real-part eigenvalue of A_xi for |xi| <= pi/2."""
    drift = b.on_grid(N)
    xi = as_vector(xi, drift.dim)
    if np.linalg.norm(xi) > 0.5 * math.pi + 1e-12:
        raise InvariantViolation(f"|xi| = {np.linalg.norm(xi):.4g} outside the near-fiber range pi/2")
    A = generator_matrix(drift.dim, N, drift=list(drift.b.components), twist=xi)
    lam = _principal(A)
    logger.debug("Fiber xi=%s: lambda=%s", xi, lam)
    return lam


def _derivatives(fiber, direction: np.ndarray, eta: float, lam0: complex):
    f = {s: fiber(s * eta * direction) for s in (-2, -1, 1, 2)}
    first = (-f[2] + 8 * f[1] - 8 * f[-1] + f[-2]) / (12 * eta)
    second = (-f[2] + 16 * f[1] - 30 * lam0 + 16 * f[-1] - f[-2]) / (12 * eta ** 2)
    return first, second


def fiber_expansion(b: DriftSpec, N: int = BLOCH_DEFAULT_POINTS, eta: float = FIBER_STEP) -> FiberExpansion:
    """bbar = Im D lambda(0) and Q = -Re D^2 lambda(0)."""
    if not 0 < eta <= 0.25 * math.pi:
        raise InvariantViolation(f"Fiber step must lie in (0, pi/4], got {eta}")
    drift = b.on_grid(N)
    dim = drift.dim

    def fiber(xi):
        return bloch_fiber(drift, xi, N)

    lam0 = fiber(np.zeros(dim))
    b_bar = np.empty(dim)
    Q = np.empty((dim, dim))
    for j in range(dim):
        first, second = _derivatives(fiber, np.eye(dim)[j], eta, lam0)
        b_bar[j] = first.imag
        Q[j, j] = -second.real
    if dim == 2:
        _, second = _derivatives(fiber, np.array([1.0, 1.0]) / math.sqrt(2.0), eta, lam0)
        # second derivative along (e_0 + e_1)/sqrt 2 is (Q_00 + 2 Q_01 + Q_11) / 2
        Q[0, 1] = Q[1, 0] = -second.real - 0.5 * (Q[0, 0] + Q[1, 1])
    Q = check_spd(Q, "Fiber Q")
    logger.info("Fiber expansion %s: lambda(0)=%.2e, bbar=%s, Q=%s", drift.label, abs(lam0), b_bar, Q.tolist())
    return FiberExpansion(b_bar, Q, eta)
