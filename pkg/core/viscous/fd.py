"""
Model: u_t + 1/2 |Du|^2 + V(x/eps) = (eps/2) Lap u solved directly.
Purpose: Independent cross-check of the Hopf-Cole solver: explicit monotone scheme with the
         Godunov flux for 1/2 |p|^2 (per axis) and a centered second difference for the
         viscosity, on a box whose edge nodes follow the interior by linear extrapolation,
         held inside the small-time band g +- C s.
Dependencies: numpy, scipy.interpolate (2D read-out), core/torus.
Ext Hooks: A second-order (ENO) gradient would cut the numerical viscosity.
"""

import logging
import math
from typing import Optional

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from core.config import FD_MAX_POINTS, FD_POINTS_PER_PERIOD
from core.errors import CFLViolation, ResolutionRefused
from core.torus import evaluate
from core.viscous.eps import EpsProblem

logger = logging.getLogger(__name__)


def godunov(Dm: np.ndarray, Dp: np.ndarray) -> np.ndarray:
    """Godunov numerical Hamiltonian of 1/2 p^2 from backward/forward differences."""
    return 0.5 * np.maximum(np.maximum(Dm, 0.0) ** 2, np.minimum(Dp, 0.0) ** 2)


def gradient_bound(problem: EpsProblem) -> float:
    """Estimate of sup |Du^eps|: Lip(g) plus the corrector slope sqrt(2 osc V), plus one."""
    return problem.data.lipschitz_bound + math.sqrt(2.0 * problem.potential.oscillation) + 1.0


def small_time_constant(problem: EpsProblem) -> float:
    """C with |u^eps(x, s) - g(x)| <= C s near the box edge."""
    return 0.5 * gradient_bound(problem) ** 2 + problem.potential.sup_norm


def _extrapolate_edges(u: np.ndarray) -> None:
    for j in range(u.ndim):
        def at(i):
            index = [slice(None)] * u.ndim
            index[j] = i
            return tuple(index)
        u[at(0)] = 2.0 * u[at(1)] - u[at(2)]
        u[at(-1)] = 2.0 * u[at(-2)] - u[at(-3)]


def solve_eps_fd(problem: EpsProblem, eval_points, points_per_period: int = FD_POINTS_PER_PERIOD,
                 dt: Optional[float] = None) -> np.ndarray:
    pts = np.asarray(eval_points, dtype=float).reshape(-1, problem.dim)
    eps, t, dim = problem.epsilon, problem.time, problem.dim
    center = np.array(problem.center)
    L = problem.data.lipschitz_bound
    du_max = gradient_bound(problem)

    half = float(np.abs(pts - center).max()) + 2.0 * (L + 1.0) * t + 1.0
    dx = eps / points_per_period
    n = int(math.ceil(2 * half / dx)) + 1
    if n ** dim > FD_MAX_POINTS:
        raise ResolutionRefused(f"Finite-difference grid of {n}^{dim} nodes exceeds {FD_MAX_POINTS}")

    dt_max = min(dx ** 2 / (2 * eps * dim), dx / (2 * du_max))
    if dt is not None and dt > dt_max:
        raise CFLViolation(f"Time step {dt:.3e} exceeds the stability bound {dt_max:.3e}")
    steps = max(1, int(math.ceil(t / (dt or dt_max))))
    dt = t / steps

    axes = [center[j] - half + dx * np.arange(n) for j in range(dim)]
    mesh = np.meshgrid(*axes, indexing='ij')
    nodes = np.stack([m.ravel() for m in mesh], axis=1)
    u = problem.data(nodes).reshape(mesh[0].shape)
    V = problem.potential
    if V.is_constant:
        Vx = np.full(u.shape, V.vmax)
    else:
        scaled = nodes / eps
        Vx = evaluate(V.field, scaled if dim == 2 else scaled[:, 0]).reshape(u.shape)
    interior = tuple(slice(1, -1) for _ in range(dim))
    V_in = Vx[interior]
    edge = np.ones(u.shape, dtype=bool)
    edge[interior] = False
    g_edge = u[edge]
    C = small_time_constant(problem)

    logger.info("solve_eps_fd eps=%g t=%g: %d^%d nodes, %d steps", eps, t, n, dim, steps)
    for step in range(steps):
        hamiltonian = np.zeros_like(V_in)
        lap = np.zeros_like(V_in)
        steepest = 0.0
        for j in range(dim):
            lo = [slice(1, -1)] * dim
            hi = [slice(1, -1)] * dim
            lo[j] = slice(0, -2)
            hi[j] = slice(2, None)
            center_vals = u[interior]
            Dm = (center_vals - u[tuple(lo)]) / dx
            Dp = (u[tuple(hi)] - center_vals) / dx
            hamiltonian += godunov(Dm, Dp)
            lap += (Dp - Dm) / dx
            if step % 256 == 0:
                steepest = max(steepest, float(np.abs(Dm).max()), float(np.abs(Dp).max()))
        if steepest * 2 * dt > dx:
            raise CFLViolation(f"Observed |Du| = {steepest:.3g} breaks the step {dt:.3e} (dx {dx:.3e})")
        u[interior] += dt * (0.5 * eps * lap - hamiltonian - V_in)
        _extrapolate_edges(u)
        band = C * (step + 1) * dt
        u[edge] = np.clip(u[edge], g_edge - band, g_edge + band)

    if dim == 1:
        return np.interp(pts[:, 0], axes[0], u)
    return RegularGridInterpolator(axes, u)(pts)
