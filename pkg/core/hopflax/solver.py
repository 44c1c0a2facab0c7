"""
Model: homogenized solution u(x, t) = min_y {g(y) + t Lbar((x - y)/t)} (Hopf-Lax).
Purpose: Minimize h(y) = g(y) + t Lbar((x - y)/t) over a ball around x (coarse grid, then
         golden-section in 1D / shrinking coordinate descent in 2D), plus the diagnostics built
         on the minimizer: small-time ratio, quadratic growth of h, twice-differentiability of
         u(., t) and the minimizer relation y = x - t DHbar(Du).
Dependencies: numpy, scipy.optimize, core/legendre, core/hopflax/data.py.
Ext Hooks: Multi-start refinement when g has many near-tied local minima.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from core.config import (GRID_DIVISIONS, GROWTH_LEVELS, GROWTH_SAMPLES, PROFILE_POINTS,
                         RADIUS_INFLATION, REFINE_TOLERANCE)
from core.errors import InvariantViolation, NoQuadraticGrowth
from core.hopflax.data import LipschitzData
from core.legendre import HamiltonianModel

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HopfLaxSolution:
    x: np.ndarray
    t: float
    value: float
    minimizer: np.ndarray
    radius: float
    coarse_value: float
    h_profile: Optional[Tuple[np.ndarray, np.ndarray]] = None


@dataclass(frozen=True)
class QuadraticGrowth:
    """delta at the largest trial radius r with delta(r) > 0, the whole (r, delta(r)) series and u(x, t)."""
    delta: float
    r: float
    minimizer: np.ndarray
    series: List[Tuple[float, float]] = field(default_factory=list)
    value: Optional[float] = None


@dataclass(frozen=True)
class CurvatureProbe:
    central: np.ndarray
    forward: np.ndarray
    backward: np.ndarray
    twice_differentiable: bool


def _as_point(x, dim: int) -> np.ndarray:
    point = np.atleast_1d(np.asarray(x, dtype=float)).reshape(-1)
    if point.size != dim:
        raise InvariantViolation(f"Point {x} does not match dimension {dim}")
    return point


def search_radius(g: LipschitzData, model: HamiltonianModel, t: float) -> float:
    """R = t sup{|DHbar(p)| : |p| <= Lip(g)} * 1.5 + t."""
    return t * model.grad_bound(g.lipschitz_bound) * RADIUS_INFLATION + t


class _Objective:
    """h(y) = g(y) + t Lbar((x - y)/t) for arrays of candidate y, shape (M, dim)."""

    def __init__(self, g: LipschitzData, model: HamiltonianModel, x: np.ndarray, t: float, radius: float):
        self.g = g
        self.x = x
        self.t = t
        self.table = model.lagrangian_table(radius / t)

    def __call__(self, y: np.ndarray) -> np.ndarray:
        y = np.asarray(y, dtype=float).reshape(-1, self.x.size)
        return self.g(y) + self.t * self.table.value((self.x - y) / self.t)

    def at(self, y) -> float:
        return float(self(y)[0])


def _coarse_grid(x: np.ndarray, radius: float, step: float) -> np.ndarray:
    count = int(np.floor(radius / step))
    offsets = np.arange(-count, count + 1) * step
    if x.size == 1:
        return (x[0] + offsets).reshape(-1, 1)
    a, b = np.meshgrid(offsets, offsets, indexing='ij')
    inside = a ** 2 + b ** 2 <= radius ** 2
    return np.stack([x[0] + a[inside], x[1] + b[inside]], axis=1)


def _refine_1d(h: _Objective, center: float, step: float, radius: float, x: float) -> float:
    lo = max(center - step, x - radius)
    hi = min(center + step, x + radius)
    f = lambda y: h.at([y])
    f_lo, f_mid, f_hi = f(lo), f(center), f(hi)
    if f_mid < f_lo and f_mid < f_hi:
        res = minimize_scalar(f, bracket=(lo, center, hi), method='golden', tol=REFINE_TOLERANCE)
        if lo <= res.x <= hi:
            return float(res.x)
    res = minimize_scalar(f, bounds=(lo, hi), method='bounded', options={'xatol': REFINE_TOLERANCE})
    return float(res.x)


def _refine_2d(h: _Objective, start: np.ndarray, step: float, radius: float, x: np.ndarray) -> np.ndarray:
    y = start.copy()
    best = h.at(y)
    for _ in range(20000):
        if step < REFINE_TOLERANCE:
            break
        moved = False
        for j in range(2):
            for sign in (1.0, -1.0):
                trial = y.copy()
                trial[j] += sign * step
                if np.linalg.norm(trial - x) > radius:
                    continue
                value = h.at(trial)
                if value < best:
                    y, best, moved = trial, value, True
                    break
        if not moved:
            step *= 0.5
    return y


def solve(g: LipschitzData, model: HamiltonianModel, x, t: float, profile: bool = False) -> HopfLaxSolution:
    if t <= 0:
        raise InvariantViolation(f"Hopf-Lax needs t > 0, got {t}")
    x = _as_point(x, model.dim)
    radius = search_radius(g, model, t)
    h = _Objective(g, model, x, t, radius)
    step = t / GRID_DIVISIONS

    grid = _coarse_grid(x, radius, step)
    values = h(grid)
    i = int(np.argmin(values))
    coarse_y, coarse_value = grid[i], float(values[i])

    if model.dim == 1:
        refined = np.array([_refine_1d(h, coarse_y[0], step, radius, x[0])])
    else:
        refined = _refine_2d(h, coarse_y, step, radius, x)
    refined_value = h.at(refined)
    if refined_value <= coarse_value:
        minimizer, value = refined, refined_value
    else:
        minimizer, value = coarse_y.copy(), coarse_value

    h_profile = None
    if profile:
        offsets = np.linspace(-10 * step, 10 * step, PROFILE_POINTS)
        ys = np.tile(minimizer, (PROFILE_POINTS, 1))
        ys[:, 0] += offsets
        h_profile = (ys, h(ys))

    logger.debug("Hopf-Lax x=%s t=%g: u=%.12g at y=%s (R=%.4g)", x, t, value, minimizer, radius)
    return HopfLaxSolution(x, float(t), value, minimizer, radius, coarse_value, h_profile)


def solve_many(g: LipschitzData, model: HamiltonianModel, points: Sequence, t: float) -> np.ndarray:
    return np.array([solve(g, model, x, t).value for x in points])


def small_time_check(g: LipschitzData, model: HamiltonianModel, x, t: float) -> float:
    """|u(x, t) - g(x)| / t; bounded as t -> 0."""
    if not 0 < t <= 1:
        raise InvariantViolation(f"small_time_check needs t in (0, 1], got {t}")
    x = _as_point(x, model.dim)
    return abs(solve(g, model, x, t).value - g.at(x)) / t


def _shell_offsets(dim: int, r: float) -> np.ndarray:
    """Sample offsets inside B(0, r) minus the center."""
    if dim == 1:
        s = r * np.arange(1, GROWTH_SAMPLES + 1) / GROWTH_SAMPLES
        return np.concatenate([s, -s]).reshape(-1, 1)
    angles = 2 * np.pi * np.arange(GROWTH_SAMPLES) / GROWTH_SAMPLES
    directions = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    radii = r * np.arange(1, 9) / 8
    return (radii[:, None, None] * directions[None, :, :]).reshape(-1, 2)


def quad_growth_diag(g: LipschitzData, model: HamiltonianModel, x, t: float,
                     radius_grid: Optional[Sequence[float]] = None) -> QuadraticGrowth:
    """delta(r) = min over sampled y in B(ybar, r) of (h(y) - h(ybar)) / |y - ybar|^2.

    A diagnostic on samples, not a certified bound.
    """
    if not g.semiconcave:
        logger.warning("quad_growth_diag on data %s, which is not flagged semiconcave", g.name)
    sol = solve(g, model, x, t)
    if radius_grid is None:
        r0 = min(0.5 * t, 0.5 * sol.radius)
        radius_grid = [r0 / 2 ** k for k in range(GROWTH_LEVELS)]
    h = _Objective(g, model, sol.x, t, sol.radius + max(radius_grid))
    h0 = h.at(sol.minimizer)

    series = []
    for r in sorted(radius_grid, reverse=True):
        offsets = _shell_offsets(model.dim, r)
        dist2 = np.sum(offsets ** 2, axis=1)
        delta = float(np.min((h(sol.minimizer + offsets) - h0) / dist2))
        series.append((float(r), delta))

    positive = [(r, d) for r, d in series if d > 0]
    if not positive:
        raise NoQuadraticGrowth(f"delta(r) <= 0 at every trial radius for data {g.name} at x={sol.x}")
    r, delta = max(positive)
    return QuadraticGrowth(delta, r, sol.minimizer, series, sol.value)


def twice_differentiability_probe(g: LipschitzData, model: HamiltonianModel, x, t: float,
                                  h: float = 1e-2, tolerance: float = 0.1) -> CurvatureProbe:
    """Central vs one-sided second differences of u(., t) along each axis at x."""
    x = _as_point(x, model.dim)
    u = lambda y: solve(g, model, y, t).value
    u0 = u(x)
    central, forward, backward = [], [], []
    for j in range(model.dim):
        e = np.zeros(model.dim)
        e[j] = h
        up, um = u(x + e), u(x - e)
        central.append((up - 2 * u0 + um) / h ** 2)
        forward.append((u(x + 2 * e) - 2 * up + u0) / h ** 2)
        backward.append((u0 - 2 * um + u(x - 2 * e)) / h ** 2)
    central, forward, backward = np.array(central), np.array(forward), np.array(backward)
    scale = np.maximum(1.0, np.abs(central))
    mismatch = np.maximum(np.abs(forward - central), np.abs(backward - central)) / scale
    return CurvatureProbe(central, forward, backward, bool(np.all(mismatch <= tolerance)))


def minimizer_consistency(g: LipschitzData, model: HamiltonianModel, x, t: float,
                          step: float = 1e-4) -> float:
    """|ybar - (x - t DHbar(Du(x, t)))| with Du by central differences."""
    x = _as_point(x, model.dim)
    sol = solve(g, model, x, t)
    Du = np.empty(model.dim)
    for j in range(model.dim):
        e = np.zeros(model.dim)
        e[j] = step
        Du[j] = (solve(g, model, x + e, t).value - solve(g, model, x - e, t).value) / (2 * step)
    predicted = x - t * model.grad(Du)
    return float(np.linalg.norm(sol.minimizer - predicted))
