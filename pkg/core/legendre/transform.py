"""
Model: effective Lagrangian Lbar(q) = sup_p {q.p - Hbar(p)}.
Purpose: Pointwise Legendre transform by damped Newton on DHbar(p) = q (grid-search fallback),
         the envelope derivative DLbar(q) = p(q), D^2Lbar = (D^2Hbar)^{-1}, and a tabulated
         Lbar for callers that need thousands of evaluations (Hopf-Lax search).
Dependencies: numpy, scipy.interpolate, core/legendre/model.py.
Ext Hooks: Adaptive table spacing where DHbar bends most.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.interpolate import CloughTocher2DInterpolator, CubicHermiteSpline

from core.cell import as_vector, check_spd
from core.config import NEWTON_MAX_ITERATIONS, NEWTON_TOLERANCE, P_MAX, TABLE_STEP_1D, TABLE_STEP_2D
from core.errors import NewtonDiverged, NotPositiveDefinite, OperatingRangeError
from core.legendre.model import HamiltonianModel

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LagrangianValue:
    q: np.ndarray
    lbar: float
    p_of_q: np.ndarray
    dual_gap: float


def _residual(model: HamiltonianModel, p: np.ndarray, q: np.ndarray) -> np.ndarray:
    return model.grad(p) - q


def _newton(model: HamiltonianModel, q: np.ndarray, p: np.ndarray):
    """Damped Newton on DHbar(p) = q; returns (p, |residual|)."""
    r = _residual(model, p, q)
    gap = float(np.linalg.norm(r))
    for it in range(NEWTON_MAX_ITERATIONS):
        if gap < NEWTON_TOLERANCE:
            break
        step = np.linalg.solve(model.hessian(p), r)
        lam = 1.0
        while lam >= 1.0 / 1024:
            trial = p - lam * step
            r_trial = _residual(model, trial, q)
            gap_trial = float(np.linalg.norm(r_trial))
            if gap_trial < gap:
                p, r, gap = trial, r_trial, gap_trial
                break
            lam *= 0.5
        else:
            logger.debug("Armijo damping exhausted at p=%s (gap %.3e)", p, gap)
            break
    return p, gap


def _grid_search(model: HamiltonianModel, q: np.ndarray) -> np.ndarray:
    """Best q.p - Hbar(p) on a coarse grid over |p - q| <= 2 (1 + osc V)."""
    radius = 2.0 * (1.0 + model.potential.oscillation)
    offsets = np.linspace(-radius, radius, 41)
    if model.dim == 1:
        candidates = [q + np.array([o]) for o in offsets]
    else:
        candidates = [q + np.array([a, b]) for a in offsets for b in offsets if a * a + b * b <= radius ** 2]
    scores = [float(q @ c) - model.hbar(c) for c in candidates]
    return candidates[int(np.argmax(scores))]


def legendre(model: HamiltonianModel, q) -> LagrangianValue:
    """Lbar(q) with its maximizer p(q); Newton from p0 = q since Hbar = 1/2|p|^2 + O(1)."""
    q = as_vector(q, model.dim)
    if np.linalg.norm(q) > P_MAX:
        raise OperatingRangeError(f"|q| = {np.linalg.norm(q):.3g} outside operating range |q| <= {P_MAX}")
    if model.is_constant:
        return LagrangianValue(q, 0.5 * float(q @ q) - model.constant, q.copy(), 0.0)

    p, gap = _newton(model, q, q.copy())
    if gap >= NEWTON_TOLERANCE:
        logger.warning("Newton stalled at q=%s (gap %.3e); retrying from grid search", q, gap)
        p, gap = _newton(model, q, _grid_search(model, q))
        if gap >= NEWTON_TOLERANCE:
            raise NewtonDiverged(f"DHbar(p) = q unsolved at q={q}: residual {gap:.3e}")
    lbar = float(q @ p) - model.hbar(p)
    return LagrangianValue(q, lbar, p, gap)


def dL(value: LagrangianValue) -> np.ndarray:
    """Envelope theorem: DLbar(q) = p(q)."""
    return value.p_of_q.copy()


def d2L(model: HamiltonianModel, q) -> np.ndarray:
    value = legendre(model, q)
    H = model.hessian(value.p_of_q)
    return check_spd(np.linalg.inv(H), "D^2 Lbar")


class LagrangianTable:
    """Lbar and DLbar on |q| <= q_max from samples along q = DHbar(p).

    1D: cubic Hermite spline with the exact slope p at every knot.
    2D: Clough-Tocher interpolation over the scattered images of a p-grid.
    Constant potentials use the closed form 1/2|q|^2 - c.
    """

    def __init__(self, dim: int, q_max: float, value_fn: Callable, slope_fn: Callable):
        self.dim = dim
        self.q_max = q_max
        self._value = value_fn
        self._slope = slope_fn

    def _points(self, q) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        pts = q.reshape(-1) if self.dim == 1 else q.reshape(-1, 2)
        radius = np.abs(pts) if self.dim == 1 else np.linalg.norm(pts, axis=1)
        if radius.size and radius.max() > self.q_max * (1 + 1e-12):
            raise OperatingRangeError(f"|q| = {radius.max():.4g} beyond table range {self.q_max:.4g}")
        return pts

    def value(self, q) -> np.ndarray:
        return np.asarray(self._value(self._points(q)), dtype=float)

    def slope(self, q) -> np.ndarray:
        return np.asarray(self._slope(self._points(q)), dtype=float)

    @classmethod
    def build(cls, model: HamiltonianModel, q_max: float) -> 'LagrangianTable':
        q_max = float(q_max)
        if model.is_constant:
            c = model.constant
            if model.dim == 1:
                return cls(1, q_max, lambda q: 0.5 * q ** 2 - c, lambda q: q.copy())
            return cls(2, q_max, lambda q: 0.5 * np.sum(q ** 2, axis=1) - c, lambda q: q.copy())
        if model.dim == 1:
            return cls._build_1d(model, q_max)
        return cls._build_2d(model, q_max)

    @classmethod
    def _build_1d(cls, model: HamiltonianModel, q_max: float) -> 'LagrangianTable':
        p_end = abs(legendre(model, [q_max]).p_of_q[0]) + 2 * TABLE_STEP_1D
        count = int(math.ceil(p_end / TABLE_STEP_1D))
        ps = np.arange(count + 1) * TABLE_STEP_1D
        qs = np.array([model.grad([p])[0] for p in ps])
        qs[0] = 0.0
        Ls = qs * ps - np.array([model.hbar([p]) for p in ps])
        # DHbar is odd and Lbar even
        q_full = np.concatenate([-qs[:0:-1], qs])
        L_full = np.concatenate([Ls[:0:-1], Ls])
        p_full = np.concatenate([-ps[:0:-1], ps])
        if not np.all(np.diff(q_full) > 0):
            raise NotPositiveDefinite("DHbar is not strictly increasing on the table grid")
        spline = CubicHermiteSpline(q_full, L_full, p_full)
        slope = spline.derivative()
        logger.info("Lagrangian table: %d knots, |q| <= %.4g", q_full.size, q_max)
        return cls(1, q_max, spline, slope)

    @classmethod
    def _build_2d(cls, model: HamiltonianModel, q_max: float) -> 'LagrangianTable':
        angles = np.linspace(0.0, np.pi, 8, endpoint=False)
        p_end = max(float(np.linalg.norm(legendre(model, q_max * np.array([np.cos(a), np.sin(a)])).p_of_q))
                    for a in angles)
        p_end += 2 * TABLE_STEP_2D
        count = int(math.ceil(p_end / TABLE_STEP_2D))
        axis = np.arange(-count, count + 1) * TABLE_STEP_2D
        samples = {}
        for a in axis:
            for b in axis:
                key = (round(a, 10) + 0.0, round(b, 10) + 0.0)
                mirror = (round(-a, 10) + 0.0, round(-b, 10) + 0.0)
                if mirror in samples:
                    q, L = samples[mirror]
                    samples[key] = (-q, L)
                    continue
                p = np.array([a, b])
                q = model.grad(p)
                samples[key] = (q, float(q @ p) - model.hbar(p))
        ps = np.array(list(samples.keys()))
        qs = np.array([s[0] for s in samples.values()])
        Ls = np.array([s[1] for s in samples.values()])
        value = CloughTocher2DInterpolator(qs, Ls)
        slope = CloughTocher2DInterpolator(qs, ps)
        rim = q_max * np.stack([np.cos(2 * angles), np.sin(2 * angles)], axis=1)
        if np.any(np.isnan(value(rim))):
            raise OperatingRangeError(f"Table grid does not cover |q| <= {q_max:.4g}")
        logger.info("Lagrangian table: %d scattered knots, |q| <= %.4g", len(samples), q_max)
        return cls(2, q_max, value, slope)
