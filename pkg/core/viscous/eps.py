"""
Model: u_t + 1/2 |Du|^2 + V(x/eps) = (eps/2) Lap u, u(., 0) = g.
Purpose: Hopf-Cole solve. In y = x/eps, s = t/eps the transform w = exp(-u/eps) solves
         w_s = 1/2 Lap w + V(y) w; it is evolved by Strang splitting on a truncated box treated
         as periodic, with a running gauge so that u = -eps (log w + log_gauge).
Dependencies: numpy, core/viscous/box.py, core/cell, core/hopflax.
Ext Hooks: Per-point exponential tilting would lift the dynamic-range limit away from argmin u.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from core.cell import Potential
from core.config import POINTS_PER_PERIOD, RENORMALIZE_EVERY, TAIL_BUDGET
from core.errors import InvariantViolation, ResolutionRefused
from core.hopflax import LipschitzData
from core.viscous.box import (BoxGrid, GaugedState, constant_potential_step, evolve_schrodinger,
                              potential_on_box, splitting_steps)

logger = logging.getLogger(__name__)

# exp(-30) is about 1e-13, the floor below which FFT round-off swamps w
DYNAMIC_RANGE = 30.0


def truncation_depth(potential: Potential, data: LipschitzData, epsilon: float, t: float) -> float:
    """Distance from the evaluation set to the box edge that keeps the discarded mass below
    TAIL_BUDGET * eps, both for the kernel bound and for the Lipschitz growth of g."""
    log_budget = math.log(1.0 / (TAIL_BUDGET * epsilon))
    kernel = math.sqrt(2 * t * (t * max(potential.vmax, 0.0) + log_budget)) * (1 + 1e-9)
    L = data.lipschitz_bound
    growth = t * L + math.sqrt((t * L) ** 2 + 2 * t * (t * potential.oscillation + epsilon * log_budget))
    return max(kernel, growth)


@dataclass(frozen=True)
class EpsProblem:
    potential: Potential
    data: LipschitzData
    epsilon: float
    time: float
    half_width: float
    grid_points: int
    center: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        if not 0 < self.epsilon <= 1:
            raise InvariantViolation(f"epsilon must lie in (0, 1], got {self.epsilon}")
        if self.time <= 0:
            raise InvariantViolation(f"time must be positive, got {self.time}")
        if self.potential.dim != self.data.dim:
            raise InvariantViolation("Potential and data dimensions differ")
        center = np.zeros(self.dim) if self.center is None else np.asarray(self.center, dtype=float)
        object.__setattr__(self, 'center', tuple(float(c) for c in center.reshape(self.dim)))

    @property
    def dim(self) -> int:
        return self.potential.dim

    @classmethod
    def auto(cls, potential: Potential, data: LipschitzData, epsilon: float, time: float, eval_points,
             points_per_period: int = POINTS_PER_PERIOD) -> 'EpsProblem':
        """Smallest box meeting the resolution and tail-budget invariants for eval_points."""
        pts = np.asarray(eval_points, dtype=float).reshape(-1, potential.dim)
        mid = 0.5 * (pts.min(axis=0) + pts.max(axis=0))
        # center on the lattice eps Z / P so V(x / eps) tiles the box exactly
        center = np.round(mid * points_per_period / epsilon) * epsilon / points_per_period
        reach = float(np.abs(pts - center).max()) + epsilon / points_per_period
        R = reach + truncation_depth(potential, data, epsilon, time)
        M = 2 ** math.ceil(math.log2(2 * R * points_per_period / epsilon + 2))
        return cls(potential, data, epsilon, time, M * epsilon / (2 * points_per_period), M, tuple(center))

    def box(self) -> BoxGrid:
        """The truncated box in y = x / eps."""
        lower = (np.array(self.center) - self.half_width) / self.epsilon
        return BoxGrid(self.dim, tuple(lower), 2 * self.half_width / self.epsilon, self.grid_points)

    def points_per_period(self) -> float:
        return self.grid_points * self.epsilon / (2 * self.half_width)

    def check(self, eval_points) -> np.ndarray:
        pts = np.asarray(eval_points, dtype=float).reshape(-1, self.dim)
        if self.points_per_period() < POINTS_PER_PERIOD * (1 - 1e-12):
            raise ResolutionRefused(
                f"{self.points_per_period():.3g} points per period of V(x/eps); need >= {POINTS_PER_PERIOD}")
        reach = float(np.abs(pts - np.array(self.center)).max())
        margin = self.half_width - reach
        if margin <= 0:
            raise ResolutionRefused(f"Evaluation points reach {reach:.4g} beyond half-width {self.half_width:.4g}")
        t = self.time
        tail = math.exp(t * self.potential.vmax - margin ** 2 / (2 * t))
        if tail >= TAIL_BUDGET * self.epsilon:
            raise ResolutionRefused(
                f"Gaussian tail {tail:.3e} exceeds budget {TAIL_BUDGET * self.epsilon:.3e}; widen the box")
        return pts


def solve_eps(problem: EpsProblem, eval_points, renormalize_every: int = RENORMALIZE_EVERY) -> np.ndarray:
    """u^eps(x, t) at eval_points via Hopf-Cole."""
    pts = problem.check(eval_points)
    eps, t = problem.epsilon, problem.time
    box = problem.box()

    x_nodes = np.stack([c.ravel() for c in box.coordinates()], axis=1) * eps
    g = problem.data(x_nodes).reshape(box.shape)
    g_min = float(g.min())
    state = GaugedState(np.exp(-(g - g_min) / eps), -g_min / eps)

    duration = t / eps
    V = problem.potential
    if V.is_constant:
        constant_potential_step(state, box, V.vmax, duration)
    else:
        steps = splitting_steps(duration, V.sup_norm, box.spacing)
        logger.info("solve_eps eps=%g t=%g: box %d^%d, %d steps", eps, t, box.points, box.dim, steps)
        evolve_schrodinger(state, box, potential_on_box(V, box), duration, steps, renormalize_every)

    values = box.interpolate(state.w, pts / eps)
    if np.any(values < math.exp(-DYNAMIC_RANGE)):
        logger.warning("u^eps at some evaluation points sits more than %g eps above the box minimum; "
                       "expect lost digits", DYNAMIC_RANGE)
    return -eps * state.log_values(values)


def small_time_ratio(problem: EpsProblem, x) -> float:
    """|u^eps(x, t) - g(x)| / (t + eps); bounded as t, eps -> 0."""
    point = np.asarray(x, dtype=float).reshape(1, problem.dim)
    u = float(solve_eps(problem, point)[0])
    return abs(u - problem.data.at(point)) / (problem.time + problem.epsilon)


def solve_eps_many(potential: Potential, data: LipschitzData, epsilon: float, time: float,
                   eval_points: Sequence) -> np.ndarray:
    """EpsProblem.auto followed by solve_eps."""
    return solve_eps(EpsProblem.auto(potential, data, epsilon, time, eval_points), eval_points)
