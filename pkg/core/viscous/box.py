"""
Model: truncated box [lower, lower + length)^n treated as periodic, for the linear equations
       w_s = 1/2 Lap w + V w and rho_s = 1/2 Lap rho - div(b rho).
Purpose: BoxGrid (nodes, exact Fourier heat multipliers, periodic sampling of cell-periodic
         fields, interpolation), GaugedState (w = e^c * w with max w = 1), and the shared
         Strang evolution used by the eps-solver and the Schrodinger kernel.
Dependencies: numpy (rfftn), core/torus, core/cell.
Ext Hooks: Swap numpy.fft for a planned FFT backend behind _forward/_backward.
"""

import logging
import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from core.cell import Potential
from core.config import MAX_BOX_POINTS, POTENTIAL_STEP_BOUND, SPACING_FACTOR
from core.errors import InvariantViolation, ResolutionRefused, Underflow
from core.torus import ScalarField, TorusGrid, evaluate, evaluate_tensor
from core.torus.field import is_power_of_two

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BoxGrid:
    """Nodes lower_j + k * length / points, k = 0..points-1, on every axis."""
    dim: int
    lower: Tuple[float, ...]
    length: float
    points: int

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise InvariantViolation(f"Box dimension must be 1 or 2, got {self.dim}")
        if not is_power_of_two(self.points) or self.points < 8:
            raise InvariantViolation(f"Box points must be a power of two >= 8, got {self.points}")
        if self.length <= 0:
            raise InvariantViolation("Box length must be positive")
        if self.points ** self.dim > MAX_BOX_POINTS:
            raise ResolutionRefused(
                f"Box of {self.points}^{self.dim} nodes exceeds the limit of {MAX_BOX_POINTS}")
        object.__setattr__(self, 'lower', tuple(float(v) for v in np.broadcast_to(self.lower, (self.dim,))))

    @classmethod
    def around(cls, dim: int, center, half_width: float, points_per_unit: int) -> 'BoxGrid':
        """Smallest box of power-of-two length covering center +- half_width, with every node
        on the lattice Z / points_per_unit so cell-periodic fields tile exactly."""
        c = np.broadcast_to(np.asarray(center, dtype=float), (dim,))
        length = 2.0 ** math.ceil(math.log2(2.0 * half_width + 2.0 / points_per_unit))
        lower = np.floor((c - 0.5 * length) * points_per_unit) / points_per_unit
        return cls(dim, tuple(lower), length, int(length * points_per_unit))

    @property
    def spacing(self) -> float:
        return self.length / self.points

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.points,) * self.dim

    @property
    def cell_volume(self) -> float:
        return self.spacing ** self.dim

    def axis(self, j: int = 0) -> np.ndarray:
        return self.lower[j] + self.spacing * np.arange(self.points)

    def axes(self):
        return [self.axis(j) for j in range(self.dim)]

    def coordinates(self):
        return np.meshgrid(*self.axes(), indexing='ij')

    def center(self) -> np.ndarray:
        return np.array(self.lower) + 0.5 * self.length

    def contains(self, points, margin: float = 0.0) -> bool:
        pts = np.asarray(points, dtype=float).reshape(-1, self.dim)
        lo = np.array(self.lower) + margin
        hi = np.array(self.lower) + self.length - self.spacing - margin
        return bool(np.all((pts >= lo) & (pts <= hi)))

    def wavenumbers(self):
        """Angular wavenumbers in rfftn layout, broadcast-ready."""
        full = 2.0 * np.pi * np.fft.fftfreq(self.points, d=self.spacing)
        half = 2.0 * np.pi * np.fft.rfftfreq(self.points, d=self.spacing)
        if self.dim == 1:
            return (half,)
        return (full[:, None], half[None, :])

    def derivative_wavenumbers(self):
        """As wavenumbers() with the Nyquist entries zeroed, for first derivatives."""
        ks = []
        for k in self.wavenumbers():
            k = np.array(k)
            nyquist = np.isclose(np.abs(k), np.pi / self.spacing)
            k[nyquist] = 0.0
            ks.append(k)
        return tuple(ks)

    def heat_multiplier(self, tau: float) -> np.ndarray:
        """Exact Fourier propagator of 1/2 Lap over time tau."""
        ks = self.wavenumbers()
        return np.exp(-0.5 * tau * sum(k ** 2 for k in ks))

    def forward(self, values: np.ndarray) -> np.ndarray:
        return np.fft.rfftn(values)

    def backward(self, spectrum: np.ndarray) -> np.ndarray:
        return np.fft.irfftn(spectrum, s=self.shape, axes=tuple(range(len(self.shape))))

    def lattice(self) -> int:
        """Nodes per unit period if the box sits on the lattice Z / P (P a power of two >= 8), else 0."""
        per_unit = 1.0 / self.spacing
        P = int(round(per_unit))
        if abs(per_unit - P) > 1e-9 * per_unit or not is_power_of_two(P) or P < 8:
            return 0
        if np.any(np.abs(np.array(self.lower) * P - np.round(np.array(self.lower) * P)) > 1e-6):
            return 0
        return P

    def periodic_values(self, field: ScalarField, scale: float = 1.0) -> np.ndarray:
        """field(x / scale) at the nodes, field being 1-periodic (the box lives at scale)."""
        if field.grid.dim != self.dim:
            raise InvariantViolation("Field and box dimensions differ")
        unit = BoxGrid(self.dim, tuple(np.array(self.lower) / scale), self.length / scale, self.points)
        P = unit.lattice()
        if P:
            cell = evaluate_tensor(field, [np.arange(P) / P] * self.dim)
            idx = [np.mod(np.rint(ax * P).astype(np.int64), P) for ax in unit.axes()]
            return cell[np.ix_(*idx)] if self.dim == 2 else cell[idx[0]]
        coords = np.stack([c.ravel() for c in unit.coordinates()], axis=1)
        return evaluate(field, coords if self.dim == 2 else coords[:, 0]).reshape(self.shape)

    def interpolate(self, values: np.ndarray, points) -> np.ndarray:
        """Trigonometric interpolation of node values, the box taken as a torus."""
        grid = TorusGrid(self.dim, self.points)
        f = ScalarField(grid, values)
        pts = (np.asarray(points, dtype=float).reshape(-1, self.dim) - np.array(self.lower)) / self.length
        return evaluate(f, pts if self.dim == 2 else pts[:, 0])


class GaugedState:
    """w >= 0 with the true solution equal to exp(log_gauge) * w."""

    def __init__(self, w: np.ndarray, log_gauge: float = 0.0):
        self.w = np.asarray(w, dtype=float)
        self.log_gauge = float(log_gauge)

    def renormalize(self) -> None:
        top = float(self.w.max())
        if not np.isfinite(top) or top <= 0.0:
            raise Underflow("w collapsed to zero; widen the tail budget or shorten the horizon")
        self.w /= top
        self.log_gauge += math.log(top)

    def log_values(self, values: np.ndarray) -> np.ndarray:
        if np.any(values <= 0.0):
            raise Underflow("w is not positive at an evaluation point")
        return np.log(values) + self.log_gauge


def splitting_steps(duration: float, v_sup: float, spacing: float) -> int:
    """Step count with ds * ||V|| <= 0.1 and ds <= 4 * spacing^2."""
    bound = SPACING_FACTOR * spacing ** 2
    if v_sup > 0:
        bound = min(bound, POTENTIAL_STEP_BOUND / v_sup)
    return max(1, int(math.ceil(duration / bound - 1e-12)))


def evolve_schrodinger(state: GaugedState, box: BoxGrid, V_box: np.ndarray, duration: float,
                        steps: int, renormalize_every: int = 1) -> GaugedState:
    """Strang splitting potential-heat-potential for w_s = 1/2 Lap w + V w, in place."""
    if duration <= 0:
        return state
    ds = duration / steps
    half = np.exp(0.5 * ds * V_box)
    full = half * half
    heat = box.heat_multiplier(ds)
    w = state.w * half
    for n in range(steps):
        w = box.backward(box.forward(w) * heat)
        w *= full if n < steps - 1 else half
        np.maximum(w, 0.0, out=w)
        if (n + 1) % renormalize_every == 0 or n == steps - 1:
            state.w = w
            state.renormalize()
            w = state.w
    logger.debug("Strang evolution: %d steps of %.3g, gauge %.6g", steps, ds, state.log_gauge)
    return state


def constant_potential_step(state: GaugedState, box: BoxGrid, c: float, duration: float) -> GaugedState:
    """Exact solution operator exp(duration (1/2 Lap + c))."""
    state.w = box.backward(box.forward(state.w) * box.heat_multiplier(duration))
    np.maximum(state.w, 0.0, out=state.w)
    state.log_gauge += c * duration
    state.renormalize()
    return state


def potential_on_box(potential: Potential, box: BoxGrid, scale: float = 1.0) -> np.ndarray:
    if potential.is_constant:
        return np.full(box.shape, float(potential.field.values.flat[0]))
    return box.periodic_values(potential.field, scale)


def gaussian(points: Sequence[np.ndarray], center, variance: float) -> np.ndarray:
    """(2 pi variance)^{-n/2} exp(-|x - center|^2 / (2 variance)) on broadcast coordinates."""
    center = np.broadcast_to(np.asarray(center, dtype=float), (len(points),))
    r2 = sum((x - c) ** 2 for x, c in zip(points, center))
    return (2 * np.pi * variance) ** (-len(points) / 2) * np.exp(-r2 / (2 * variance))
