"""
Model: Schrodinger kernel K(t, x, .) of d_t - (1/2 Lap + V) and the Doob-transformed density
       p~_p(t, x, .) of d_t - (1/2 Lap + b_p.D), b_p = -p - Dv_p, on R^n.
Purpose: Kernels from a Gaussian bump of width delta, read as the short-time kernel at time
         delta^2 and evolved for t - delta^2, with one Richardson step in delta; the ballistic
         band t^{n/2} e^{t Lbar(q)} K(t, 0, -qt) along rays.
Dependencies: numpy, core/viscous/box.py, core/cell, core/legendre, core/torus.
Ext Hooks: Richardson with three widths for a second extrapolation order.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from core.cell import CellSolution, Potential, grad_hbar
from core.config import KERNEL_BUMP_WIDTH, KERNEL_POINTS_PER_UNIT, KERNEL_WINDOW_SIGMAS, SPACING_FACTOR
from core.errors import InvariantViolation, ResolutionRefused
from core.legendre import HamiltonianModel, legendre
from core.torus import VectorField, evaluate
from core.viscous.box import (BoxGrid, GaugedState, constant_potential_step, evolve_schrodinger, gaussian,
                              potential_on_box, splitting_steps)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class KernelEstimate:
    t: float
    x: np.ndarray
    box: BoxGrid
    profile: np.ndarray
    bump_width: float
    richardson_order: int
    kind: str = "schrodinger"

    def at(self, y) -> np.ndarray:
        """Kernel values at arbitrary targets inside the box."""
        return np.maximum(self.box.interpolate(self.profile, y), 0.0)

    def mass(self) -> float:
        return float(self.profile.sum() * self.box.cell_volume)

    def metadata(self) -> dict:
        return {
            'kind': self.kind,
            't': self.t,
            'x': [float(v) for v in self.x],
            'delta': self.bump_width,
            'richardson_order': self.richardson_order,
            'lower': list(self.box.lower),
            'length': self.box.length,
            'points': self.box.points,
        }


def _point(x, dim: int) -> np.ndarray:
    point = np.atleast_1d(np.asarray(x, dtype=float)).reshape(-1)
    if point.size != dim:
        raise InvariantViolation(f"Point {x} does not match dimension {dim}")
    return point


def _check_width(t: float, delta: float, box: BoxGrid) -> None:
    if delta <= 0 or delta > 4 * box.spacing:
        raise ResolutionRefused(f"Bump width {delta} must lie in (0, 4 * spacing = {4 * box.spacing:.4g}]")
    if t <= delta ** 2:
        raise InvariantViolation(f"Kernel time {t} must exceed delta^2 = {delta ** 2:.3g}")
    if t < 0.5:
        logger.warning("Kernel at t=%g < 0.5 is outside the validated range", t)


def _richardson(coarse: np.ndarray, fine: np.ndarray) -> np.ndarray:
    # leading bias is O(delta^2); negative tails from the combination are clipped
    return np.maximum((4.0 * fine - coarse) / 3.0, 0.0)


def schrodinger_kernel(V: Potential, t: float, x, target_grid: Optional[BoxGrid] = None,
                        delta: float = KERNEL_BUMP_WIDTH,
                        points_per_unit: int = KERNEL_POINTS_PER_UNIT) -> KernelEstimate:
    x = _point(x, V.dim)
    box = target_grid or BoxGrid.around(V.dim, x, KERNEL_WINDOW_SIGMAS * math.sqrt(t), points_per_unit)
    _check_width(t, delta, box)
    coords = box.coordinates()
    V_box = None if V.is_constant else potential_on_box(V, box)

    def run(width: float) -> np.ndarray:
        state = GaugedState(gaussian(coords, x, width ** 2))
        state.renormalize()
        duration = t - width ** 2
        if V_box is None:
            constant_potential_step(state, box, V.vmax, duration)
        else:
            steps = splitting_steps(duration, V.sup_norm, box.spacing)
            evolve_schrodinger(state, box, V_box, duration, steps)
        return state.w * math.exp(state.log_gauge)

    profile = _richardson(run(delta), run(delta / 2))
    logger.info("Schrodinger kernel t=%g x=%s: box %d^%d, mass %.6g", t, x, box.points, box.dim,
                profile.sum() * box.cell_volume)
    return KernelEstimate(float(t), x, box, profile, delta, 1, "schrodinger")


def _drift_at(b: VectorField, x: np.ndarray) -> np.ndarray:
    point = np.mod(x, 1.0)
    point = point.reshape(1, -1) if b.grid.dim == 2 else point
    return np.array([float(evaluate(b.component(j), point)[0]) for j in range(b.grid.dim)])


def evolve_fokker_planck(rho: np.ndarray, box: BoxGrid, drift: Sequence[np.ndarray], duration: float,
                         steps: int) -> np.ndarray:
    """rho_s = 1/2 Lap rho - div(b rho) by the Lawson (integrating-factor) RK4 scheme."""
    if duration <= 0:
        return rho
    h = duration / steps
    half = box.heat_multiplier(0.5 * h)
    full = half * half
    ks = box.derivative_wavenumbers()

    def E(v, multiplier=half):
        return box.backward(box.forward(v) * multiplier)

    def N(v):
        total = sum(1j * k * box.forward(b * v) for k, b in zip(ks, drift))
        return -box.backward(total)

    u = rho
    for _ in range(steps):
        k1 = N(u)
        Eu = E(u)
        k2 = N(E(u + 0.5 * h * k1))
        k3 = N(Eu + 0.5 * h * k2)
        E2u = E(u, full)
        k4 = N(E2u + h * E(k3))
        u = E2u + (h / 6.0) * (E(k1, full) + 2.0 * E(k2 + k3) + k4)
    return u


def drift_kernel(b: VectorField, t: float, x, box: BoxGrid, delta: float = KERNEL_BUMP_WIDTH,
                 kind: str = "drift") -> KernelEstimate:
    """Transition density p(t, x, .) of 1/2 Lap + b.D for a periodic drift b, on a given box."""
    x = _point(x, b.grid.dim)
    _check_width(t, delta, box)
    coords = box.coordinates()
    drift = [box.periodic_values(b.component(j)) for j in range(b.grid.dim)]
    b_x = _drift_at(b, x)
    b_sup = max(float(np.abs(c).max()) for c in drift)

    def run(width: float) -> np.ndarray:
        rho = gaussian(coords, x + b_x * width ** 2, width ** 2)
        duration = t - width ** 2
        # advective stability of explicit RK4 at the Nyquist wavenumber
        h = SPACING_FACTOR * box.spacing ** 2
        if b_sup > 0:
            h = min(h, 2.5 * box.spacing / (np.pi * b_sup))
        steps = max(1, int(math.ceil(duration / h)))
        return evolve_fokker_planck(rho, box, drift, duration, steps)

    profile = _richardson(run(delta), run(delta / 2))
    logger.info("%s kernel t=%g x=%s: box %d^%d, mass %.9f", kind.capitalize(), t, x, box.points, box.dim,
                profile.sum() * box.cell_volume)
    return KernelEstimate(float(t), x, box, profile, delta, 1, kind)


def doob_kernel(cell: CellSolution, t: float, x, target_grid: Optional[BoxGrid] = None,
                delta: float = KERNEL_BUMP_WIDTH,
                points_per_unit: int = KERNEL_POINTS_PER_UNIT) -> KernelEstimate:
    """p~_p(t, x, .) for the drift b_p of a cell solution; the default box follows x + bbar t."""
    x = _point(x, cell.dim)
    if target_grid is None:
        b_bar = -grad_hbar(cell)
        target_grid = BoxGrid.around(cell.dim, x + b_bar * t, KERNEL_WINDOW_SIGMAS * math.sqrt(t),
                                     points_per_unit)
    return drift_kernel(cell.drift(), t, x, target_grid, delta, "doob")


@dataclass(frozen=True)
class BallisticBand:
    q: np.ndarray
    times: np.ndarray
    series: np.ndarray
    method: str

    @property
    def ratio(self) -> float:
        return float(self.series.max() / self.series.min())


def ballistic_band(V: Potential, model: HamiltonianModel, q, t_list: Sequence[float], method: str = "doob",
                   delta: float = KERNEL_BUMP_WIDTH,
                   points_per_unit: int = KERNEL_POINTS_PER_UNIT) -> BallisticBand:
    """t^{n/2} e^{t Lbar(q)} K(t, 0, -qt) for t in t_list.

    method="doob" reads K off the transformed density at p = p(q), whose bulk travels with the
    ray; method="schrodinger" evaluates K directly.
    """
    q = _point(q, V.dim)
    times = np.asarray(sorted(t_list), dtype=float)
    if times.min() < 1 or times.max() > 50:
        raise InvariantViolation("Ballistic times must lie in [1, 50]")
    value = legendre(model, q)
    origin = np.zeros(V.dim)
    series = []
    if method == "doob":
        cell = model.cell(value.p_of_q)
        for t in times:
            y = -q * t
            density = doob_kernel(cell, t, origin, delta=delta, points_per_unit=points_per_unit)
            v_y = float(evaluate(cell.v, np.mod(y, 1.0).reshape(1, -1) if V.dim == 2 else np.mod(y, 1.0))[0])
            # e^{t Lbar} e^{t Hbar(p)} h_p(0) / h_p(y) collapses to e^{v_p(y) - v_p(0)}
            series.append(t ** (V.dim / 2) * math.exp(v_y) * float(density.at(y)[0]))
    elif method == "schrodinger":
        for t in times:
            y = -q * t
            half_width = 0.5 * float(np.abs(q).max()) * t + KERNEL_WINDOW_SIGMAS * math.sqrt(t)
            box = BoxGrid.around(V.dim, 0.5 * y, half_width, points_per_unit)
            kernel = schrodinger_kernel(V, t, origin, box, delta, points_per_unit)
            series.append(t ** (V.dim / 2) * math.exp(t * value.lbar) * float(kernel.at(y)[0]))
    else:
        raise InvariantViolation(f"Unknown ballistic method '{method}'")
    return BallisticBand(q, times, np.array(series), method)


def doob_reconstruct(cell: CellSolution, density: KernelEstimate, y) -> np.ndarray:
    """K(t, x, y) = e^{t Hbar(p)} h_p(x) / h_p(y) p~_p(t, x, y), h_p(z) = exp(-p.z - v_p(z))."""
    pts = np.asarray(y, dtype=float).reshape(-1, cell.dim)
    x = density.x.reshape(1, -1)

    def log_h(z):
        v = evaluate(cell.v, np.mod(z, 1.0) if cell.dim == 2 else np.mod(z[:, 0], 1.0))
        return -(z @ cell.p) - v

    return np.exp(density.t * cell.hbar + log_h(x)[0] - log_h(pts)) * density.at(pts)
