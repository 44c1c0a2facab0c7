"""
Model: large-time behaviour of the periodic diffusion 1/2 Lap + b.D:
       p(t, x, y) ~ m(y) (2 pi t)^{-n/2} det(Q)^{-1/2} exp(-(y - x - bbar t).Q^{-1}(y - x - bbar t) / 2t)
       with remainder O(t^{-(n+1)/2}), and for Doob drifts the sharp ballistic amplitude
       a_p(y) = e^{v_p(y) - v_p(0)} pi_p(y) (2 pi)^{-n/2} det(Q_p)^{-1/2}.
Purpose: Main term, measured remainder bands over time (single drift and a compact family of
         Doob drifts), and the amplitude tracked by the ballistic band.
Dependencies: numpy, core/bloch/effective.py, core/viscous (drift kernel), core/cell, core/torus.
Ext Hooks: Per-p scans in uniform_family_scan are independent and could go through the harness pool.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from core.bloch.effective import DriftSpec, EffectiveDiffusion, effective_diffusion
from core.cell import CellSolution, Potential, as_vector, solve_cell
from core.config import KERNEL_BUMP_WIDTH, KERNEL_POINTS_PER_UNIT, KERNEL_WINDOW_SIGMAS, WINDOW_SIGMAS
from core.errors import InvariantViolation
from core.torus import evaluate
from core.viscous import BoxGrid, drift_kernel

logger = logging.getLogger(__name__)


def _targets(y, dim: int) -> np.ndarray:
    return np.asarray(y, dtype=float).reshape(-1, dim)


def _on_torus(f, pts: np.ndarray) -> np.ndarray:
    return evaluate(f, pts if pts.shape[1] == 2 else pts[:, 0])


def gaussian_main_term(ed: EffectiveDiffusion, t: float, x, y):
    """Main term at target(s) y; a float for one target, an array for (M, n) targets."""
    if t < 1:
        raise InvariantViolation(f"The Gaussian main term is a large-time statement; need t >= 1, got {t}")
    dim = ed.dim
    x = as_vector(x, dim)
    pts = _targets(y, dim)
    d = pts - x - ed.b_bar * t
    Qinv = np.linalg.inv(ed.Q)
    quad = np.einsum('mi,ij,mj->m', d, Qinv, d)
    scale = (2 * math.pi * t) ** (-dim / 2) / math.sqrt(np.linalg.det(ed.Q))
    values = _on_torus(ed.m, pts) * scale * np.exp(-quad / (2 * t))
    return float(values[0]) if pts.shape[0] == 1 else values


@dataclass(frozen=True)
class RemainderScan:
    times: np.ndarray
    series: np.ndarray
    half_widths: np.ndarray

    @property
    def band(self) -> float:
        return float(self.series.max())

    @property
    def ratio(self) -> float:
        low = float(self.series.min())
        return float(self.series.max() / low) if low > 0 else math.inf


def remainder_scan(b: DriftSpec, ed: EffectiveDiffusion, t_list: Sequence[float], N: Optional[int] = None,
                   delta: float = KERNEL_BUMP_WIDTH,
                   points_per_unit: int = KERNEL_POINTS_PER_UNIT) -> RemainderScan:
    """sup_y |p(t, 0, y) - main(t, 0, y)| t^{(n+1)/2} over the window |y - bbar t| <= 6 sqrt(t max eig Q)."""
    times = np.asarray(sorted(t_list), dtype=float)
    if times.min() < 2 or times.max() > 40:
        raise InvariantViolation("Remainder scan times must lie in [2, 40]")
    drift = b.on_grid(N or ed.m.grid.points)
    dim = drift.dim
    x = np.zeros(dim)
    series, widths = [], []
    for t in times:
        center = x + ed.b_bar * t
        half = WINDOW_SIGMAS * math.sqrt(t * ed.max_eigenvalue)
        box = BoxGrid.around(dim, center, max(half, KERNEL_WINDOW_SIGMAS * math.sqrt(t)), points_per_unit)
        kernel = drift_kernel(drift.b, t, x, box, delta)
        nodes = np.stack([c.ravel() for c in box.coordinates()], axis=1)
        inside = np.all(np.abs(nodes - center) <= half, axis=1)
        main = gaussian_main_term(ed, t, x, nodes[inside])
        gap = float(np.abs(kernel.profile.ravel()[inside] - main).max())
        series.append(gap * t ** ((dim + 1) / 2))
        widths.append(half)
        logger.info("Remainder t=%g: sup gap %.3e over %d nodes, scaled %.4g", t, gap, int(inside.sum()),
                    series[-1])
    return RemainderScan(times, np.array(series), np.array(widths))


def sharp_ballistic_amplitude(cell: CellSolution, ed: EffectiveDiffusion, y):
    """a_p(y); a float for one target, an array for (M, n) targets."""
    ed.drift.check_against(cell)
    dim = cell.dim
    pts = _targets(y, dim)
    v0 = float(_on_torus(cell.v, np.zeros((1, dim)))[0])
    scale = (2 * math.pi) ** (-dim / 2) / math.sqrt(np.linalg.det(ed.Q))
    values = np.exp(_on_torus(cell.v, pts) - v0) * _on_torus(cell.pi, pts) * scale
    return float(values[0]) if pts.shape[0] == 1 else values


@dataclass(frozen=True)
class UniformFamilyScan:
    p_list: np.ndarray
    times: np.ndarray
    series: np.ndarray
    bands: np.ndarray

    @property
    def spread(self) -> float:
        """Largest over smallest band constant; within 2 reads as uniform over the family."""
        low = float(self.bands.min())
        return float(self.bands.max() / low) if low > 0 else math.inf


def uniform_family_scan(V: Potential, p_list: Sequence, t_list: Sequence[float], N: Optional[int] = None,
                        points_per_unit: int = KERNEL_POINTS_PER_UNIT) -> UniformFamilyScan:
    """Remainder scans of the Doob drifts b_p for every p on a compact grid."""
    rows = []
    ps = []
    for p in p_list:
        cell = solve_cell(V, p, N)
        drift = DriftSpec.from_cell(cell)
        ed = effective_diffusion(drift, cell.resolution)
        rows.append(remainder_scan(drift, ed, t_list, points_per_unit=points_per_unit).series)
        ps.append(as_vector(p, V.dim))
    series = np.array(rows)
    scan = UniformFamilyScan(np.array(ps), np.asarray(sorted(t_list), dtype=float), series, series.max(axis=1))
    logger.info("Uniform family over %d momenta: bands %s, spread %.3g", len(ps), scan.bands, scan.spread)
    return scan
