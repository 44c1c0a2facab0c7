"""
Model: the unit torus T^n = R^n / Z^n, n in {1, 2}, sampled on a uniform grid.
Purpose: Periodic scalar/vector fields with spectral differentiation, averaging and
         trigonometric interpolation. Every other solver works on these values.
Dependencies: numpy (FFT), core/config.py, core/errors.py.
Ext Hooks: A cache of transforms would slot in behind _spectrum() without changing results.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Sequence, Tuple

import numpy as np

from core.config import EVAL_CHUNK, TORUS_MIN_POINTS
from core.errors import InvariantViolation

logger = logging.getLogger(__name__)


def is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class TorusGrid:
    """Uniform grid with nodes at k/N, k in {0..N-1}^dim."""
    dim: int
    points: int

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise InvariantViolation(f"Torus dimension must be 1 or 2, got {self.dim}")
        if self.points < TORUS_MIN_POINTS or not is_power_of_two(self.points):
            raise InvariantViolation(
                f"Points per axis must be a power of two >= {TORUS_MIN_POINTS}, got {self.points}")

    @property
    def spacing(self) -> float:
        return 1.0 / self.points

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.points,) * self.dim

    @property
    def size(self) -> int:
        return self.points ** self.dim

    def axis(self) -> np.ndarray:
        return np.arange(self.points) / self.points

    def coordinates(self) -> Tuple[np.ndarray, ...]:
        """Node coordinates as broadcast-ready arrays (indexing='ij')."""
        ax = self.axis()
        return tuple(np.meshgrid(*([ax] * self.dim), indexing='ij'))

    def frequencies(self) -> np.ndarray:
        """Integer Fourier frequencies in FFT order."""
        return np.fft.fftfreq(self.points, d=1.0 / self.points)

    def wavenumbers(self, nyquist_zero: bool) -> Tuple[np.ndarray, ...]:
        """2*pi*frequency per axis, shaped to broadcast against a spectrum."""
        k = 2.0 * np.pi * self.frequencies()
        if nyquist_zero:
            k = k.copy()
            k[self.points // 2] = 0.0
        if self.dim == 1:
            return (k,)
        return (k[:, None], k[None, :])


@dataclass(frozen=True)
class ScalarField:
    grid: TorusGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.size != self.grid.size:
            raise InvariantViolation(
                f"Field has {values.size} values, grid needs {self.grid.size}")
        values = values.reshape(self.grid.shape)
        if not np.all(np.isfinite(values)):
            raise InvariantViolation("Field values must be finite")
        values.flags.writeable = False
        object.__setattr__(self, 'values', values)

    @classmethod
    def from_function(cls, grid: TorusGrid, fn: Callable[..., np.ndarray]) -> 'ScalarField':
        """Sample fn(x) or fn(x, y) at the grid nodes."""
        coords = grid.coordinates()
        return cls(grid, np.broadcast_to(fn(*coords), grid.shape))

    @classmethod
    def constant(cls, grid: TorusGrid, c: float) -> 'ScalarField':
        return cls(grid, np.full(grid.shape, float(c)))

    def with_values(self, values: np.ndarray) -> 'ScalarField':
        return ScalarField(self.grid, values)

    def flat(self) -> np.ndarray:
        return self.values.ravel()

    def max(self) -> float:
        return float(self.values.max())

    def min(self) -> float:
        return float(self.values.min())


@dataclass(frozen=True)
class VectorField:
    grid: TorusGrid
    components: Tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.components) != self.grid.dim:
            raise InvariantViolation(
                f"Vector field needs {self.grid.dim} components, got {len(self.components)}")
        comps = tuple(ScalarField(self.grid, c).values for c in self.components)
        object.__setattr__(self, 'components', comps)

    def component(self, j: int) -> ScalarField:
        return ScalarField(self.grid, self.components[j])

    def norm(self) -> np.ndarray:
        return np.sqrt(sum(c ** 2 for c in self.components))

    def shifted(self, offset: Sequence[float]) -> 'VectorField':
        """Componentwise c_j + offset_j."""
        return VectorField(self.grid, tuple(c + o for c, o in zip(self.components, offset)))

    def scaled(self, factor: float) -> 'VectorField':
        return VectorField(self.grid, tuple(factor * c for c in self.components))


def _spectrum(values: np.ndarray) -> np.ndarray:
    return np.fft.fftn(values)


def _physical(spectrum: np.ndarray) -> np.ndarray:
    return np.fft.ifftn(spectrum).real


def gradient(f: ScalarField) -> VectorField:
    """Exact derivative of the trigonometric interpolant; Nyquist derivative set to zero."""
    fhat = _spectrum(f.values)
    ks = f.grid.wavenumbers(nyquist_zero=True)
    return VectorField(f.grid, tuple(_physical(1j * k * fhat) for k in ks))


def laplacian(f: ScalarField) -> ScalarField:
    fhat = _spectrum(f.values)
    ks = f.grid.wavenumbers(nyquist_zero=False)
    symbol = -sum(k ** 2 for k in ks)
    return f.with_values(_physical(symbol * fhat))


def divergence(F: VectorField) -> ScalarField:
    ks = F.grid.wavenumbers(nyquist_zero=True)
    total = sum(1j * k * _spectrum(c) for k, c in zip(ks, F.components))
    return ScalarField(F.grid, _physical(total))


def mean(f: ScalarField) -> float:
    # unit cell volume
    return float(f.values.mean())


def fourier_coefficients(f: ScalarField) -> np.ndarray:
    """c_k with f(x) = sum_k c_k exp(2 pi i k.x) at the nodes."""
    return _spectrum(f.values) / f.grid.size


def evaluate(f: ScalarField, points: np.ndarray) -> np.ndarray:
    """Trigonometric interpolant at many points; shape (P,) in 1D, (P, 2) in 2D.

    Points are reduced mod 1. Points that sit on a node return the stored value.
    """
    grid = f.grid
    pts = np.mod(np.asarray(points, dtype=float), 1.0)
    if grid.dim == 1:
        pts = pts.reshape(-1)
    else:
        pts = pts.reshape(-1, 2)
    out = np.empty(pts.shape[0])

    # exact node hits
    scaled = pts * grid.points
    nearest = np.rint(scaled)
    on_node = np.abs(scaled - nearest) < 1e-12
    if grid.dim == 2:
        on_node = on_node.all(axis=1)
    idx = nearest.astype(int) % grid.points
    if grid.dim == 1:
        out[on_node] = f.values[idx[on_node]]
    else:
        out[on_node] = f.values[idx[on_node, 0], idx[on_node, 1]]

    rest = np.flatnonzero(~on_node)
    if rest.size:
        coeffs = fourier_coefficients(f)
        m = grid.frequencies()
        for start in range(0, rest.size, EVAL_CHUNK):
            sel = rest[start:start + EVAL_CHUNK]
            if grid.dim == 1:
                E = np.exp(2j * np.pi * np.outer(pts[sel], m))
                out[sel] = (E @ coeffs).real
            else:
                E0 = np.exp(2j * np.pi * np.outer(pts[sel, 0], m))
                E1 = np.exp(2j * np.pi * np.outer(pts[sel, 1], m))
                out[sel] = np.sum((E0 @ coeffs) * E1, axis=1).real
    return out


def interpolate(f: ScalarField, x) -> float:
    """Value of the trigonometric interpolant at one point of the fundamental cell."""
    point = np.atleast_1d(np.asarray(x, dtype=float))
    if point.size != f.grid.dim:
        raise InvariantViolation(f"Point {x} does not match dimension {f.grid.dim}")
    return float(evaluate(f, point.reshape(1, -1) if f.grid.dim == 2 else point)[0])


def evaluate_tensor(f: ScalarField, axes: Sequence[np.ndarray]) -> np.ndarray:
    """Interpolant on the tensor grid axes[0] x axes[1] (x axes[0] alone in 1D)."""
    if len(axes) != f.grid.dim:
        raise InvariantViolation("One coordinate axis per dimension is required")
    coeffs = fourier_coefficients(f)
    m = f.grid.frequencies()
    mats = []
    for ax in axes:
        ax = np.mod(np.asarray(ax, dtype=float), 1.0)
        mats.append(np.exp(2j * np.pi * np.outer(ax, m)))
    if f.grid.dim == 1:
        return (mats[0] @ coeffs).real
    return (mats[0] @ coeffs @ mats[1].T).real


def upsample(f: ScalarField, factor: int) -> ScalarField:
    """The same trigonometric interpolant sampled on a grid `factor` times finer."""
    fine = TorusGrid(f.grid.dim, f.grid.points * factor)
    return ScalarField(fine, evaluate_tensor(f, [fine.axis()] * f.grid.dim))


def periodic_sampler(f: ScalarField, factor: int = 16) -> Callable[[np.ndarray], np.ndarray]:
    """Fast approximate evaluator: linear interpolation on an upsampled copy.

    Accuracy is O((h/factor)^2 |f''|); meant for Monte Carlo paths, not for solvers.
    """
    from scipy.interpolate import RegularGridInterpolator

    fine = upsample(f, factor)
    n = fine.grid.points
    ax = np.arange(n + 1) / n
    padded = np.pad(fine.values, [(0, 1)] * f.grid.dim, mode='wrap')
    interp = RegularGridInterpolator([ax] * f.grid.dim, padded, method='linear')

    def sample(points: np.ndarray) -> np.ndarray:
        pts = np.mod(np.asarray(points, dtype=float), 1.0)
        if f.grid.dim == 1:
            return np.interp(pts, ax, padded)
        shape = pts.shape[:-1]
        return interp(pts.reshape(-1, 2)).reshape(shape)

    return sample
