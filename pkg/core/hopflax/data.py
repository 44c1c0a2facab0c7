"""
Model: Lipschitz initial data g on R^n.
Purpose: LipschitzData value object and the fixed, versioned builtin catalog (capped norm,
         constants, capped affine, Huber, smooth semiconcave) plus tabulated 1D data files.
Dependencies: numpy, utils/rng.py.
Ext Hooks: Register new builtins in load_data and bump CATALOG_VERSION.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from core.errors import ConfigError, InvariantViolation, IoFailure
from utils.rng import stream

logger = logging.getLogger(__name__)

# Acceptance numbers are tied to this catalog; bump on any change to a builtin.
CATALOG_VERSION = "1"

CAP = 10.0


@dataclass(frozen=True)
class LipschitzData:
    evaluator: Callable[[np.ndarray], np.ndarray]
    lipschitz_bound: float
    dim: int = 1
    semiconcave: bool = False
    semiconcavity_constant: Optional[float] = None
    name: str = "custom"

    def points(self, y) -> np.ndarray:
        """Normalize to an (M, dim) array."""
        return np.asarray(y, dtype=float).reshape(-1, self.dim)

    def __call__(self, y) -> np.ndarray:
        return np.asarray(self.evaluator(self.points(y)), dtype=float).reshape(-1)

    def at(self, y) -> float:
        return float(self(y)[0])

    def rescaled(self, x0, t0: float) -> 'LipschitzData':
        """y -> g(x0 + t0 y) / t0, the data seen by the unit-scale problem."""
        x0 = np.asarray(x0, dtype=float).reshape(1, self.dim)
        return LipschitzData(lambda y: self.evaluator(x0 + t0 * y) / t0, self.lipschitz_bound, self.dim,
                             self.semiconcave,
                             None if self.semiconcavity_constant is None else self.semiconcavity_constant * t0,
                             f"{self.name}@rescaled")

    def check_lipschitz(self, center=None, radius: float = 20.0, samples: int = 512, seed: int = 0) -> float:
        """Largest sampled difference quotient; raises if it beats the declared bound by 1%."""
        rng = stream(seed)
        c = np.zeros(self.dim) if center is None else np.asarray(center, dtype=float).reshape(self.dim)
        a = c + rng.uniform(-radius, radius, size=(samples, self.dim))
        b = a + rng.normal(scale=0.05, size=(samples, self.dim))
        dist = np.linalg.norm(a - b, axis=1)
        keep = dist > 1e-12
        quotients = np.abs(self(a) - self(b))[keep] / dist[keep]
        worst = float(quotients.max()) if quotients.size else 0.0
        if worst > self.lipschitz_bound * 1.01:
            raise InvariantViolation(
                f"Data {self.name}: difference quotient {worst:.4g} exceeds bound {self.lipschitz_bound:.4g}")
        return worst


def capped_norm(dim: int = 1) -> LipschitzData:
    """min{|x|, 10}; Lipschitz but not semiconcave at 0."""
    return LipschitzData(lambda y: np.minimum(np.linalg.norm(y, axis=1), CAP), 1.0, dim, False, None,
                         "capped-norm")


def constant_data(c: float, dim: int = 1) -> LipschitzData:
    return LipschitzData(lambda y: np.full(y.shape[0], float(c)), 0.0, dim, True, 0.0, f"constant:{c}")


def affine_data(a, dim: int = 1) -> LipschitzData:
    """a.x clipped to [-10, 10]."""
    a = np.asarray(a, dtype=float).reshape(dim)
    label = ",".join(f"{v:g}" for v in a)
    return LipschitzData(lambda y: np.clip(y @ a, -CAP, CAP), float(np.linalg.norm(a)), dim, False, None,
                         f"affine:{label}")


def huber_data(c: float = CAP, dim: int = 1) -> LipschitzData:
    """1/2|x|^2 inside |x| <= c, continued linearly: C^1, Lipschitz c, D^2 g <= I."""
    def g(y):
        r = np.linalg.norm(y, axis=1)
        return np.where(r <= c, 0.5 * r ** 2, c * r - 0.5 * c ** 2)
    return LipschitzData(g, float(c), dim, True, 1.0, f"huber:{c:g}")


def smooth_data(dim: int = 1) -> LipschitzData:
    """sqrt(1 + |x|^2) - 1: C^2, Lipschitz 1, even, semiconcave with D^2 g <= I."""
    return LipschitzData(lambda y: np.sqrt(1.0 + np.sum(y ** 2, axis=1)) - 1.0, 1.0, dim, True, 1.0,
                         "smooth")


def tabulated_data(path: str) -> LipschitzData:
    """1D data from a two-column CSV (x, g), linear in between, constant outside the table."""
    try:
        table = np.loadtxt(path, delimiter=',', ndmin=2)
    except (OSError, ValueError) as e:
        raise IoFailure(f"Cannot read data file {path}: {e}") from e
    if table.shape[1] != 2 or table.shape[0] < 2:
        raise ConfigError(f"Data file {path} needs two columns (x, g) and at least two rows")
    order = np.argsort(table[:, 0])
    xs, gs = table[order, 0], table[order, 1]
    bound = float(np.max(np.abs(np.diff(gs) / np.diff(xs))))
    logger.info("Loaded tabulated data %s (%d rows, Lipschitz %.4g)", path, xs.size, bound)
    return LipschitzData(lambda y: np.interp(y[:, 0], xs, gs), bound, 1, False, None, path)


def load_data(spec: str, dim: int = 1) -> LipschitzData:
    """Resolve a builtin name ('capped-norm', 'smooth', 'constant:c', 'affine:a[,b]', 'huber:c')
    or a CSV path."""
    if spec == 'capped-norm':
        return capped_norm(dim)
    if spec == 'smooth':
        return smooth_data(dim)
    if spec.startswith('constant:'):
        return constant_data(float(spec.split(':', 1)[1]), dim)
    if spec.startswith('affine:'):
        coeffs = [float(v) for v in spec.split(':', 1)[1].split(',')]
        if len(coeffs) != dim:
            raise ConfigError(f"affine data needs {dim} coefficients, got {spec}")
        return affine_data(coeffs, dim)
    if spec.startswith('huber'):
        return huber_data(float(spec.split(':', 1)[1]) if ':' in spec else CAP, dim)
    if dim != 1:
        raise ConfigError(f"Unknown builtin data '{spec}' (files are 1D only)")
    return tabulated_data(spec)
