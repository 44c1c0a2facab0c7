"""
Model: the periodic potential V on the torus.
Purpose: Potential value object plus the builtin catalog (zero, cosine, random trig) and
         file loading, so every caller names potentials the same way.
Dependencies: numpy, core/torus, utils/rng.py.
Ext Hooks: New builtins register in load_potential.
"""

import logging
from dataclasses import dataclass

import numpy as np

from core.errors import InvariantViolation
from core.torus import ScalarField, TorusGrid, evaluate_tensor, gradient, read_field
from utils.rng import stream

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Potential:
    field: ScalarField
    lipschitz_bound: float
    name: str = "custom"

    def __post_init__(self):
        if self.lipschitz_bound < 0:
            raise InvariantViolation("lipschitz_bound must be nonnegative")
        measured = float(gradient(self.field).norm().max())
        if self.lipschitz_bound * 1.01 < measured:
            raise InvariantViolation(
                f"lipschitz_bound {self.lipschitz_bound} below measured |DV| {measured}")

    @classmethod
    def from_field(cls, field: ScalarField, name: str = "custom") -> 'Potential':
        bound = float(gradient(field).norm().max())
        return cls(field, bound, name)

    @property
    def dim(self) -> int:
        return self.field.grid.dim

    @property
    def points(self) -> int:
        return self.field.grid.points

    @property
    def vmax(self) -> float:
        return self.field.max()

    @property
    def vmin(self) -> float:
        return self.field.min()

    @property
    def sup_norm(self) -> float:
        return float(np.abs(self.field.values).max())

    @property
    def oscillation(self) -> float:
        return self.vmax - self.vmin

    @property
    def is_constant(self) -> bool:
        return self.oscillation <= 1e-14 * max(1.0, self.sup_norm)

    def resampled(self, points: int) -> 'Potential':
        """Same trigonometric interpolant on another grid size."""
        if points == self.points:
            return self
        grid = TorusGrid(self.dim, points)
        values = evaluate_tensor(self.field, [grid.axis()] * self.dim)
        return Potential(ScalarField(grid, values), self.lipschitz_bound, self.name)

    def evaluate_box(self, axes) -> np.ndarray:
        """V on a tensor grid of arbitrary real coordinates (periodic extension)."""
        if self.is_constant:
            shape = tuple(len(a) for a in axes)
            return np.full(shape, self.field.values.flat[0])
        return evaluate_tensor(self.field, axes)


def zero_potential(dim: int = 1, points: int = 128) -> Potential:
    return Potential(ScalarField.constant(TorusGrid(dim, points), 0.0), 0.0, "zero")


def constant_potential(c: float, dim: int = 1, points: int = 128) -> Potential:
    return Potential(ScalarField.constant(TorusGrid(dim, points), c), 0.0, f"constant:{c}")


def cosine_potential(dim: int = 1, points: int = 128, amplitude: float = 1.0) -> Potential:
    """V(x) = amplitude * sum_i cos(2 pi x_i)."""
    grid = TorusGrid(dim, points)
    field = ScalarField.from_function(
        grid, lambda *xs: amplitude * sum(np.cos(2 * np.pi * x) for x in xs))
    return Potential(field, 2 * np.pi * abs(amplitude) * np.sqrt(dim), "cosine")


def random_trig_potential(seed: int, dim: int = 1, points: int = 128, harmonics: int = 3) -> Potential:
    """Sum of `harmonics` random cosines with wave vectors in {-3..3}^dim \\ {0}."""
    rng = stream(seed)
    grid = TorusGrid(dim, points)
    terms = []
    for _ in range(harmonics):
        k = np.zeros(dim, dtype=int)
        while not k.any():
            k = rng.integers(-3, 4, size=dim)
        terms.append((rng.uniform(0.2, 1.0), k, rng.uniform(0.0, 2 * np.pi)))

    def fn(*xs):
        total = 0.0
        for amp, k, phase in terms:
            total = total + amp * np.cos(2 * np.pi * sum(kj * x for kj, x in zip(k, xs)) + phase)
        return total

    field = ScalarField.from_function(grid, fn)
    bound = sum(amp * 2 * np.pi * np.linalg.norm(k) for amp, k, _ in terms)
    return Potential(field, float(bound), f"random-trig:{seed}")


def load_potential(spec: str, dim: int = 1, points: int = 128) -> Potential:
    """Resolve 'zero', 'cosine', 'constant:<c>', 'random-trig:<seed>' or a field file stem."""
    if spec == 'zero':
        return zero_potential(dim, points)
    if spec == 'cosine':
        return cosine_potential(dim, points)
    if spec.startswith('constant:'):
        return constant_potential(float(spec.split(':', 1)[1]), dim, points)
    if spec.startswith('random-trig'):
        seed = int(spec.split(':', 1)[1]) if ':' in spec else 0
        return random_trig_potential(seed, dim, points)
    field = read_field(spec)
    logger.info("Loaded potential %s (dim=%d, N=%d)", spec, field.grid.dim, field.grid.points)
    return Potential.from_field(field, name=spec).resampled(points)
