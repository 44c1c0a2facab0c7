"""
Model: N/A (API types).
Purpose: Typed request bodies for the JSON API, parsed and checked from raw dicts.
Dependencies: server/validation.py, core/config.py.
Ext Hooks: One dataclass per route; from_json is the only place a raw body is read.
"""

from dataclasses import dataclass
from typing import List, Optional

from core.config import BLOCH_DEFAULT_POINTS, CELL_DEFAULT_POINTS
from server import validation


@dataclass(frozen=True)
class ModelRequest:
    potential: str
    dim: int
    n: int

    @staticmethod
    def _fields(data: dict, default_n: int = CELL_DEFAULT_POINTS) -> dict:
        dim = validation.dimension(data.get('dim', 1))
        return {
            'potential': validation.catalog(data.get('potential', 'cosine'), 'potential', validation.POTENTIALS),
            'dim': dim,
            'n': validation.resolution(data.get('n', validation.default_points(default_n, dim)), dim),
        }


@dataclass(frozen=True)
class CellRequest(ModelRequest):
    p: List[float]

    @classmethod
    def from_json(cls, data) -> 'CellRequest':
        validation.require(data, ['p'])
        base = cls._fields(data)
        return cls(p=validation.vector(data['p'], base['dim'], 'p'), **base)


@dataclass(frozen=True)
class LagrangianRequest(ModelRequest):
    q: List[float]

    @classmethod
    def from_json(cls, data) -> 'LagrangianRequest':
        validation.require(data, ['q'])
        base = cls._fields(data)
        return cls(q=validation.vector(data['q'], base['dim'], 'q'), **base)


@dataclass(frozen=True)
class HopfLaxRequest(ModelRequest):
    data: str
    x: List[float]
    t: float

    @classmethod
    def from_json(cls, data) -> 'HopfLaxRequest':
        validation.require(data, ['x', 't'])
        base = cls._fields(data)
        return cls(data=validation.catalog(data.get('data', 'capped-norm'), 'data', validation.DATA),
                   x=validation.vector(data['x'], base['dim'], 'x'),
                   t=validation.positive(data['t'], 't'), **base)


@dataclass(frozen=True)
class BlochRequest:
    drift: str
    dim: int
    n: int
    potential: Optional[str] = None

    @classmethod
    def from_json(cls, data) -> 'BlochRequest':
        validation.require(data, ['drift'])
        dim = validation.dimension(data.get('dim', 1))
        potential = data.get('potential')
        return cls(drift=validation.catalog(data['drift'], 'drift', validation.DRIFTS),
                   dim=dim,
                   n=validation.resolution(data.get('n', validation.default_points(BLOCH_DEFAULT_POINTS, dim)), dim),
                   potential=None if potential is None else
                   validation.catalog(potential, 'potential', validation.POTENTIALS))
