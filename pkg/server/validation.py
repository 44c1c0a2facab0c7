"""
Model: N/A (request checks).
Purpose: Shape and type checks on JSON request bodies before any solver sees them. Resolutions
         are capped at the dense-solver sizes; potentials, data and drifts are builtins or bare
         file names under the server data directory.
Dependencies: core/errors.py, core/config.py, core/torus.
Ext Hooks: Add per-field range checks here; numerical preconditions stay with the solvers.
"""

import os
from typing import List, Sequence

from core.config import SERVER_DATA_DIR, SERVER_MAX_POINTS_1D, SERVER_MAX_POINTS_2D
from core.errors import InvariantViolation
from core.torus.field import is_power_of_two

POTENTIALS = ('zero', 'cosine', 'constant:', 'random-trig')
DATA = ('capped-norm', 'smooth', 'constant:', 'affine:', 'huber')
DRIFTS = ('zero', 'sine', 'constant:', 'doob:')


class RequestError(InvariantViolation):
    """Malformed request body; maps to HTTP 400."""


def require(data, keys: Sequence[str]) -> dict:
    if not isinstance(data, dict):
        raise RequestError("Request body must be a JSON object")
    missing = [k for k in keys if k not in data]
    if missing:
        raise RequestError(f"Missing fields: {missing}")
    return data


def vector(value, dim: int, name: str) -> List[float]:
    values = [value] if isinstance(value, (int, float)) else value
    if not isinstance(values, list) or len(values) != dim:
        raise RequestError(f"'{name}' must be a number or a list of {dim} numbers")
    if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in values):
        raise RequestError(f"'{name}' must contain numbers only")
    return [float(v) for v in values]


def dimension(value) -> int:
    if value not in (1, 2):
        raise RequestError(f"'dim' must be 1 or 2, got {value!r}")
    return int(value)


def positive(value, name: str) -> float:
    if not isinstance(value, (int, float)) or isinstance(value, bool) or value <= 0:
        raise RequestError(f"'{name}' must be a positive number")
    return float(value)


def default_points(n: int, dim: int) -> int:
    return min(n, SERVER_MAX_POINTS_1D if dim == 1 else SERVER_MAX_POINTS_2D)


def resolution(value, dim: int, name: str = 'n') -> int:
    if not isinstance(value, int) or isinstance(value, bool) or value <= 0:
        raise RequestError(f"'{name}' must be a positive integer")
    if not is_power_of_two(value):
        raise RequestError(f"'{name}' must be a power of two, got {value}")
    limit = SERVER_MAX_POINTS_1D if dim == 1 else SERVER_MAX_POINTS_2D
    if value > limit:
        raise RequestError(f"'{name}' = {value} exceeds {limit} points per axis in dimension {dim}")
    return value


def spec(value, name: str) -> str:
    if not isinstance(value, str) or not value:
        raise RequestError(f"'{name}' must be a non-empty string")
    return value


def catalog(value, name: str, builtins: Sequence[str]) -> str:
    """A builtin name (or 'prefix:args'), else a bare file name resolved in the data directory."""
    value = spec(value, name)
    for b in builtins:
        if value == b or value.startswith(b if b.endswith(':') else b + ':'):
            return value
    if os.path.basename(value) != value or value.startswith('.'):
        raise RequestError(f"'{name}' must be one of {list(builtins)} or a file name in the data directory")
    return os.path.join(SERVER_DATA_DIR, value)
