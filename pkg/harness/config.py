"""
Model: N/A (setup).
Purpose: Experiment configuration for epsilon-sweeps: YAML/JSON files (one loader, YAML being a
         JSON superset) or builtin experiments, validated up front so a sweep never starts on
         inputs a solver would refuse. Also the grid syntax for command-line sweeps over q.
Dependencies: pyyaml, numpy, core/config.py, core/hopflax (data catalog), utils/serialization.py.
Ext Hooks: New builtin experiments go in BUILTINS.
"""

import itertools
import logging
import os
from dataclasses import asdict, dataclass
from typing import List, Optional, Tuple

import numpy as np
import yaml

from core.config import CELL_MIN_POINTS, OUTPUT_DIR, OUTPUT_ENV, POINTS_PER_PERIOD, WORKERS
from core.errors import ConfigError
from core.hopflax import CATALOG_VERSION
from core.torus.field import is_power_of_two
from utils.serialization import stable_hash

logger = logging.getLogger(__name__)

REFERENCES = ('pde', 'quadrature')
MODES = ('sup', 'pointwise')


def dyadic(first: int, last: int) -> List[float]:
    """[2^-first, ..., 2^-last]."""
    return [2.0 ** -k for k in range(first, last + 1)]


def parse_grid(spec: str, dim: int) -> List[Tuple[float, ...]]:
    """'start:stop:count' or 'a,b,c' per axis, axes joined by ';' into a tensor grid."""
    texts = spec.split(';')
    if len(texts) != dim:
        raise ConfigError(f"Grid '{spec}' has {len(texts)} axes, expected {dim}")
    axes = []
    for text in texts:
        try:
            if text.count(':') == 2:
                start, stop, count = text.split(':')
                if int(count) < 1:
                    raise ValueError("count must be positive")
                axes.append(np.linspace(float(start), float(stop), int(count)))
            else:
                axes.append(np.array([float(v) for v in text.split(',')]))
        except ValueError as e:
            raise ConfigError(f"Malformed grid axis '{text}': {e}") from e
    return [tuple(float(v) for v in point) for point in itertools.product(*axes)]


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    potential: str = 'zero'
    data: str = 'capped-norm'
    dim: int = 1
    epsilons: Tuple[float, ...] = ()
    points: Tuple[Tuple[float, ...], ...] = ((0.0,),)
    times: Tuple[float, ...] = (1.0,)
    cell_points: int = 128
    points_per_period: int = POINTS_PER_PERIOD
    reference: str = 'pde'
    mode: str = 'sup'
    seed: int = 0
    workers: int = WORKERS
    output_dir: Optional[str] = None
    catalog_version: str = CATALOG_VERSION

    def __post_init__(self):
        object.__setattr__(self, 'epsilons', tuple(float(e) for e in self.epsilons))
        object.__setattr__(self, 'times', tuple(float(t) for t in self.times))
        object.__setattr__(self, 'points', tuple(_as_point(p, self.dim) for p in self.points))
        self.validate()

    def validate(self) -> None:
        if self.dim not in (1, 2):
            raise ConfigError(f"dim must be 1 or 2, got {self.dim}")
        eps = self.epsilons
        if any(not 0 < e <= 1 for e in eps):
            raise ConfigError(f"epsilons must lie in (0, 1], got {list(eps)}")
        if any(a <= b for a, b in zip(eps, eps[1:])):
            raise ConfigError(f"epsilons must be strictly decreasing, got {list(eps)}")
        if not self.points:
            raise ConfigError("At least one evaluation point is required")
        if not self.times or any(t <= 0 for t in self.times):
            raise ConfigError(f"times must be positive, got {list(self.times)}")
        if self.cell_points < CELL_MIN_POINTS or not is_power_of_two(self.cell_points):
            raise ConfigError(f"cell_points must be a power of two >= {CELL_MIN_POINTS}, got {self.cell_points}")
        if self.points_per_period < POINTS_PER_PERIOD or not is_power_of_two(self.points_per_period):
            raise ConfigError(f"points_per_period must be a power of two >= {POINTS_PER_PERIOD}")
        if self.reference not in REFERENCES:
            raise ConfigError(f"reference must be one of {REFERENCES}, got '{self.reference}'")
        if self.reference == 'quadrature' and (self.dim != 1 or self.potential != 'zero'):
            raise ConfigError("The quadrature reference needs potential 'zero' and dim 1")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got '{self.mode}'")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.catalog_version != CATALOG_VERSION:
            raise ConfigError(f"Config targets data catalog v{self.catalog_version}, this build has "
                              f"v{CATALOG_VERSION}")

    def to_dict(self) -> dict:
        d = asdict(self)
        d['points'] = [list(p) for p in self.points]
        d['epsilons'] = list(self.epsilons)
        d['times'] = list(self.times)
        # where results land does not change what is computed
        d.pop('output_dir')
        d.pop('workers')
        return d

    def config_hash(self) -> str:
        return stable_hash(self.to_dict())

    def resolved_output_dir(self) -> str:
        return os.environ.get(OUTPUT_ENV) or self.output_dir or OUTPUT_DIR


def _as_point(p, dim: int) -> Tuple[float, ...]:
    values = [p] if isinstance(p, (int, float)) else list(p)
    if len(values) != dim:
        raise ConfigError(f"Evaluation point {p} does not match dim {dim}")
    return tuple(float(v) for v in values)


def from_dict(raw: dict) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigError("Experiment config must be a mapping")
    known = set(ExperimentConfig.__dataclass_fields__)
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ConfigError(f"Unknown config keys: {unknown}")
    if 'name' not in raw:
        raise ConfigError("Experiment config needs a name")
    try:
        return ExperimentConfig(**raw)
    except TypeError as e:
        raise ConfigError(f"Malformed experiment config: {e}") from e


BUILTINS = {
    # V = 0, capped norm at its kink: the log(1/eps) factor is attained
    'lower-bound': dict(name='lower-bound', potential='zero', data='capped-norm', dim=1,
                        epsilons=dyadic(4, 10), points=[[0.0]], times=[1.0], reference='quadrature'),
    'lower-bound-pde': dict(name='lower-bound-pde', potential='zero', data='capped-norm', dim=1,
                            epsilons=dyadic(4, 9), points=[[0.0]], times=[1.0], reference='pde'),
    # smooth semiconcave data: pointwise O(eps)
    'semiconcave': dict(name='semiconcave', potential='cosine', data='smooth', dim=1,
                        epsilons=dyadic(5, 9), points=[[0.0]], times=[1.0], mode='pointwise'),
}


def load_config(source: str) -> ExperimentConfig:
    """A path to a YAML/JSON file, or 'builtin:<name>'."""
    if source.startswith('builtin:'):
        name = source.split(':', 1)[1]
        if name not in BUILTINS:
            raise ConfigError(f"Unknown builtin experiment '{name}'; choose from {sorted(BUILTINS)}")
        return from_dict(dict(BUILTINS[name]))
    try:
        with open(source, 'r') as f:
            raw = yaml.safe_load(f)
    except OSError as e:
        raise ConfigError(f"Cannot read experiment config {source}: {e}") from e
    except yaml.YAMLError as e:
        raise ConfigError(f"Experiment config {source} is not valid YAML/JSON: {e}") from e
    config = from_dict(raw)
    logger.info("Loaded experiment '%s' from %s (hash %s)", config.name, source, config.config_hash()[:12])
    return config
