"""
Model: N/A (plumbing).
Purpose: Field files - a JSON header {dim, N} next to a CSV of values, one per line,
         row-major over axes, node k at coordinate k/N.
Dependencies: numpy, json, core/torus/field.py.
Ext Hooks: A binary (.npy) body could share the same header.
"""

import json
import os

import numpy as np

from core.errors import IoFailure
from core.torus.field import ScalarField, TorusGrid, VectorField


def write_field(stem: str, field: ScalarField) -> None:
    header = {'dim': field.grid.dim, 'N': field.grid.points}
    try:
        directory = os.path.dirname(stem)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(stem + '.json', 'w') as f:
            json.dump(header, f, sort_keys=True)
            f.write('\n')
        np.savetxt(stem + '.csv', field.flat(), fmt='%.17g')
    except OSError as e:
        raise IoFailure(f"Cannot write field {stem}: {e}") from e


def read_field(stem: str) -> ScalarField:
    try:
        with open(stem + '.json', 'r') as f:
            header = json.load(f)
        values = np.loadtxt(stem + '.csv', dtype=float, ndmin=1)
    except (OSError, ValueError) as e:
        raise IoFailure(f"Cannot read field {stem}: {e}") from e
    grid = TorusGrid(int(header['dim']), int(header['N']))
    return ScalarField(grid, values)


def write_vector_field(stem: str, field: VectorField) -> None:
    # one scalar file per component: <stem>_0, <stem>_1
    for j in range(field.grid.dim):
        write_field(f"{stem}_{j}", field.component(j))


def read_vector_field(stem: str, dim: int) -> VectorField:
    comps = [read_field(f"{stem}_{j}") for j in range(dim)]
    return VectorField(comps[0].grid, tuple(c.values for c in comps))
