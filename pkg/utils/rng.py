"""
Model: N/A (randomness).
Purpose: Seeded, counter-based random streams (Philox) so Monte Carlo runs and random
         potentials are bit-reproducible and can be split across workers.
Dependencies: numpy.
Ext Hooks: Swap the bit generator here and every caller follows.
"""

from typing import List

import numpy as np


def stream(seed: int) -> np.random.Generator:
    """Single generator for a seed."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


def spawn_streams(seed: int, count: int) -> List[np.random.Generator]:
    """`count` independent generators; stream i depends only on (seed, i)."""
    children = np.random.SeedSequence(seed).spawn(count)
    return [np.random.Generator(np.random.Philox(child)) for child in children]
