"""
Model: the effective Hamiltonian Hbar as a function object.
Purpose: Cached Hbar(p), DHbar(p), D^2Hbar(p) backed by principal-pair solves. The cache is a
         concurrent insert-if-absent map keyed by p rounded to 1e-12; Hbar(-p) is served from a
         solve at p by evenness.
Dependencies: numpy, threading, core/cell.
Ext Hooks: Persist the cache to disk for repeated sweeps over one potential.
"""

import logging
import threading
from typing import Dict, Optional, Tuple

import numpy as np

from core.cell import (CellSolution, Potential, PrincipalPair, as_vector, assemble_cell, check_spd,
                       grad_hbar, principal_pair)
from core.config import CACHE_DECIMALS, CELL_DEFAULT_POINTS, HESSIAN_STEP

logger = logging.getLogger(__name__)


class HamiltonianModel:
    def __init__(self, potential: Potential, points: Optional[int] = None):
        self.potential = potential
        self.points = points or max(potential.points, CELL_DEFAULT_POINTS)
        self._pairs: Dict[Tuple[float, ...], PrincipalPair] = {}
        self._grads: Dict[Tuple[float, ...], np.ndarray] = {}
        self._tables = {}
        self._lock = threading.Lock()

    @property
    def dim(self) -> int:
        return self.potential.dim

    @property
    def is_constant(self) -> bool:
        return self.potential.is_constant

    @property
    def constant(self) -> float:
        """The value of V when it is constant."""
        return float(self.potential.field.values.flat[0])

    def _key(self, p: np.ndarray) -> Tuple[float, ...]:
        # + 0.0 folds -0.0 into 0.0
        return tuple(float(c) for c in np.round(p, CACHE_DECIMALS) + 0.0)

    def _insert(self, store: dict, key, value):
        with self._lock:
            return store.setdefault(key, value)

    def pair(self, p) -> PrincipalPair:
        p = as_vector(p, self.dim)
        key = self._key(p)
        with self._lock:
            cached = self._pairs.get(key)
        if cached is not None:
            return cached
        solved = principal_pair(self.potential, p, self.points)
        return self._insert(self._pairs, key, solved)

    def cache_size(self) -> int:
        with self._lock:
            return len(self._pairs)

    def hbar(self, p) -> float:
        p = as_vector(p, self.dim)
        if self.is_constant:
            return 0.5 * float(p @ p) + self.constant
        with self._lock:
            cached = self._pairs.get(self._key(p)) or self._pairs.get(self._key(-p))
        if cached is not None:
            return cached.hbar
        return self.pair(p).hbar

    def cell(self, p) -> CellSolution:
        p = as_vector(p, self.dim)
        return assemble_cell(self.potential, self.pair(p), self.pair(-p))

    def grad(self, p) -> np.ndarray:
        p = as_vector(p, self.dim)
        if self.is_constant:
            return p.copy()
        key = self._key(p)
        with self._lock:
            cached = self._grads.get(key)
        if cached is None:
            cached = self._insert(self._grads, key, grad_hbar(self.cell(p)))
        return cached.copy()

    def hessian(self, p, h: float = HESSIAN_STEP) -> np.ndarray:
        """Central differences of the cached gradient, symmetrized and checked positive definite."""
        p = as_vector(p, self.dim)
        if self.is_constant:
            return np.eye(self.dim)
        M = np.empty((self.dim, self.dim))
        for j in range(self.dim):
            e = np.zeros(self.dim)
            e[j] = h
            M[:, j] = (self.grad(p + e) - self.grad(p - e)) / (2 * h)
        return check_spd(M, "D^2 Hbar")

    def grad_bound(self, radius: float) -> float:
        """Estimate of sup{|DHbar(p)| : |p| <= radius} from the sphere |p| = radius.

        DHbar is monotone, so in 1D the sup sits on the boundary; in 2D 16 directions are sampled.
        """
        if radius <= 0.0:
            return 0.0
        if self.is_constant:
            return float(radius)
        if self.dim == 1:
            return float(abs(self.grad([radius])[0]))
        angles = np.linspace(0.0, np.pi, 8, endpoint=False)
        # |DHbar(-p)| = |DHbar(p)| by evenness
        return max(float(np.linalg.norm(self.grad(radius * np.array([np.cos(a), np.sin(a)]))))
                   for a in angles)

    def lagrangian_table(self, q_max: float):
        """Shared LagrangianTable covering |q| <= q_max (built once per bound)."""
        from core.legendre.transform import LagrangianTable

        key = round(float(q_max), 6)
        with self._lock:
            table = self._tables.get(key)
        if table is None:
            table = self._insert(self._tables, key, LagrangianTable.build(self, q_max))
        return table
