"""
Model: spectral collocation of second-order periodic operators on the torus.
Purpose: Dense matrices for 1/2 Lap + b.D + c (real, or Bloch-twisted with D -> D + i xi),
         flattened row-major so they act on ScalarField.flat().
Dependencies: numpy.
Ext Hooks: Sparse/matrix-free variants for N beyond the dense limits.
"""

from typing import Optional, Sequence

import numpy as np


def derivative_matrices(points: int):
    """First (Nyquist zeroed) and second spectral differentiation matrices on N nodes."""
    k = 2.0 * np.pi * np.fft.fftfreq(points, d=1.0 / points)
    k1 = k.copy()
    k1[points // 2] = 0.0
    fhat = np.fft.fft(np.eye(points), axis=0)
    D1 = np.fft.ifft(1j * k1[:, None] * fhat, axis=0).real
    D2 = np.fft.ifft(-(k ** 2)[:, None] * fhat, axis=0).real
    return D1, D2


def generator_matrix(dim: int, points: int, drift: Sequence, potential: Optional[np.ndarray] = None,
                     twist: Optional[Sequence[float]] = None) -> np.ndarray:
    """Collocation matrix of 1/2 (D + i xi)^2 + b.(D + i xi) + c.

    drift entries are scalars or arrays over the grid; potential is the zeroth-order
    coefficient over the grid; twist is the Bloch quasi-momentum xi (complex result).
    """
    D1, D2 = derivative_matrices(points)
    eye = np.eye(points)
    xis = np.zeros(dim) if twist is None else np.asarray(twist, dtype=float).reshape(-1)
    twisted = twist is not None
    dtype = complex if twisted else float

    # (D + i xi)^2 = D2 + 2 i xi D1 - xi^2, D2 keeping its Nyquist entry
    firsts = [(D1 + 1j * xi * eye) if twisted else D1 for xi in xis]
    seconds = [(0.5 * D2 + 1j * xi * D1 - 0.5 * xi ** 2 * eye) if twisted else 0.5 * D2 for xi in xis]

    variable = []
    for j, b in enumerate(drift):
        b = np.asarray(b, dtype=float)
        if b.size == 1:
            seconds[j] = seconds[j] + float(b) * firsts[j]
        else:
            variable.append((j, b.reshape(-1)))

    if dim == 1:
        A = np.array(seconds[0], dtype=dtype)
        for j, b in variable:
            A += b[:, None] * firsts[j]
    else:
        A = np.kron(seconds[0], eye).astype(dtype)
        A += np.kron(eye, seconds[1])
        for j, b in variable:
            A += b[:, None] * (np.kron(firsts[0], eye) if j == 0 else np.kron(eye, firsts[1]))

    if potential is not None:
        idx = np.diag_indices_from(A)
        A[idx] += np.asarray(potential, dtype=float).reshape(-1)
    return A
