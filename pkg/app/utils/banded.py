"""
Finite-volume Laplacians and banded-matrix assembly shared by the solvers.
"""
from __future__ import annotations

import numpy as np


def fv_stiffness(x: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vertex-centred finite-volume discretization of -d^2/dx^2 with Neumann ends.

    Returns (mass, diag, offdiag): the lumped control-volume lengths (half cells
    at both ends) and the symmetric tridiagonal stiffness matrix K, so that
    -u'' is approximated by K u / mass.
    """
    x = np.asarray(x, dtype=float)
    h = np.diff(x)
    if np.any(h <= 0):
        raise ValueError("grid must be strictly increasing")
    mass = np.empty_like(x)
    mass[0] = 0.5 * h[0]
    mass[-1] = 0.5 * h[-1]
    mass[1:-1] = 0.5 * (h[:-1] + h[1:])
    inv = 1.0 / h
    diag = np.zeros_like(x)
    diag[:-1] += inv
    diag[1:] += inv
    return mass, diag, -inv


def stiffness_apply(diag: np.ndarray, offdiag: np.ndarray, u: np.ndarray) -> np.ndarray:
    """K @ u for a symmetric tridiagonal K, along the last axis of u."""
    out = diag * u
    out[..., :-1] += offdiag * u[..., 1:]
    out[..., 1:] += offdiag * u[..., :-1]
    return out


def banded_from_diagonals(diagonals: dict[int, np.ndarray], n: int, lower: int, upper: int) -> np.ndarray:
    """Pack diagonals A[i, i + k] into the (lower, upper) layout of scipy.linalg.solve_banded."""
    ab = np.zeros((lower + upper + 1, n))
    for offset, values in diagonals.items():
        if offset > upper or -offset > lower:
            raise ValueError(f"diagonal {offset} outside band ({lower}, {upper})")
        values = np.broadcast_to(np.asarray(values, dtype=float), (n - abs(offset),))
        row = upper - offset
        if offset >= 0:
            ab[row, offset:] = values
        else:
            ab[row, : n + offset] = values
    return ab


def tridiagonal_banded(diag: np.ndarray, lower: np.ndarray, upper: np.ndarray) -> np.ndarray:
    """(1, 1) banded layout from the three diagonals of a tridiagonal matrix."""
    n = diag.size
    return banded_from_diagonals({-1: lower, 0: diag, 1: upper}, n, 1, 1)


__all__ = [
    "fv_stiffness",
    "stiffness_apply",
    "banded_from_diagonals",
    "tridiagonal_banded",
]
