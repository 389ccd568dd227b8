"""Small dense complex matrices.

Operators are plain ``numpy`` arrays of dtype ``complex128``. The helpers here
validate shapes and finiteness at the boundary and otherwise stay out of the
way, so any array that passes :func:`as_matrix` can be fed to numpy directly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg


class DimensionError(ValueError):
    """Raised when operands do not have matching square shapes."""


@dataclass(frozen=True)
class Tolerance:
    """Comparison thresholds.

    ``algebraic`` is for identities that hold exactly in exact arithmetic,
    ``dynamic`` for quantities accumulated along a time integration.
    """

    algebraic: float = 1e-10
    dynamic: float = 1e-6

    def __post_init__(self):
        if not (self.algebraic > 0 and self.dynamic > 0):
            raise ValueError("tolerances must be strictly positive")
        if self.algebraic > self.dynamic:
            raise ValueError("algebraic tolerance must not exceed dynamic tolerance")


DEFAULT_TOL = Tolerance()


def as_matrix(a) -> np.ndarray:
    """Return ``a`` as a square, finite ``complex128`` array."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise DimensionError(f"expected a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def _pair(a, b) -> tuple[np.ndarray, np.ndarray]:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise DimensionError(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")
    return a, b


def identity(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=np.complex128)


def multiply(a, b) -> np.ndarray:
    a, b = _pair(a, b)
    return a @ b


def commutator(a, b) -> np.ndarray:
    a, b = _pair(a, b)
    return a @ b - b @ a


def trace(a) -> complex:
    return complex(np.trace(as_matrix(a)))


def dagger(a) -> np.ndarray:
    return as_matrix(a).conj().T


def is_hermitian(a, tol: float = DEFAULT_TOL.algebraic) -> bool:
    a = as_matrix(a)
    return bool(np.max(np.abs(a - a.conj().T)) <= tol)


def mat_exp(a) -> np.ndarray:
    """Matrix exponential.

    Uses scaling-and-squaring with a Pade approximant; the number of squarings
    grows with the norm of ``a`` so accuracy does not degrade for long times.
    """
    return scipy.linalg.expm(as_matrix(a))


def approx_eq(a, b, tol: float = DEFAULT_TOL.algebraic) -> bool:
    """True iff the largest entrywise absolute difference is at most ``tol``."""
    a, b = _pair(a, b)
    return bool(np.max(np.abs(a - b)) <= tol)
