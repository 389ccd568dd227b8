"""The four-point phase space of a single qubit.

A phase-space function is a complex array of shape ``(4,)`` indexed in the
canonical point order ``(--), (-+), (+-), (++)``. The first sign ``eps`` is the
Z (position, ``q``) label and the second sign ``eps_prime`` the X (momentum,
``p``) label.

The Weyl correspondence is ``f[a] = tr(F D_a)`` and ``F = 2 sum_a f[a] D_a``;
the factor 2 is the Hilbert space dimension.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .common import BracketKind, check_hbar
from .matrix import DimensionError, as_matrix

I2 = np.eye(2, dtype=np.complex128)
X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
_PAULI = {"X": X, "Y": Y, "Z": Z}

DIM = 2


@dataclass(frozen=True)
class QubitPoint:
    eps: int
    eps_prime: int

    def __post_init__(self):
        if self.eps not in (-1, 1) or self.eps_prime not in (-1, 1):
            raise ValueError("qubit point labels must be +1 or -1")

    @property
    def label(self) -> str:
        return ("+" if self.eps > 0 else "-") + ("+" if self.eps_prime > 0 else "-")

    @property
    def index(self) -> int:
        return POINTS.index(self)

    @classmethod
    def parse(cls, label: str) -> "QubitPoint":
        if len(label) != 2 or any(c not in "+-" for c in label):
            raise ValueError(f"bad qubit point label {label!r}")
        return cls(1 if label[0] == "+" else -1, 1 if label[1] == "+" else -1)


POINTS = tuple(QubitPoint(e, ep) for e, ep in itertools.product((-1, 1), repeat=2))
LABELS = tuple(pt.label for pt in POINTS)


@dataclass(frozen=True)
class BlochState:
    """Qubit density matrix ``(I + aX + bY + cZ)/2``.

    States outside the Bloch ball are allowed so that unphysical initial data
    can still be propagated; :attr:`is_valid` reports positivity.
    """

    a: float
    b: float
    c: float

    @property
    def is_valid(self) -> bool:
        return self.a**2 + self.b**2 + self.c**2 <= 1 + 1e-12

    def density_matrix(self) -> np.ndarray:
        return (I2 + self.a * X + self.b * Y + self.c * Z) / 2


def pauli(which: str) -> np.ndarray:
    try:
        return _PAULI[which.upper()].copy()
    except KeyError:
        raise ValueError(f"unknown Pauli operator {which!r}") from None


def phase_point_op(pt: QubitPoint) -> np.ndarray:
    e, ep = pt.eps, pt.eps_prime
    return (I2 + ep * X + e * ep * Y + e * Z) / 4


# stacked (4, 2, 2) in canonical order
PHASE_POINT_OPS = np.stack([phase_point_op(pt) for pt in POINTS])


def as_function(f) -> np.ndarray:
    v = np.asarray(f, dtype=np.complex128)
    if v.shape != (4,):
        raise DimensionError(f"qubit phase-space function must have shape (4,), got {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("function has non-finite values")
    return v


def indicator(pt: QubitPoint | str) -> np.ndarray:
    if isinstance(pt, str):
        pt = QubitPoint.parse(pt)
    v = np.zeros(4, dtype=np.complex128)
    v[pt.index] = 1
    return v


def weyl_to_function(F) -> np.ndarray:
    F = as_matrix(F)
    if F.shape != (2, 2):
        raise DimensionError(f"qubit operators are 2x2, got {F.shape}")
    return np.einsum("aij,ji->a", PHASE_POINT_OPS, F)


def weyl_to_operator(f) -> np.ndarray:
    return 2 * np.einsum("a,aij->ij", as_function(f), PHASE_POINT_OPS)


def coordinate_functions() -> tuple[np.ndarray, np.ndarray]:
    """Position ``q = +-1`` (from 2Z) and momentum ``p = +-1`` (from 2X)."""
    return weyl_to_function(2 * Z), weyl_to_function(2 * X)


def bloch_probabilities(state: BlochState) -> np.ndarray:
    return weyl_to_function(state.density_matrix())


def is_classical(f, tol: float = 1e-10) -> bool:
    """True iff ``f`` is a nonnegative quasi-probability (up to ``tol``)."""
    f = as_function(f)
    if np.max(np.abs(f.imag)) > tol:
        raise ValueError("function is not real-valued within tolerance")
    return bool(np.all(f.real >= -tol))


def star(f, g) -> np.ndarray:
    F, G = weyl_to_operator(f), weyl_to_operator(g)
    return weyl_to_function(F @ G) / 2


def triple_trace_table() -> np.ndarray:
    """``T[a, b, c] = 16 tr(D_a D_b D_c)`` in canonical point order."""
    return 16 * np.einsum("aij,bjk,cki->abc", PHASE_POINT_OPS, PHASE_POINT_OPS, PHASE_POINT_OPS)


def moyal_bracket(f, g, hbar: float = 1.0) -> np.ndarray:
    hbar = check_hbar(hbar)
    F, G = weyl_to_operator(f), weyl_to_operator(g)
    return (-0.5j * weyl_to_function(F @ G - G @ F)) / hbar


def translate(f, which: str) -> np.ndarray:
    """Conjugation by a Pauli operator, ``(T f)_a = tr(D_a P F P)``."""
    P = pauli(which)
    return weyl_to_function(P @ weyl_to_operator(f) @ P)


def partial(f, which: str) -> np.ndarray:
    """Inner derivation ``(d_P f)_a = -i tr(D_a [P, F])``."""
    P = pauli(which)
    F = weyl_to_operator(f)
    return -1j * weyl_to_function(P @ F - F @ P)


_DELTA_GEN = {"q": "X", "p": "Z", "X": "X", "Z": "Z", "Y": "Y"}


def delta(f, which: str) -> np.ndarray:
    """Finite difference ``T f - f`` along ``q`` (via X), ``p`` (via Z) or the diagonal (Y)."""
    try:
        gen = _DELTA_GEN[which]
    except KeyError:
        raise ValueError(f"unknown difference direction {which!r}") from None
    return translate(f, gen) - as_function(f)


def _difference_wedge(f, g) -> np.ndarray:
    return delta(f, "q") * delta(g, "p") - delta(f, "p") * delta(g, "q")


def moyal_bracket_difference_form(f, g, hbar: float = 1.0) -> np.ndarray:
    """Moyal bracket written with pointwise products of finite differences.

    The antisymmetrised difference product is moved to the opposite corner
    of the lattice by the diagonal translation ``T_Y``.
    """
    return translate(_difference_wedge(f, g), "Y") / (2 * check_hbar(hbar))


def classical_bracket(f, g, hbar: float = 1.0) -> np.ndarray:
    """The difference bracket without the diagonal translation.

    Equal to ``T_Y`` applied to the Moyal bracket. Because conjugation by Y is
    an automorphism that acts symmetrically on the Pauli vector, this bracket
    still satisfies the Jacobi identity on the qubit.
    """
    return _difference_wedge(f, g) / (2 * check_hbar(hbar))


def classical_bracket_operator_form(f, g, hbar: float = 1.0) -> np.ndarray:
    hbar = check_hbar(hbar)
    F, G = weyl_to_operator(f), weyl_to_operator(g)
    return (-0.5j * weyl_to_function(Y @ (F @ G - G @ F) @ Y)) / hbar


def bracket(kind: BracketKind | str, f, g, hbar: float = 1.0) -> np.ndarray:
    kind = BracketKind(kind)
    if kind is BracketKind.MOYAL:
        return moyal_bracket(f, g, hbar)
    return classical_bracket(f, g, hbar)


def jacobi_defect(kind: BracketKind | str, f, g, h, hbar: float = 1.0) -> np.ndarray:
    def br(u, v):
        return bracket(kind, u, v, hbar)

    return br(f, br(g, h)) + br(g, br(h, f)) + br(h, br(f, g))


def classical_jacobi_witness(hbar: float = 1.0):
    """Exhaustive search over all 64 triples of point indicators.

    Returns ``(labels, defect)`` for the triple with the largest Jacobi
    defect of the classical bracket.
    """
    best, best_val = None, -1.0
    for triple in itertools.product(POINTS, repeat=3):
        fs = [indicator(pt) for pt in triple]
        defect = jacobi_defect(BracketKind.CLASSICAL, *fs, hbar=hbar)
        val = float(np.max(np.abs(defect)))
        if val > best_val:
            best, best_val = tuple(pt.label for pt in triple), val
    return best, best_val


def product_trace_identity_check(tol: float = 1e-14) -> bool:
    """Check ``tr(D P3) = 2 tr(D P1) tr(D P2)`` for every ordering of X, Y, Z."""
    traces = {k: np.einsum("aij,ji->a", PHASE_POINT_OPS, P) for k, P in _PAULI.items()}
    for p1, p2, p3 in itertools.permutations("XYZ"):
        if np.max(np.abs(traces[p3] - 2 * traces[p1] * traces[p2])) > tol:
            return False
    return True


def star_pp_expansion(f, g) -> complex:
    """The ``(++)`` value of ``f * g`` from its explicit quadratic expansion."""
    f = {lab: v for lab, v in zip(LABELS, as_function(f))}
    g = {lab: v for lab, v in zip(LABELS, as_function(g))}
    sym = (
        f["++"] * g["+-"] + f["++"] * g["-+"] + f["++"] * g["--"]
        + f["+-"] * g["++"] + f["-+"] * g["++"] + f["--"] * g["++"]
        + f["+-"] * g["+-"] + f["-+"] * g["-+"] + f["--"] * g["--"]
    )
    cyc = f["+-"] * g["-+"] + f["-+"] * g["--"] + f["--"] * g["+-"]
    anti = f["+-"] * g["--"] + f["--"] * g["-+"] + f["-+"] * g["+-"]
    return complex(5 / 8 * f["++"] * g["++"] + sym / 8 + (-1 + 2j) / 8 * cyc + (-1 - 2j) / 8 * anti)
