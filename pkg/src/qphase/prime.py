"""The d x d phase space of a qudit of odd prime dimension d.

Grid functions are complex arrays of shape ``(d, d)`` indexed ``f[p, q]``.
Weyl correspondence::

    f(p, q) = tr(F D(p, q)) / d,        F = sum_{p,q} f(p, q) D(p, q)

with phase-point operators ``D(p, q) = (1/d) sum_{a,b} w^(pa - qb + ab/2) X^a Z^b``
built from the shift ``X|a> = |a+1>`` and clock ``Z|a> = w^a |a>``,
``w = exp(2 pi i / d)``. Halving is done in Z_d, i.e. ``1/2 == (d+1)/2 mod d``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .common import BracketKind, check_hbar
from .matrix import DimensionError, as_matrix

MAX_DIM = 101


class UnsupportedDimensionError(ValueError):
    """The requested dimension cannot carry the prime-dimension construction."""


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % k for k in range(2, math.isqrt(n) + 1))


@dataclass(frozen=True)
class PrimeDim:
    d: int

    def __post_init__(self):
        d = self.d
        if isinstance(d, bool) or not isinstance(d, (int, np.integer)):
            raise TypeError(f"dimension must be an integer, got {d!r}")
        if d == 2:
            raise UnsupportedDimensionError(
                "d=2 has no inverse of 2 mod d; use the qubit phase space instead"
            )
        if not _is_prime(d) or d > MAX_DIM:
            raise UnsupportedDimensionError(f"dimension must be an odd prime <= {MAX_DIM}, got {d}")
        object.__setattr__(self, "d", int(d))

    @property
    def omega(self) -> complex:
        return complex(np.exp(2j * np.pi / self.d))

    @property
    def half(self) -> int:
        return (self.d + 1) // 2

    def mod(self, value) -> "ModInt":
        return ModInt(int(value), self)

    @cached_property
    def _powers(self) -> np.ndarray:
        return np.exp(2j * np.pi * np.arange(self.d) / self.d)

    def omega_pow(self, exponent) -> np.ndarray:
        """``w**exponent`` for integer arrays, reduced mod d before exponentiating."""
        return self._powers[np.mod(exponent, self.d)]

    @cached_property
    def grid(self) -> tuple[np.ndarray, np.ndarray]:
        """Integer index arrays ``(P, Q)`` of shape ``(d, d)``."""
        return np.meshgrid(np.arange(self.d), np.arange(self.d), indexing="ij")


@dataclass(frozen=True)
class ModInt:
    """An element of Z_d."""

    value: int
    dim: PrimeDim

    def __post_init__(self):
        object.__setattr__(self, "value", int(self.value) % self.dim.d)

    def _coerce(self, other) -> int:
        if isinstance(other, ModInt):
            if other.dim != self.dim:
                raise ValueError("cannot mix elements of different Z_d")
            return other.value
        return int(other)

    def __add__(self, other):
        return ModInt(self.value + self._coerce(other), self.dim)

    __radd__ = __add__

    def __sub__(self, other):
        return ModInt(self.value - self._coerce(other), self.dim)

    def __rsub__(self, other):
        return ModInt(self._coerce(other) - self.value, self.dim)

    def __mul__(self, other):
        return ModInt(self.value * self._coerce(other), self.dim)

    __rmul__ = __mul__

    def __neg__(self):
        return ModInt(-self.value, self.dim)

    def inverse(self) -> "ModInt":
        if self.value == 0:
            raise ZeroDivisionError("0 has no inverse in Z_d")
        return ModInt(pow(self.value, -1, self.dim.d), self.dim)

    def __eq__(self, other):
        if isinstance(other, ModInt):
            return self.dim == other.dim and self.value == other.value
        if isinstance(other, (int, np.integer)):
            return self.value == int(other) % self.dim.d
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.dim.d))

    def __int__(self):
        return self.value

    __index__ = __int__


def _dim(dim) -> PrimeDim:
    return dim if isinstance(dim, PrimeDim) else PrimeDim(dim)


def as_grid(dim, f) -> np.ndarray:
    dim = _dim(dim)
    v = np.asarray(f, dtype=np.complex128)
    if v.shape != (dim.d, dim.d):
        raise DimensionError(f"grid function must have shape ({dim.d}, {dim.d}), got {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("function has non-finite values")
    return v


def shifted(dim, f, dp, dq) -> np.ndarray:
    """``g(p, q) = f(p + dp, q + dq)`` with wraparound."""
    dim = _dim(dim)
    f = as_grid(dim, f)
    P, Q = dim.grid
    return f[np.mod(P + int(dp), dim.d), np.mod(Q + int(dq), dim.d)]


# ---------------------------------------------------------------- operators


def shift_clock_ops(dim) -> tuple[np.ndarray, np.ndarray]:
    dim = _dim(dim)
    d = dim.d
    X = np.zeros((d, d), dtype=np.complex128)
    X[(np.arange(d) + 1) % d, np.arange(d)] = 1
    Z = np.diag(dim.omega_pow(np.arange(d)))
    return X, Z


def phase_point_op(dim, p, q) -> np.ndarray:
    """``D(p, q)`` in closed form.

    Summing the clock phases over ``b`` collapses the defining double sum to
    ``D(p, q)[i, j] = w^(p (i - j))`` on the anti-diagonal ``i + j == 2q``.
    """
    dim = _dim(dim)
    p, q = int(p), int(q)
    i, j = np.meshgrid(np.arange(dim.d), np.arange(dim.d), indexing="ij")
    mask = np.mod(i + j - 2 * q, dim.d) == 0
    return np.where(mask, dim.omega_pow(p * (i - j)), 0).astype(np.complex128)


def phase_point_ops(dim) -> np.ndarray:
    """All ``D(p, q)`` stacked as ``(d, d, d, d)``; intended for small d."""
    dim = _dim(dim)
    return np.stack(
        [np.stack([phase_point_op(dim, p, q) for q in range(dim.d)]) for p in range(dim.d)]
    )


def weyl_to_function(dim, F) -> np.ndarray:
    dim = _dim(dim)
    F = as_matrix(F)
    d = dim.d
    if F.shape != (d, d):
        raise DimensionError(f"expected a {d}x{d} operator, got {F.shape}")
    i = np.arange(d)
    q = np.arange(d)
    # A[q, i] = F[2q - i, i]; only the anti-diagonal i + j == 2q of D(p, q) contributes
    A = F[np.mod(2 * q[:, None] - i[None, :], d), i[None, :]]
    E = dim.omega_pow(2 * np.outer(i, i))
    S = E @ A.T
    P, Q = dim.grid
    return S * dim.omega_pow(-2 * P * Q) / d


def weyl_to_operator(dim, f) -> np.ndarray:
    dim = _dim(dim)
    f = as_grid(dim, f)
    d = dim.d
    k = np.arange(d)
    G = dim.omega_pow(np.outer(k, k)) @ f  # G[k, q] = sum_p f(p, q) w^(pk)
    i, j = np.meshgrid(k, k, indexing="ij")
    return G[np.mod(i - j, d), np.mod((i + j) * dim.half, d)]


# ------------------------------------------------------------ star products


def star_operator(dim, f, g) -> np.ndarray:
    """``(f * g)(p, q) = tr(F G D(p, q)) / d**2`` via the operator product."""
    dim = _dim(dim)
    F, G = weyl_to_operator(dim, f), weyl_to_operator(dim, g)
    return weyl_to_function(dim, F @ G) / dim.d


def _twisted_convolution(dim: PrimeDim, f, g, kernel: np.ndarray) -> np.ndarray:
    """Evaluate ``(1/d^2) sum f(p+r, q+s) g(p+t, q+u) K(...)`` in Fourier space.

    Writing ``f = sum_k fk w^(k1 p + k2 q)`` the lattice sum over ``(r, s, t, u)``
    forces ``t = -k2/2`` and ``u = k1/2`` and leaves a product of plane waves
    twisted by ``kernel[(k1 l2 - k2 l1) / 2 mod d]``.
    """
    d = dim.d
    fh = np.fft.fft2(f) / d**2
    gh = np.fft.fft2(g) / d**2
    idx = np.arange(d)
    C1 = idx[None, :, None]
    C2 = idx[None, None, :]
    K2 = idx[:, None, None]
    wrap = np.mod(C2 - K2, d)[:, 0, :]  # (k2, c2) -> c2 - k2
    out = np.zeros((d, d), dtype=np.complex128)
    for k1 in range(d):
        g1 = np.roll(gh, k1, axis=0)  # g1[c1] = gh[c1 - k1]
        t = g1[:, wrap].transpose(1, 0, 2)  # t[k2, c1, c2] = gh[c1 - k1, c2 - k2]
        m = np.mod((k1 * C2 - K2 * C1) * dim.half, d)
        out += np.einsum("k,kab->ab", fh[k1], t * kernel[m])
    return np.fft.ifft2(out) * d**2


def star_direct(dim, f, g) -> np.ndarray:
    """Star product from the lattice formula, without building operators.

    ``(f * g)(p, q) = (1/d^2) sum f(p+r, q+s) g(p+t, q+u) w^(2(st - ru))``,
    the product of a noncommutative torus at a rational deformation parameter.
    """
    dim = _dim(dim)
    f, g = as_grid(dim, f), as_grid(dim, g)
    return _twisted_convolution(dim, f, g, dim.omega_pow(np.arange(dim.d)))


def moyal_bracket(dim, f, g, hbar: float = 1.0, form: str = "operator") -> np.ndarray:
    """``-(i/hbar)(f * g - g * f)``.

    ``form="operator"`` uses the matrix commutator; ``form="lattice"`` uses the
    sine kernel ``(2/(hbar d^2)) sum f g sin(4 pi (st - ru) / d)``.
    """
    dim = _dim(dim)
    hbar = check_hbar(hbar)
    if form == "operator":
        F, G = weyl_to_operator(dim, f), weyl_to_operator(dim, g)
        return (-1j * weyl_to_function(dim, F @ G - G @ F) / dim.d) / hbar
    if form == "lattice":
        f, g = as_grid(dim, f), as_grid(dim, g)
        kernel = 2 * np.sin(2 * np.pi * np.arange(dim.d) / dim.d)
        return _twisted_convolution(dim, f, g, kernel) / hbar
    raise ValueError(f"unknown bracket form {form!r}")


# ------------------------------------------------------------- monomials


def coordinate_functions(dim) -> tuple[np.ndarray, np.ndarray]:
    """``z = w^q / d`` (from Z) and ``x = w^p / d`` (from X^-1)."""
    dim = _dim(dim)
    P, Q = dim.grid
    return dim.omega_pow(Q) / dim.d, dim.omega_pow(P) / dim.d


def monomial(dim, alpha, beta) -> np.ndarray:
    """``w^(alpha q + beta p)`` on the grid."""
    dim = _dim(dim)
    P, Q = dim.grid
    return dim.omega_pow(int(alpha) * Q + int(beta) * P)


def half_angle(dim, k) -> float:
    """``pi k / d`` with the halving done in Z_d.

    The integer lift of ``k`` is taken even, so the result only depends on
    ``k mod d``; for odd representatives this flips the sign of the sine.
    """
    dim = _dim(dim)
    return 2 * np.pi * ((int(k) * dim.half) % dim.d) / dim.d


def monomial_bracket_closed_form(dim, m1, m2, hbar: float = 1.0) -> np.ndarray:
    """``-(2/hbar) m1 m2 sin(pi (alpha delta - beta gamma) / d)`` for monomials.

    ``m1 = (alpha, beta)`` and ``m2 = (gamma, delta)`` are exponent pairs.
    """
    dim = _dim(dim)
    hbar = check_hbar(hbar)
    (a, b), (c, dd) = (tuple(int(x) for x in m) for m in (m1, m2))
    k = a * dd - b * c
    prod = monomial(dim, a + c, b + dd)
    return (-2 * np.sin(half_angle(dim, k)) * prod) / hbar


# ---------------------------------------------------- translations, calculus


def translate(dim, f, r, s) -> np.ndarray:
    """``(T f)(p, q) = f(p - r, q - s)``; the Weyl image of conjugation by ``X^s Z^r``."""
    return shifted(dim, f, -int(r), -int(s))


def translate_operator(dim, F, r, s) -> np.ndarray:
    dim = _dim(dim)
    X, Z = shift_clock_ops(dim)
    U = np.linalg.matrix_power(X, int(s) % dim.d) @ np.linalg.matrix_power(Z, int(r) % dim.d)
    return U @ as_matrix(F) @ U.conj().T


def delta_p(dim, f) -> np.ndarray:
    return shifted(dim, f, 1, 0) - as_grid(dim, f)


def delta_q(dim, f) -> np.ndarray:
    return shifted(dim, f, 0, 1) - as_grid(dim, f)


def delta_p_operator(dim, F) -> np.ndarray:
    """``delta_p`` through the operator side, ``Z^dag F Z - F``."""
    dim = _dim(dim)
    _, Z = shift_clock_ops(dim)
    F = as_matrix(F)
    return weyl_to_function(dim, Z.conj().T @ F @ Z - F)


def delta_q_operator(dim, F) -> np.ndarray:
    dim = _dim(dim)
    X, _ = shift_clock_ops(dim)
    F = as_matrix(F)
    return weyl_to_function(dim, X.conj().T @ F @ X - F)


def half_shift_partial_p(dim, f) -> np.ndarray:
    """``-w^q (f(p + 1/2, q) - f(p - 1/2, q))``, the derivation generated by Z."""
    dim = _dim(dim)
    _, Q = dim.grid
    h = dim.half
    return -dim.omega_pow(Q) * (shifted(dim, f, h, 0) - shifted(dim, f, -h, 0))


def half_shift_partial_p_operator(dim, f) -> np.ndarray:
    dim = _dim(dim)
    _, Z = shift_clock_ops(dim)
    F = weyl_to_operator(dim, f)
    return weyl_to_function(dim, Z @ F - F @ Z)


def half_shift_partial_q(dim, f) -> np.ndarray:
    """``w^p (f(p, q + 1/2) - f(p, q - 1/2))``, the derivation generated by X^-1."""
    dim = _dim(dim)
    P, _ = dim.grid
    h = dim.half
    return dim.omega_pow(P) * (shifted(dim, f, 0, h) - shifted(dim, f, 0, -h))


def half_shift_partial_q_operator(dim, f) -> np.ndarray:
    dim = _dim(dim)
    X, _ = shift_clock_ops(dim)
    Xd = X.conj().T
    F = weyl_to_operator(dim, f)
    return weyl_to_function(dim, Xd @ F - F @ Xd)


def iterated_delta(dim, f, k: int, l: int) -> np.ndarray:
    """``delta_p^k delta_q^l f`` as a double alternating binomial sum."""
    if k < 0 or l < 0:
        raise ValueError("difference orders must be nonnegative")
    dim = _dim(dim)
    f = as_grid(dim, f)
    out = np.zeros_like(f)
    for r in range(k + 1):
        for s in range(l + 1):
            c = (-1) ** (k - r + l - s) * math.comb(k, r) * math.comb(l, s)
            out += c * shifted(dim, f, r, s)
    return out


def delta_inversion(dim, f, r: int, s: int) -> np.ndarray:
    """Rebuild ``f(p + r, q + s)`` from iterated differences at ``(p, q)``."""
    if r < 0 or s < 0:
        raise ValueError("inversion is stated for nonnegative shifts")
    dim = _dim(dim)
    out = np.zeros((dim.d, dim.d), dtype=np.complex128)
    for k in range(r + 1):
        for l in range(s + 1):
            out += math.comb(r, k) * math.comb(s, l) * iterated_delta(dim, f, k, l)
    return out


def delta_inversion_check(dim, f, r: int, s: int, tol: float = 1e-10) -> bool:
    return bool(np.max(np.abs(delta_inversion(dim, f, r, s) - shifted(dim, f, r, s))) <= tol)


def line_projector(dim, p) -> np.ndarray:
    """``(1/d) sum_q D(p, q)``: the rank-one projector onto the ``w^-p`` eigenvector of X."""
    dim = _dim(dim)
    X, _ = shift_clock_ops(dim)
    out = np.zeros((dim.d, dim.d), dtype=np.complex128)
    Xa = np.eye(dim.d, dtype=np.complex128)
    for a in range(dim.d):
        out += dim.omega_pow(int(p) * a) * Xa
        Xa = X @ Xa
    return out / dim.d


# -------------------------------------------------------- classical bracket


def classical_bracket(dim, f, g, hbar: float = 1.0) -> np.ndarray:
    """``(1/(hbar d^2)) (dp f dq g - dq f dp g)`` with pointwise products."""
    dim = _dim(dim)
    hbar = check_hbar(hbar)
    dpf, dqf = half_shift_partial_p(dim, f), half_shift_partial_q(dim, f)
    dpg, dqg = half_shift_partial_p(dim, g), half_shift_partial_q(dim, g)
    return (dpf * dqg - dqf * dpg) / dim.d**2 / hbar


def bracket(dim, kind, f, g, hbar: float = 1.0) -> np.ndarray:
    if BracketKind(kind) is BracketKind.MOYAL:
        return moyal_bracket(dim, f, g, hbar)
    return classical_bracket(dim, f, g, hbar)


def jacobi_defect(dim, kind, f, g, h, hbar: float = 1.0) -> np.ndarray:
    dim = _dim(dim)

    def br(u, v):
        return bracket(dim, kind, u, v, hbar)

    return br(f, br(g, h)) + br(g, br(h, f)) + br(h, br(f, g))


def classical_jacobi_witness(dim, hbar: float = 1.0):
    """Exhaustive search over all triples of monomials ``w^(alpha q + beta p)``.

    Returns ``(exponents, defect)`` for the triple maximising the Jacobi
    defect of the classical bracket; ties keep the first triple found.
    """
    dim = _dim(dim)
    exps = list(itertools.product(range(dim.d), repeat=2))
    monos = {e: monomial(dim, *e) for e in exps}
    best, best_val = None, -1.0
    for triple in itertools.product(exps, repeat=3):
        defect = jacobi_defect(dim, BracketKind.CLASSICAL, *(monos[e] for e in triple), hbar=hbar)
        val = float(np.max(np.abs(defect)))
        if val > best_val + 1e-12:
            best, best_val = triple, val
    return best, best_val


# -------------------------------------------------- canonical transformations


@dataclass(frozen=True)
class CanonicalMap:
    """Linear change of variables ``(q~, p~) = (alpha q + beta p, gamma q + delta p)``."""

    dim: PrimeDim
    alpha: int
    beta: int
    gamma: int
    delta: int

    def __post_init__(self):
        dim = _dim(self.dim)
        object.__setattr__(self, "dim", dim)
        for name in ("alpha", "beta", "gamma", "delta"):
            object.__setattr__(self, name, int(getattr(self, name)) % dim.d)

    @property
    def determinant(self) -> ModInt:
        return self.dim.mod(self.alpha * self.delta - self.beta * self.gamma)

    @property
    def is_symplectic(self) -> bool:
        return self.determinant == 1


def apply_canonical(dim, m: CanonicalMap, f) -> np.ndarray:
    """Pull ``f`` back along ``m``: ``g(p, q) = f(p~, q~)``."""
    dim = _dim(dim)
    if m.dim != dim:
        raise ValueError("map and function live on different lattices")
    if m.determinant == 0:
        raise ValueError("map has zero determinant mod d and is not one-to-one")
    f = as_grid(dim, f)
    P, Q = dim.grid
    q_new = np.mod(m.alpha * Q + m.beta * P, dim.d)
    p_new = np.mod(m.gamma * Q + m.delta * P, dim.d)
    return f[p_new, q_new]


def _monomial_pairs(dim: PrimeDim):
    if dim.d <= 7:
        exps = list(itertools.product(range(dim.d), repeat=2))
    else:
        exps = list(itertools.product(range(3), repeat=2))
    return list(itertools.product(exps, repeat=2))


def canonical_bracket_deviation(dim, m: CanonicalMap, hbar: float = 1.0) -> float:
    """Largest change of a monomial bracket under ``m``.

    Compares ``{f o m, g o m}`` with ``{f, g} o m`` using the closed form;
    all monomial pairs are used for d <= 7, exponents in ``{0,1,2}^2`` beyond.
    """
    dim = _dim(dim)
    worst = 0.0
    for e1, e2 in _monomial_pairs(dim):
        lhs_exps = []
        for a, b in (e1, e2):
            # w^(a q~ + b p~) is again a monomial in (q, p)
            lhs_exps.append((a * m.alpha + b * m.gamma, a * m.beta + b * m.delta))
        lhs = monomial_bracket_closed_form(dim, *lhs_exps, hbar=hbar)
        rhs = apply_canonical(dim, m, monomial_bracket_closed_form(dim, e1, e2, hbar=hbar))
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst


def canonical_preserves_bracket(dim, m: CanonicalMap, hbar: float = 1.0, tol: float = 1e-12) -> bool:
    return canonical_bracket_deviation(dim, m, hbar) <= tol
