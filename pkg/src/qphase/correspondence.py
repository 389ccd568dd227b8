"""Continuum Moyal bracket on plane-wave observables and its lattice counterpart.

On the plane ``(q, p)`` the Moyal product is the formal series::

    f * g = sum_n (1/n!) (i hbar/2)^n sum_k (-1)^k C(n, k)
            (d_p^k d_q^(n-k) f) (d_p^(n-k) d_q^k g)

For ``f = exp(i l1 q)`` and ``g = exp(i l2 p)`` every derivative is a scalar
multiple of the function, so the bracket ``(f*g - g*f)/(i hbar)`` is a number
``C`` times ``f g``. Its closed form is ``-(2/hbar) sin(hbar l1 l2 / 2)``; with
``hbar l1 l2 / 2 = pi / d`` it has the same modulus as the lattice bracket of
``w^q`` and ``w^p``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import prime
from .common import check_hbar


class SeriesDivergenceError(ArithmeticError):
    def __init__(self, message: str, suggested_order: int):
        super().__init__(message)
        self.suggested_order = suggested_order


@dataclass(frozen=True)
class HolonomicParams:
    """Wavenumbers of ``exp(i lambda1 q)`` and ``exp(i lambda2 p)``."""

    lambda1: float
    lambda2: float
    hbar: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.lambda1) and math.isfinite(self.lambda2)):
            raise ValueError("wavenumbers must be finite")
        check_hbar(self.hbar)

    @property
    def theta(self) -> float:
        """Half the phase ``hbar lambda1 lambda2 / 2``."""
        return self.hbar * self.lambda1 * self.lambda2 / 2


@dataclass(frozen=True)
class SeriesTruncation:
    max_order: int = 40

    def __post_init__(self):
        if self.max_order < 1:
            raise ValueError("max_order must be at least 1")


def moyal_series_terms(f_wave, g_wave, hbar: float, max_order: int) -> list[complex]:
    """Per-order coefficients of ``f * g`` in units of ``f g`` for plane waves.

    ``f_wave = (a, b)`` stands for ``exp(i(a q + b p))``. Order ``n`` is
    ``sum_k (-1)^k U_k V_(n-k)`` where ``C(n, k)/n! = 1/(k! (n-k)!)`` has been
    split into ``U_m = x^m/m!`` (``d_p`` on f, ``d_q`` on g) and ``V_m = y^m/m!``
    (``d_q`` on f, ``d_p`` on g). Both are built by recurrence, so high orders
    neither overflow nor lose the small terms.
    """
    (a1, b1), (a2, b2) = f_wave, g_wave
    x = (1j * hbar / 2) * (1j * b1) * (1j * a2)
    y = (1j * hbar / 2) * (1j * a1) * (1j * b2)
    U = [1 + 0j]
    V = [1 + 0j]
    for m in range(1, max_order + 1):
        U.append(U[-1] * x / m)
        V.append(V[-1] * y / m)
    return [sum((-1) ** k * U[k] * V[n - k] for k in range(n + 1)) for n in range(max_order + 1)]


def bracket_partial_sums(params: HolonomicParams, trunc: SeriesTruncation = SeriesTruncation()) -> np.ndarray:
    """Partial sums ``C_N`` of the bracket coefficient for ``N = 0..max_order``."""
    f_wave = (params.lambda1, 0.0)
    g_wave = (0.0, params.lambda2)
    fg = moyal_series_terms(f_wave, g_wave, params.hbar, trunc.max_order)
    gf = moyal_series_terms(g_wave, f_wave, params.hbar, trunc.max_order)
    diff = (np.array(fg) - np.array(gf)) / (1j * params.hbar)
    return np.cumsum(diff)


def _order_needed(x: float, tol: float) -> int:
    n, term = 0, 1.0
    while term > tol or n < 1:
        n += 1
        term *= x / n
    return n


def continuum_moyal_bracket_exponentials(
    params: HolonomicParams, trunc: SeriesTruncation = SeriesTruncation(), tol: float = 1e-13
) -> complex:
    """Coefficient ``C`` with ``{exp(i l1 q), exp(i l2 p)} = C exp(i l1 q) exp(i l2 p)``.

    Raises:
        SeriesDivergenceError: if the last retained order still contributes
            more than ``tol`` (relative), i.e. the truncation is too short for
            the size of ``hbar l1 l2``.
    """
    sums = bracket_partial_sums(params, trunc)
    x = abs(params.hbar * params.lambda1 * params.lambda2) / 2
    last = abs(sums[-1] - sums[-2]) if len(sums) > 1 else abs(sums[-1])
    n = trunc.max_order + 1
    tail = 2 / params.hbar * math.exp(n * math.log(x) - math.lgamma(n + 1)) if x > 0 else 0.0
    # |C| <= 2/hbar, so that bound sets the relative scale
    scale = max(1.0, 2 / params.hbar)
    if max(last, tail) > tol * scale:
        need = _order_needed(x, tol * scale * params.hbar / 2)
        raise SeriesDivergenceError(
            f"series not converged at order {trunc.max_order} for |hbar l1 l2|/2 = {x:.4g}; "
            f"try max_order >= {need}",
            need,
        )
    return complex(sums[-1])


def continuum_closed_form(params: HolonomicParams) -> float:
    return -2 / params.hbar * math.sin(params.theta)


def poisson_value(params: HolonomicParams) -> float:
    """The classical bracket ``{exp(i l1 q), exp(i l2 p)}`` in units of the product: ``-l1 l2``."""
    return -params.lambda1 * params.lambda2


def discrete_coordinate_coefficient(d: int, hbar: float = 1.0) -> complex:
    """``{z, x}`` divided by ``z x`` from the lattice commutator, for ``z = w^q/d``, ``x = w^p/d``."""
    dim = prime.PrimeDim(d)
    z, x = prime.coordinate_functions(dim)
    br = prime.moyal_bracket(dim, z, x, hbar)
    ratio = br / (z * x)
    if np.max(np.abs(ratio - ratio[0, 0])) > 1e-9:
        raise ArithmeticError("bracket of z and x is not proportional to z x")
    return complex(ratio[0, 0])


def displayed_discrete_coefficient(d: int, hbar: float = 1.0) -> float:
    """The coordinate-bracket coefficient as usually displayed: ``-(2/hbar) sin(pi/d)``."""
    prime.PrimeDim(d)
    return -2 / check_hbar(hbar) * math.sin(math.pi / d)


@dataclass(frozen=True)
class MatchReport:
    d: int
    hbar: float
    lambda1: float
    lambda2: float
    continuum_series: complex
    continuum_closed_form: float
    discrete_displayed: float
    discrete_operator: complex
    omega_mismatch: float

    @property
    def displayed_difference(self) -> float:
        return abs(self.continuum_closed_form - self.discrete_displayed)

    @property
    def series_difference(self) -> float:
        return abs(self.continuum_series - self.continuum_closed_form)

    @property
    def operator_difference(self) -> float:
        return abs(self.continuum_closed_form - self.discrete_operator)

    @property
    def reversed_orientation_difference(self) -> float:
        """Difference after flipping the sign of one wavenumber."""
        return abs(-self.continuum_closed_form - self.discrete_operator)

    def as_dict(self) -> dict:
        c = self.discrete_operator
        return {
            "d": self.d,
            "hbar": self.hbar,
            "lambda1": self.lambda1,
            "lambda2": self.lambda2,
            "continuum_series": [self.continuum_series.real, self.continuum_series.imag],
            "continuum_closed_form": self.continuum_closed_form,
            "discrete_displayed": self.discrete_displayed,
            "discrete_operator": [c.real, c.imag],
            "series_difference": self.series_difference,
            "displayed_difference": self.displayed_difference,
            "operator_difference": self.operator_difference,
            "reversed_orientation_difference": self.reversed_orientation_difference,
            "omega_mismatch": self.omega_mismatch,
            "notes": [
                "continuum bracket uses sin(hbar*l1*l2/2); no extra determinant factor inside the sine",
                "the lattice commutator gives +(2/hbar) sin(pi/d) for z=w^q/d, x=w^p/d: "
                "it matches the continuum value with one wavenumber reversed",
            ],
        }


def discrete_continuum_match(d: int, hbar: float = 1.0, trunc: SeriesTruncation = SeriesTruncation()) -> MatchReport:
    """Compare lattice and continuum brackets with ``hbar l1 l2 / 2 = pi / d``."""
    hbar = check_hbar(hbar)
    lam = math.sqrt(2 * math.pi / (hbar * d))
    params = HolonomicParams(lam, lam, hbar)
    omega = prime.PrimeDim(d).omega
    return MatchReport(
        d=d,
        hbar=hbar,
        lambda1=lam,
        lambda2=lam,
        continuum_series=continuum_moyal_bracket_exponentials(params, trunc),
        continuum_closed_form=continuum_closed_form(params),
        discrete_displayed=displayed_discrete_coefficient(d, hbar),
        discrete_operator=discrete_coordinate_coefficient(d, hbar),
        omega_mismatch=abs(np.exp(1j * hbar * lam * lam) - omega),
    )


def richardson_classical_limit(lambda1: float, lambda2: float, hbars=(1e-2, 1e-3, 1e-4)) -> float:
    """Extrapolate the bracket coefficient to ``hbar -> 0``.

    The coefficient is even in ``hbar`` so the leading error is ``O(hbar^2)``.
    """
    h = np.asarray(hbars, dtype=float)
    vals = np.array(
        [continuum_moyal_bracket_exponentials(HolonomicParams(lambda1, lambda2, hb)).real for hb in h]
    )
    # Neville tableau in the variable hbar^2
    x = h**2
    table = vals.copy()
    n = len(x)
    for level in range(1, n):
        for i in range(n - level):
            j = i + level
            table[i] = (x[i] * table[i + 1] - x[j] * table[i]) / (x[i] - x[j])
    return float(table[0])
