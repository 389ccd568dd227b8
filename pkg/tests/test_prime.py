import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

import oracles
from qphase import prime
from qphase.matrix import DimensionError


def rand_grid(rng, d):
    return rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))


# ------------------------------------------------------------ dimension


@pytest.mark.parametrize("d", [3, 5, 7, 11, 101])
def test_prime_dims_accepted(d):
    dim = prime.PrimeDim(d)
    assert dim.half * 2 % d == 1
    assert dim.omega == pytest.approx(np.exp(2j * np.pi / d))


def test_qubit_rejected_with_own_message():
    with pytest.raises(prime.UnsupportedDimensionError, match="qubit"):
        prime.PrimeDim(2)


@pytest.mark.parametrize("d", [1, 4, 9, 15, 103, -3])
def test_bad_dims_rejected(d):
    with pytest.raises(prime.UnsupportedDimensionError, match="odd prime"):
        prime.PrimeDim(d)


def test_modint_field_arithmetic():
    dim = prime.PrimeDim(7)
    a = dim.mod(3)
    assert a + 5 == 1
    assert a * 5 == 1
    assert a.inverse() == 5
    assert -a == 4
    assert 2 - a == 6
    with pytest.raises(ZeroDivisionError):
        dim.mod(0).inverse()
    assert {dim.mod(10), dim.mod(3)} == {a}


@settings(max_examples=50, deadline=None)
@given(st.sampled_from([3, 5, 7, 11, 13]), st.integers(-1000, 1000), st.integers(-1000, 1000))
def test_modint_matches_python_mod(d, x, y):
    dim = prime.PrimeDim(d)
    assert int(dim.mod(x) * dim.mod(y)) == (x * y) % d
    assert int(dim.mod(x) - dim.mod(y)) == (x - y) % d
    if x % d:
        assert int(dim.mod(x).inverse() * x) == 1


# ------------------------------------------------------------ operators


@pytest.mark.parametrize("d", [3, 5])
def test_closed_form_operators_match_literal_sum(d):
    for p, q in itertools.product(range(d), repeat=2):
        assert_allclose(prime.phase_point_op(d, p, q), oracles.prime_d_literal(d, p, q), atol=1e-13)


def test_shift_clock_commutation():
    d = 5
    X, Z = prime.shift_clock_ops(d)
    w = np.exp(2j * np.pi / d)
    assert_allclose(Z @ X, w * X @ Z, atol=1e-14)
    assert_allclose(np.linalg.matrix_power(X, d), np.eye(d), atol=1e-14)


@pytest.mark.parametrize("d", [3, 7])
def test_weyl_matches_literal_traces(d):
    rng = np.random.default_rng(d)
    F = rand_grid(rng, d)
    assert_allclose(prime.weyl_to_function(d, F), oracles.prime_weyl_literal(d, F), atol=1e-12)


@pytest.mark.parametrize("d", [3, 5, 13])
def test_weyl_round_trips(d):
    rng = np.random.default_rng(1)
    f = rand_grid(rng, d)
    F = rand_grid(rng, d)
    assert_allclose(prime.weyl_to_function(d, prime.weyl_to_operator(d, f)), f, atol=1e-12)
    assert_allclose(prime.weyl_to_operator(d, prime.weyl_to_function(d, F)), F, atol=1e-12)


def test_weyl_shape_errors():
    with pytest.raises(DimensionError):
        prime.weyl_to_function(3, np.eye(5))
    with pytest.raises(DimensionError):
        prime.weyl_to_operator(3, np.zeros((3, 4)))


def test_hermitian_operator_has_real_symbol():
    rng = np.random.default_rng(2)
    A = rand_grid(rng, 5)
    H = A + A.conj().T
    assert_allclose(prime.weyl_to_function(5, H).imag, 0, atol=1e-13)


def test_pure_state_symbol_sums_to_one():
    rng = np.random.default_rng(3)
    psi = rng.normal(size=7) + 1j * rng.normal(size=7)
    psi /= np.linalg.norm(psi)
    f = prime.weyl_to_function(7, np.outer(psi, psi.conj()))
    assert f.sum() == pytest.approx(1)
    # purity tr rho^2 = d sum f^2
    assert (7 * (f**2).sum()).real == pytest.approx(1)


# ------------------------------------------------------------ star product


@pytest.mark.parametrize("d", [3, 5])
def test_star_direct_matches_literal_sum(d):
    rng = np.random.default_rng(4)
    f, g = rand_grid(rng, d), rand_grid(rng, d)
    lit = oracles.star_literal(d, f, g)
    assert_allclose(prime.star_direct(d, f, g), lit, atol=1e-12)
    assert_allclose(prime.star_operator(d, f, g), lit, atol=1e-12)


def test_star_with_unit():
    d = 7
    rng = np.random.default_rng(5)
    f = rand_grid(rng, d)
    one = np.ones((d, d))
    assert_allclose(prime.star_direct(d, one, f), f, atol=1e-12)
    assert_allclose(prime.star_direct(d, f, one), f, atol=1e-12)


def test_star_of_monomials_is_twisted_product():
    # w^q * w^p picks up the phase w^(1/2) with the halving taken in Z_d
    d = 5
    dim = prime.PrimeDim(d)
    u, v = prime.monomial(dim, 1, 0), prime.monomial(dim, 0, 1)
    uv = prime.star_direct(dim, u, v)
    vu = prime.star_direct(dim, v, u)
    assert_allclose(uv, dim.omega_pow(-dim.half) * u * v, atol=1e-12)
    assert_allclose(uv, dim.omega_pow(-1) * vu, atol=1e-12)


@pytest.mark.parametrize("d", [3, 5, 7])
def test_lattice_bracket_matches_commutator(d):
    rng = np.random.default_rng(6)
    for _ in range(5):
        f, g = rand_grid(rng, d), rand_grid(rng, d)
        assert_allclose(
            prime.moyal_bracket(d, f, g, 0.7, form="lattice"), prime.moyal_bracket(d, f, g, 0.7), atol=1e-11
        )
    with pytest.raises(ValueError):
        prime.moyal_bracket(d, f, g, form="spectral")


def test_lattice_bracket_sine_kernel_literal():
    d = 3
    rng = np.random.default_rng(7)
    f, g = rand_grid(rng, d), rand_grid(rng, d)
    out = np.zeros((d, d), dtype=complex)
    for p, q, r, s, t, u in itertools.product(range(d), repeat=6):
        out[p, q] += f[(p + r) % d, (q + s) % d] * g[(p + t) % d, (q + u) % d] * math.sin(4 * math.pi * (s * t - r * u) / d)
    assert_allclose(prime.moyal_bracket(d, f, g), 2 * out / d**2, atol=1e-12)


# ------------------------------------------------------------ monomials


def test_half_angle_is_defined_mod_d():
    dim = prime.PrimeDim(7)
    for k in range(-20, 20):
        assert prime.half_angle(dim, k) == pytest.approx(prime.half_angle(dim, k + 7))


@pytest.mark.parametrize("d", [5, 7])
def test_monomial_closed_form_random(d):
    rng = np.random.default_rng(8)
    dim = prime.PrimeDim(d)
    for _ in range(30):
        m1, m2 = tuple(rng.integers(0, d, 2)), tuple(rng.integers(0, d, 2))
        comm = prime.moyal_bracket(dim, prime.monomial(dim, *m1), prime.monomial(dim, *m2), hbar=1.3)
        assert_allclose(comm, prime.monomial_bracket_closed_form(dim, m1, m2, hbar=1.3), atol=1e-12)


def test_degenerate_exponents_give_zero():
    dim = prime.PrimeDim(5)
    # alpha delta - beta gamma = 2*3 - 1*6 = 0, and (6, 3) is (1, 3) mod 5
    assert_allclose(prime.monomial_bracket_closed_form(dim, (2, 1), (6, 3)), 0, atol=1e-14)
    comm = prime.moyal_bracket(dim, prime.monomial(dim, 2, 1), prime.monomial(dim, 1, 3))
    assert_allclose(comm, 0, atol=1e-12)


# ------------------------------------------------------------ calculus


def test_translation_matches_operator_conjugation():
    d = 5
    rng = np.random.default_rng(9)
    f = rand_grid(rng, d)
    F = prime.weyl_to_operator(d, f)
    for r, s in [(1, 0), (0, 1), (2, 3)]:
        assert_allclose(
            prime.translate(d, f, r, s), prime.weyl_to_function(d, prime.translate_operator(d, F, r, s)), atol=1e-12
        )


def test_deltas_match_operator_side():
    d = 7
    rng = np.random.default_rng(10)
    f = rand_grid(rng, d)
    F = prime.weyl_to_operator(d, f)
    assert_allclose(prime.delta_p(d, f), prime.delta_p_operator(d, F), atol=1e-12)
    assert_allclose(prime.delta_q(d, f), prime.delta_q_operator(d, F), atol=1e-12)
    assert_allclose(prime.half_shift_partial_p(d, f), prime.half_shift_partial_p_operator(d, f), atol=1e-12)
    assert_allclose(prime.half_shift_partial_q(d, f), prime.half_shift_partial_q_operator(d, f), atol=1e-12)


def test_iterated_delta_composes():
    d = 5
    rng = np.random.default_rng(11)
    f = rand_grid(rng, d)
    expected = prime.delta_q(d, prime.delta_p(d, prime.delta_p(d, f)))
    assert_allclose(prime.iterated_delta(d, f, 2, 1), expected, atol=1e-13)
    with pytest.raises(ValueError):
        prime.iterated_delta(d, f, -1, 0)
    assert prime.delta_inversion_check(d, f, 3, 4)


def test_line_projectors():
    d = 5
    X, _ = prime.shift_clock_ops(d)
    total = np.zeros((d, d), dtype=complex)
    for p in range(d):
        P = prime.line_projector(d, p)
        assert_allclose(P @ P, P, atol=1e-13)
        assert np.trace(P) == pytest.approx(1)
        assert_allclose(P, prime.phase_point_ops(d)[p].sum(axis=0) / d, atol=1e-13)
        # eigenvector of X with eigenvalue w^-p
        assert_allclose(X @ P, np.exp(-2j * np.pi * p / d) * P, atol=1e-13)
        total += P
    assert_allclose(total, np.eye(d), atol=1e-13)


def test_classical_jacobi_fails_at_d3():
    exps, defect = prime.classical_jacobi_witness(3)
    assert defect > 1e-3
    dim = prime.PrimeDim(3)
    fs = [prime.monomial(dim, *e) for e in exps]
    assert np.max(np.abs(prime.jacobi_defect(dim, "classical", *fs))) == pytest.approx(defect)


# ------------------------------------------------------------ canonical maps


def test_canonical_map_validation():
    dim = prime.PrimeDim(5)
    m = prime.CanonicalMap(dim, 1, 2, 3, 8)
    assert (m.alpha, m.beta, m.gamma, m.delta) == (1, 2, 3, 3)
    assert m.determinant == 2
    assert not m.is_symplectic
    with pytest.raises(ValueError, match="zero determinant"):
        prime.apply_canonical(dim, prime.CanonicalMap(dim, 1, 2, 2, 4), np.ones((5, 5)))


def test_canonical_map_on_monomials():
    dim = prime.PrimeDim(7)
    m = prime.CanonicalMap(dim, 2, 1, 3, 2)  # det 1
    assert m.is_symplectic
    z = prime.monomial(dim, 1, 0)
    assert_allclose(prime.apply_canonical(dim, m, z), prime.monomial(dim, 2, 1), atol=1e-13)


@pytest.mark.parametrize("d", [5, 7])
def test_canonical_preservation_via_commutators(d):
    # cross-check the closed-form deviation against brackets computed from operators
    dim = prime.PrimeDim(d)
    rng = np.random.default_rng(12)
    for det, preserved in [(1, True), (2, False)]:
        a = int(rng.integers(1, d))
        b, c = (int(x) for x in rng.integers(0, d, 2))
        m = prime.CanonicalMap(dim, a, b, c, ((det + b * c) * pow(a, -1, d)) % d)
        f, g = prime.monomial(dim, 1, 0), prime.monomial(dim, 0, 1)
        lhs = prime.moyal_bracket(dim, prime.apply_canonical(dim, m, f), prime.apply_canonical(dim, m, g))
        rhs = prime.apply_canonical(dim, m, prime.moyal_bracket(dim, f, g))
        assert bool(np.max(np.abs(lhs - rhs)) < 1e-12) is preserved
        assert prime.canonical_preserves_bracket(dim, m) is preserved
