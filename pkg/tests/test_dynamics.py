import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

import oracles
from qphase import dynamics, prime, qubit
from qphase.dynamics import HamiltonianSpec, IntegratorConfig


def y_state():
    return qubit.bloch_probabilities(qubit.BlochState(0, 1, 0))


def test_hamiltonian_validation():
    with pytest.raises(ValueError, match="Hermitian"):
        HamiltonianSpec.custom([[0, 1], [0, 0]])
    with pytest.raises(ValueError):
        HamiltonianSpec("qubit_x", 3, np.eye(3))
    h = HamiltonianSpec.qubit_x().symbol()
    assert_allclose(h, [-0.5, 0.5, -0.5, 0.5])


def test_config_validation():
    with pytest.raises(ValueError):
        IntegratorConfig(step=0)
    with pytest.raises(ValueError):
        IntegratorConfig(stride=0)
    with pytest.raises(ValueError):
        IntegratorConfig(hbar=-1)
    with pytest.raises(ValueError):
        IntegratorConfig(method="euler")
    assert IntegratorConfig(bracket="classical").bracket.value == "classical"


def test_rhs_mixed_state_vanishes():
    assert_allclose(dynamics.rhs(HamiltonianSpec.qubit_x(), np.full(4, 0.25)), 0, atol=1e-15)


def test_qubit_rhs_matches_von_neumann():
    rng = np.random.default_rng(0)
    ham = HamiltonianSpec.qubit_x()
    for _ in range(10):
        a, b, c = rng.normal(size=3) / 3
        rho = qubit.BlochState(a, b, c).density_matrix()
        expected = qubit.weyl_to_function(-1j * (qubit.X @ rho - rho @ qubit.X))
        assert_allclose(dynamics.rhs(ham, qubit.weyl_to_function(rho)), expected, atol=1e-14)


def test_qubit_rhs_couples_with_unit_coefficients():
    # d rho_{++}/dt involves rho_{+-} and rho_{--} with coefficients of modulus 1
    ham = HamiltonianSpec.qubit_x()
    L = dynamics._generator(ham, IntegratorConfig())
    row = dict(zip(qubit.LABELS, L[qubit.LABELS.index("++")].real))
    assert abs(row["+-"]) == pytest.approx(1)
    assert row["--"] == pytest.approx(-row["+-"])
    assert row["++"] == pytest.approx(0)
    assert row["-+"] == pytest.approx(0)


def test_prime_rhs_matches_von_neumann():
    d = 5
    rng = np.random.default_rng(1)
    A = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    H = A + A.conj().T
    ham = HamiltonianSpec.custom(H)
    psi = rng.normal(size=d) + 1j * rng.normal(size=d)
    psi /= np.linalg.norm(psi)
    R = np.outer(psi, psi.conj())
    expected = prime.weyl_to_function(d, -1j * (H @ R - R @ H))
    assert_allclose(dynamics.rhs(ham, prime.weyl_to_function(d, R)), expected, atol=1e-12)


def test_free_motion_rhs_at_d3():
    d = 3
    rng = np.random.default_rng(2)
    rho = rng.normal(size=(d, d))
    rho /= rho.sum()
    ham = HamiltonianSpec.free_motion(d)
    for hbar in (0.5, 1.0, 2.0):
        got = dynamics.rhs(ham, rho, IntegratorConfig(hbar=hbar))
        assert_allclose(got, dynamics.free_motion_rhs_closed_form(d, rho, hbar), atol=1e-12)


def test_exact_evolution_matches_bloch_rotation():
    cfg = IntegratorConfig(step=1e-2, method="exact")
    trace = dynamics.evolve(HamiltonianSpec.qubit_x(), y_state(), 5.0, cfg)
    for t, snap in zip(trace.times, trace.snapshots):
        assert_allclose(snap, oracles.qubit_wigner_from_bloch(*oracles.qubit_bloch_under_x(0, 1, 0, t)), atol=1e-12)


def test_oscillation_offset_is_half_the_line_sum():
    # d^2 rho_{++}/dt^2 = 2A - 4 rho_{++}: the centre of oscillation is A/2
    cfg = IntegratorConfig(step=1e-2, method="exact")
    for bloch in [(0, 1, 0), (0.3, -0.2, 0.5), (0.6, 0.0, -0.7)]:
        rho0 = qubit.bloch_probabilities(qubit.BlochState(*bloch))
        trace = dynamics.evolve(HamiltonianSpec.qubit_x(), rho0, 10.0, cfg)
        A = (rho0[3] + rho0[1]).real
        K, phi, res = dynamics.fit_oscillation(trace.times, trace.values_at("++"), offset=A / 2)
        assert res < 1e-10
        # rho_{++} = (1 + a + b(t) + c(t))/4 and b + c rotates with amplitude sqrt(2) |(b, c)|
        assert K == pytest.approx(math.sqrt(2) * math.hypot(bloch[1], bloch[2]) / 4)


def test_second_derivative_relation():
    cfg = IntegratorConfig(step=1e-3, method="exact", stride=1)
    rho0 = qubit.bloch_probabilities(qubit.BlochState(0.3, -0.2, 0.5))
    trace = dynamics.evolve(HamiltonianSpec.qubit_x(), rho0, 2.0, cfg)
    r = trace.values_at("++").real
    A = (rho0[3] + rho0[1]).real
    h = 1e-3
    second = (r[2:] - 2 * r[1:-1] + r[:-2]) / h**2
    assert_allclose(second, 2 * A - 4 * r[1:-1], atol=1e-5)


def test_unphysical_initial_data_goes_negative_at_once():
    rho0 = qubit.bloch_probabilities(qubit.BlochState(1, 1, 1))
    cfg = IntegratorConfig(step=1e-3, method="rk4", stride=1)
    trace = dynamics.evolve(HamiltonianSpec.qubit_x(), rho0, 0.1, cfg)
    assert trace.negativity_onset is not None and trace.negativity_onset <= 2e-3
    assert trace.values_at("--")[1].real < 0


def test_mixed_state_has_no_negativity():
    cfg = IntegratorConfig(step=1e-2)
    trace = dynamics.evolve(HamiltonianSpec.qubit_x(), np.full(4, 0.25), 1.0, cfg)
    assert trace.negativity_onset is None
    assert_allclose(trace.flat(), 0.25, atol=1e-14)


def test_rk4_matches_exact_at_prime_d():
    d = 7
    rng = np.random.default_rng(3)
    psi = rng.normal(size=d) + 1j * rng.normal(size=d)
    psi /= np.linalg.norm(psi)
    rho0 = prime.weyl_to_function(d, np.outer(psi, psi.conj()))
    ham = HamiltonianSpec.free_motion(d)
    rk = dynamics.evolve(ham, rho0, 5.0, IntegratorConfig(step=1e-3, stride=100))
    ex = dynamics.evolve(ham, rho0, 5.0, IntegratorConfig(step=1e-3, stride=100, method="exact"))
    assert np.max(np.abs(rk.snapshots - ex.snapshots)) < 1e-6
    # purity and energy are constant
    pur = [dynamics.purity(d, s) for s in ex.snapshots]
    assert_allclose(pur, 1, atol=1e-10)


def test_large_step_raises_with_diagnostic():
    cfg = IntegratorConfig(step=0.9, stride=1)
    with pytest.raises(dynamics.IntegrationError, match="reduce the step"):
        dynamics.evolve(HamiltonianSpec.qubit_x(), y_state(), 30.0, cfg)


def test_evolve_input_validation():
    with pytest.raises(ValueError, match="sums to"):
        dynamics.evolve(HamiltonianSpec.qubit_x(), np.zeros(4), 1.0)
    with pytest.raises(ValueError):
        dynamics.evolve(HamiltonianSpec.qubit_x(), y_state(), 0.0)
    with pytest.raises(ValueError, match="Moyal"):
        dynamics.evolve(HamiltonianSpec.qubit_x(), y_state(), 1.0, IntegratorConfig(method="exact", bracket="classical"))
    with pytest.raises(Exception):
        dynamics.evolve(HamiltonianSpec.qubit_x(), np.ones((3, 3)) / 9, 1.0)


def test_accepts_density_matrix_for_qubit():
    rho = qubit.BlochState(0, 1, 0).density_matrix()
    tr = dynamics.evolve(HamiltonianSpec.qubit_x(), rho, 0.1, IntegratorConfig(step=1e-2))
    assert_allclose(tr.snapshots[0], y_state())


def test_snapshot_stride_includes_endpoint():
    tr = dynamics.evolve(HamiltonianSpec.qubit_x(), y_state(), 0.1, IntegratorConfig(step=1e-2, stride=4))
    assert_allclose(tr.times, [0, 0.04, 0.08, 0.1], atol=1e-12)


# ------------------------------------------------------------ classical flow


def classical_cfg(**kw):
    return IntegratorConfig(bracket="classical", stride=1, **kw)


def test_classical_plus_line_relaxes_to_half():
    # on the p=+1 pair d rho_{++}/dt = A - 2 rho_{++}
    rho0 = qubit.bloch_probabilities(qubit.BlochState(0.4, 0.3, 0.2))
    tr = dynamics.classical_evolution_qubit(rho0, 8.0, classical_cfg(step=1e-3))
    A = (rho0[3] + rho0[1]).real
    t = tr.times
    r0 = rho0[3].real
    assert_allclose(tr.values_at("++").real, A / 2 + (r0 - A / 2) * np.exp(-2 * t), atol=1e-9)


def test_classical_pairs_decouple():
    base = qubit.bloch_probabilities(qubit.BlochState(0.4, 0.3, 0.2))
    bumped = base.copy()
    bumped[0] += 0.05
    bumped[2] -= 0.05  # moves weight inside the p=-1 pair only
    cfg = classical_cfg(step=1e-3)
    t1 = dynamics.classical_evolution_qubit(base, 0.5, cfg)
    t2 = dynamics.classical_evolution_qubit(bumped, 0.5, cfg)
    for lab in ("++", "-+"):
        assert_allclose(t1.values_at(lab), t2.values_at(lab), atol=1e-14)


def test_classical_minus_line_is_unstable():
    # on the p=-1 pair the same bracket gives d u/dt = +2u for u = rho_{+-} - rho_{--}, so
    # positive data can turn negative; positivity is not preserved in general
    rho0 = qubit.bloch_probabilities(qubit.BlochState(0.0, 0.3, -0.2))
    tr = dynamics.classical_evolution_qubit(rho0, 1.0, classical_cfg(step=1e-4))
    u = (tr.values_at("+-") - tr.values_at("--")).real
    assert_allclose(u, u[0] * np.exp(2 * tr.times), rtol=1e-9)
    assert tr.negativity_onset is not None
    assert min(rho0.real) >= 0


def test_classical_requires_rk4():
    with pytest.raises(ValueError):
        dynamics.classical_evolution_qubit(y_state(), 1.0, IntegratorConfig())
    with pytest.raises(ValueError):
        dynamics.classical_evolution_qubit(y_state(), 1.0, IntegratorConfig(bracket="classical", method="exact"))


def test_fit_oscillation_recovers_parameters():
    t = np.linspace(0, 5, 200)
    K, phi, res = dynamics.fit_oscillation(t, 0.3 * np.cos(2 * t + 0.4) + 0.1, offset=0.1)
    assert K == pytest.approx(0.3)
    assert phi == pytest.approx(0.4)
    assert res < 1e-12
