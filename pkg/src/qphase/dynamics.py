"""Hamiltonian evolution of discrete Wigner functions.

Ground truth is the von Neumann equation ``d rho/dt = -(i/hbar)[H, rho]``,
integrated exactly with a matrix exponential. On the phase-space side the same
law reads ``d rho/dt = d {h, rho}`` where ``h`` is the Weyl symbol of ``H`` and
``d`` the Hilbert-space dimension (2 for the qubit). Swapping the Moyal bracket
for the classical one gives the "classical" flow, which is only available to
the RK4 integrator.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import prime, qubit
from .common import BracketKind, check_hbar
from .matrix import DEFAULT_TOL, DimensionError, Tolerance, as_matrix, is_hermitian, mat_exp


class IntegrationError(RuntimeError):
    """The fixed-step integrator drifted beyond what the tolerance allows."""


class HamiltonianKind(str, enum.Enum):
    QUBIT_X = "qubit_x"
    FREE_MOTION = "free"
    CUSTOM = "custom"


class Method(str, enum.Enum):
    RK4 = "rk4"
    EXACT = "exact"


# ------------------------------------------------------------ phase spaces


class _QubitSpace:
    dim = 2
    shape = (4,)
    labels = qubit.LABELS
    # p-lines: eps_prime = -1 -> (--), (+-); eps_prime = +1 -> (-+), (++)
    line_labels = ("p=-1", "p=+1")
    _lines = (np.array([0, 2]), np.array([1, 3]))

    def to_function(self, F):
        return qubit.weyl_to_function(F)

    def to_operator(self, f):
        return qubit.weyl_to_operator(f)

    def bracket(self, kind, f, g, hbar):
        return qubit.bracket(kind, f, g, hbar)

    def line_sums(self, f):
        return np.array([f[idx].sum() for idx in self._lines])

    def check(self, f):
        return qubit.as_function(f)


class _PrimeSpace:
    def __init__(self, d: int):
        self.pdim = prime.PrimeDim(d)
        self.dim = d
        self.shape = (d, d)
        self.labels = tuple(f"{p},{q}" for p in range(d) for q in range(d))
        self.line_labels = tuple(f"p={p}" for p in range(d))

    def to_function(self, F):
        return prime.weyl_to_function(self.pdim, F)

    def to_operator(self, f):
        return prime.weyl_to_operator(self.pdim, f)

    def bracket(self, kind, f, g, hbar):
        return prime.bracket(self.pdim, kind, f, g, hbar)

    def line_sums(self, f):
        return f.sum(axis=1)

    def check(self, f):
        return prime.as_grid(self.pdim, f)


def phase_space(dim: int):
    if dim == 2:
        return _QubitSpace()
    return _PrimeSpace(dim)


# --------------------------------------------------------------- configs


@dataclass(frozen=True)
class HamiltonianSpec:
    kind: HamiltonianKind
    dim: int
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "kind", HamiltonianKind(self.kind))
        m = as_matrix(self.matrix)
        if m.shape != (self.dim, self.dim):
            raise DimensionError(f"Hamiltonian must be {self.dim}x{self.dim}, got {m.shape}")
        if not is_hermitian(m):
            raise ValueError("Hamiltonian is not Hermitian")
        if self.kind is HamiltonianKind.QUBIT_X and self.dim != 2:
            raise ValueError("H = X is the qubit Hamiltonian")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def qubit_x(cls) -> "HamiltonianSpec":
        return cls(HamiltonianKind.QUBIT_X, 2, qubit.X)

    @classmethod
    def free_motion(cls, d: int) -> "HamiltonianSpec":
        """``H = (X + X^dag)/2``, the lattice analogue of ``p^2``."""
        X, _ = prime.shift_clock_ops(d)
        return cls(HamiltonianKind.FREE_MOTION, d, (X + X.conj().T) / 2)

    @classmethod
    def custom(cls, matrix) -> "HamiltonianSpec":
        m = as_matrix(matrix)
        return cls(HamiltonianKind.CUSTOM, m.shape[0], m)

    def symbol(self) -> np.ndarray:
        """Weyl symbol ``h`` of the Hamiltonian."""
        return phase_space(self.dim).to_function(self.matrix)


@dataclass(frozen=True)
class IntegratorConfig:
    step: float = 1e-3
    method: Method = Method.RK4
    bracket: BracketKind = BracketKind.MOYAL
    hbar: float = 1.0
    stride: int = 10
    tol: Tolerance = DEFAULT_TOL

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError("step must be positive")
        if int(self.stride) < 1:
            raise ValueError("stride must be a positive integer")
        object.__setattr__(self, "method", Method(self.method))
        object.__setattr__(self, "bracket", BracketKind(self.bracket))
        object.__setattr__(self, "hbar", check_hbar(self.hbar))
        object.__setattr__(self, "stride", int(self.stride))


@dataclass
class EvolutionTrace:
    """Snapshots of a phase-space trajectory.

    ``snapshots[k]`` is the function at ``times[k]``; ``conserved[k]`` holds the
    sums along the fixed-momentum lines at that time.
    """

    dim: int
    times: np.ndarray
    snapshots: np.ndarray
    conserved: np.ndarray
    negativity_onset: Optional[float] = None
    labels: tuple = ()
    line_labels: tuple = ()

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.snapshots = np.asarray(self.snapshots, dtype=np.complex128)
        self.conserved = np.asarray(self.conserved, dtype=np.complex128)
        if len(self.times) and np.any(np.diff(self.times) <= 0):
            raise ValueError("trace times must be strictly increasing")
        if not self.labels:
            self.labels = phase_space(self.dim).labels
        if not self.line_labels:
            self.line_labels = phase_space(self.dim).line_labels

    def flat(self) -> np.ndarray:
        """Snapshots as ``(n_times, n_points)`` in canonical point order."""
        return self.snapshots.reshape(len(self.times), -1)

    def values_at(self, label: str) -> np.ndarray:
        return self.flat()[:, self.labels.index(label)]

    def total_probability(self) -> np.ndarray:
        return self.flat().sum(axis=1)

    def negative_mask(self, tol: float = 1e-9) -> np.ndarray:
        return np.any(self.flat().real < -tol, axis=1)

    def conserved_drift(self) -> float:
        return float(np.max(np.abs(self.conserved - self.conserved[0])))


# ----------------------------------------------------------------- physics


def rhs(ham: HamiltonianSpec, rho, cfg: IntegratorConfig = IntegratorConfig()) -> np.ndarray:
    """Time derivative of the Wigner function ``rho`` under ``ham``."""
    space = phase_space(ham.dim)
    rho = space.check(rho)
    return space.dim * space.bracket(cfg.bracket, ham.symbol(), rho, cfg.hbar)


def free_motion_rhs_closed_form(d: int, rho, hbar: float = 1.0) -> np.ndarray:
    """``(1/hbar) sin(2 pi p / d) (rho(p, q + 1/2) - rho(p, q - 1/2))``, halves taken in Z_d."""
    dim = prime.PrimeDim(d)
    hbar = check_hbar(hbar)
    P, _ = dim.grid
    h = dim.half
    diff = prime.shifted(dim, rho, 0, h) - prime.shifted(dim, rho, 0, -h)
    return (np.sin(2 * np.pi * P / d) * diff) / hbar


def _generator(ham: HamiltonianSpec, cfg: IntegratorConfig) -> np.ndarray:
    """Matrix of the (linear) phase-space flow on flattened functions."""
    space = phase_space(ham.dim)
    n = int(np.prod(space.shape))
    cols = []
    for j in range(n):
        e = np.zeros(n, dtype=np.complex128)
        e[j] = 1
        cols.append(rhs(ham, e.reshape(space.shape), cfg).ravel())
    return np.stack(cols, axis=1)


def _snapshot_steps(t_max: float, cfg: IntegratorConfig) -> tuple[int, list[int]]:
    n_steps = int(round(t_max / cfg.step))
    if n_steps < 1:
        raise ValueError("t_max must cover at least one step")
    marks = list(range(0, n_steps + 1, cfg.stride))
    if marks[-1] != n_steps:
        marks.append(n_steps)
    return n_steps, marks


def _as_state_function(space, rho0) -> np.ndarray:
    rho0 = np.asarray(rho0, dtype=np.complex128)
    if rho0.shape == space.shape:
        return space.check(rho0)
    if space.dim == 2 and rho0.shape == (2, 2):
        return space.to_function(rho0)
    raise DimensionError(f"initial state has shape {rho0.shape}, expected {space.shape}")


def evolve(ham: HamiltonianSpec, rho0, t_max: float, cfg: IntegratorConfig = IntegratorConfig()) -> EvolutionTrace:
    """Evolve the Wigner function ``rho0`` up to ``t_max``.

    Args:
        ham: Hermitian Hamiltonian.
        rho0: initial phase-space function (or, for the qubit, a 2x2 density
            matrix). It must sum to 1.
        t_max: final time, in units where energies are measured by ``H``.
        cfg: integrator settings. ``method="exact"`` conjugates by
            ``exp(-iHt/hbar)`` and requires the Moyal bracket.

    Raises:
        IntegrationError: if RK4 drifts by more than 10x the dynamic tolerance
            in a conserved quantity.
    """
    if not t_max > 0:
        raise ValueError("t_max must be positive")
    space = phase_space(ham.dim)
    rho0 = _as_state_function(space, rho0)
    tol = cfg.tol
    if abs(rho0.sum() - 1) > tol.dynamic:
        raise ValueError(f"initial state sums to {rho0.sum():.6g}, expected 1")
    n_steps, marks = _snapshot_steps(t_max, cfg)
    times = np.array(marks, dtype=float) * cfg.step

    if cfg.method is Method.EXACT:
        if cfg.bracket is not BracketKind.MOYAL:
            raise ValueError("exact unitary evolution only exists for the Moyal bracket")
        R0 = space.to_operator(rho0)
        H = ham.matrix
        snaps = []
        for t in times:
            U = mat_exp(-1j * H * t / cfg.hbar)
            snaps.append(space.to_function(U @ R0 @ U.conj().T))
        snaps = np.array(snaps)
    else:
        L = _generator(ham, cfg)
        h = cfg.step
        v = rho0.ravel().copy()
        snaps = [v.reshape(space.shape).copy()]
        mark_set = set(marks[1:])
        for k in range(1, n_steps + 1):
            k1 = L @ v
            k2 = L @ (v + 0.5 * h * k1)
            k3 = L @ (v + 0.5 * h * k2)
            k4 = L @ (v + h * k3)
            v = v + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
            if k in mark_set:
                snaps.append(v.reshape(space.shape).copy())
        snaps = np.array(snaps)
        _check_drift(space, ham, cfg, snaps)

    conserved = np.array([space.line_sums(s) for s in snaps])
    trace = EvolutionTrace(
        dim=ham.dim,
        times=times,
        snapshots=snaps,
        conserved=conserved,
        labels=space.labels,
        line_labels=space.line_labels,
    )
    trace.negativity_onset = negativity_onset(trace)
    return trace


def _check_drift(space, ham, cfg, snaps) -> None:
    flat = snaps.reshape(len(snaps), -1)
    limit = 10 * cfg.tol.dynamic
    drifts = {"total probability": np.abs(flat.sum(axis=1) - flat[0].sum())}
    if cfg.bracket is BracketKind.MOYAL:
        h = ham.symbol().ravel()
        energy = flat @ h
        purity = (flat**2).sum(axis=1).real
        drifts["energy"] = np.abs(energy - energy[0])
        drifts["purity"] = np.abs(purity - purity[0])
    for name, series in drifts.items():
        worst = float(np.max(series))
        if not np.isfinite(worst) or worst > limit:
            raise IntegrationError(
                f"RK4 {name} drifted by {worst:.3g} (limit {limit:.3g}) with step {cfg.step}; "
                "reduce the step size"
            )


def negativity_onset(trace: EvolutionTrace, tol: float = 1e-9) -> Optional[float]:
    """First snapshot time at which some value drops below ``-tol``."""
    if len(trace.times) == 0:
        raise ValueError("empty trace")
    hits = np.flatnonzero(trace.negative_mask(tol))
    return float(trace.times[hits[0]]) if hits.size else None


def classical_evolution_qubit(rho0, t_max: float, cfg: IntegratorConfig) -> EvolutionTrace:
    """Integrate the qubit flow of ``H = X`` under the classical bracket."""
    if cfg.bracket is not BracketKind.CLASSICAL:
        raise ValueError("classical evolution needs bracket=classical")
    if cfg.method is not Method.RK4:
        raise ValueError("classical evolution has no unitary counterpart; use RK4")
    return evolve(HamiltonianSpec.qubit_x(), rho0, t_max, cfg)


def purity(dim: int, rho) -> float:
    """``tr rho^2`` from the Wigner function: ``d * sum rho^2``."""
    rho = np.asarray(rho)
    return float((dim * (rho**2).sum()).real)


def fit_oscillation(times, values, offset: float, omega: float = 2.0):
    """Least-squares fit of ``K cos(omega t + phi) + offset``.

    Returns ``(K, phi, residual)`` with ``residual`` the largest absolute
    deviation of the fitted curve from ``values``.
    """
    t = np.asarray(times, dtype=float)
    y = np.asarray(values).real - offset
    A = np.stack([np.cos(omega * t), np.sin(omega * t)], axis=1)
    (c, s), *_ = np.linalg.lstsq(A, y, rcond=None)
    K = float(np.hypot(c, s))
    phi = float(np.arctan2(-s, c))
    residual = float(np.max(np.abs(A @ np.array([c, s]) - y)))
    return K, phi, residual
