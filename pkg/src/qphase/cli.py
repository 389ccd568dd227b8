"""Command-line interface: ``qphase {tables,verify,evolve,bracket}``."""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import checks, dynamics, prime, qubit, traceio
from .common import BracketKind, check_hbar
from .matrix import DimensionError

DIM_ERROR = f"dimension must be 2 or an odd prime <= {prime.MAX_DIM}"


class CLIError(Exception):
    """A user-facing error; printed without a traceback."""


# ------------------------------------------------------------- arg types


def dimension(text: str) -> int:
    try:
        d = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(DIM_ERROR) from None
    if d == 2:
        return d
    try:
        prime.PrimeDim(d)
    except ValueError:
        raise argparse.ArgumentTypeError(DIM_ERROR) from None
    return d


def positive_float(text: str) -> float:
    try:
        return check_hbar(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}") from None


def exponent_pair(text: str) -> tuple[int, int]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"exponents must look like 'alpha,beta', got {text!r}")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError:
        raise argparse.ArgumentTypeError(f"exponents must be integers, got {text!r}") from None


# -------------------------------------------------------------- formatting


def _fmt_number(x: float) -> str:
    r = round(x)
    return str(int(r)) if abs(x - r) < 1e-9 else repr(float(x))


def format_entry(z: complex) -> str:
    """``5``, ``-1+2i`` and so on; the imaginary unit is written ``i``."""
    re, im = _fmt_number(z.real), _fmt_number(z.imag)
    if im == "0":
        return re
    if im in ("1", "-1"):
        im = im[:-1]
    sign = "" if im.startswith("-") else "+"
    return f"{re}{sign}{im}i"


def format_pp_page(table: np.ndarray) -> str:
    """Text layout of the ``alpha = (++)`` page: rows gamma, columns beta."""
    order = checks.GOLDEN_PP_ORDER
    lines = ["gamma\\beta " + " ".join(f"{lab:>6}" for lab in order)]
    for lab, row in zip(order, table):
        lines.append(f"{lab:<10} " + " ".join(f"{format_entry(z):>6}" for z in row))
    return "\n".join(lines) + "\n"


def _dump_json(obj, path: Path) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=1, sort_keys=True)
        fh.write("\n")


def _prepare_dir(path) -> Path:
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CLIError(f"cannot create output directory {out}: {exc.strerror}") from None
    return out


# ------------------------------------------------------------- commands


def cmd_tables(args) -> int:
    d = args.dim
    if args.out is None:
        if d != 2:
            raise CLIError("tables for d > 2 need --out DIR")
        sys.stdout.write(format_pp_page(checks.golden_pp_page()))
        return 0
    out = _prepare_dir(args.out)
    try:
        if d == 2:
            ops = {lab: D for lab, D in zip(qubit.LABELS, qubit.PHASE_POINT_OPS)}
            T = qubit.triple_trace_table()
            _dump_json(
                {
                    "points": list(qubit.LABELS),
                    "layout": "T[alpha][beta][gamma] = 16 tr(D_alpha D_beta D_gamma) as [re, im]",
                    "table": [[traceio._pairs(row) for row in plane] for plane in T],
                },
                out / "triple_trace.json",
            )
            (out / "triple_trace_pp.txt").write_text(format_pp_page(checks.golden_pp_page()))
            identities = qubit_trace_report()
        else:
            pd = prime.PrimeDim(d)
            ops = {f"{p},{q}": prime.phase_point_op(pd, p, q) for p in range(d) for q in range(d)}
            identities = {
                "dim": d,
                "traces": {lab: traceio.complex_pair(np.trace(D)) for lab, D in ops.items()},
                "max_deviation": prime_trace_report(d),
            }
        _dump_json(
            {"dim": d, "order": list(ops), "operators": {k: traceio.matrix_to_json(v) for k, v in ops.items()}},
            out / "phase_point_ops.json",
        )
        _dump_json(identities, out / "trace_identities.json")
    except OSError as exc:
        raise CLIError(f"cannot write to {out}: {exc.strerror}") from None
    print(f"wrote tables for d={d} to {out}")
    return 0


def qubit_trace_report() -> dict:
    return {
        "dim": 2,
        "max_deviation": checks.qubit_algebra_deviation(),
        "line_sums": {k: traceio.matrix_to_json(lhs) for k, (lhs, _) in checks.qubit_line_sums().items()},
        "product_trace_identity": qubit.product_trace_identity_check(),
    }


def prime_trace_report(d: int) -> dict:
    return checks.prime_algebra_deviation(d)


def cmd_verify(args) -> int:
    rep = checks.report(args.dim, args.seed)
    for c in rep["checks"]:
        status = "info" if c["informational"] else ("ok" if c["passed"] else "FAIL")
        extra = f"  [{c['detail']}]" if c["detail"] else ""
        print(f"{status:>4}  {c['name']:<42} max_dev={c['max_deviation']:.3e}  tol={c['tolerance']:.0e}{extra}")
    print("all identities hold" if rep["passed"] else "some identities FAILED")
    if args.out:
        try:
            _dump_json(rep, Path(args.out))
        except OSError as exc:
            raise CLIError(f"cannot write report {args.out}: {exc.strerror}") from None
    return 0 if rep["passed"] else 1


def parse_hamiltonian(spec: str | None, d: int) -> dynamics.HamiltonianSpec:
    if spec is None:
        spec = "x" if d == 2 else "free"
    if spec == "x":
        if d != 2:
            raise CLIError("--hamiltonian x is the qubit Hamiltonian; use free or file:PATH for d > 2")
        return dynamics.HamiltonianSpec.qubit_x()
    if spec == "free":
        if d == 2:
            raise CLIError("--hamiltonian free needs an odd prime dimension")
        return dynamics.HamiltonianSpec.free_motion(d)
    if spec.startswith("file:"):
        try:
            m = traceio.load_matrix(spec[5:])
        except (OSError, ValueError) as exc:
            raise CLIError(f"cannot read Hamiltonian from {spec[5:]}: {exc}") from None
        try:
            ham = dynamics.HamiltonianSpec.custom(m)
        except (DimensionError, ValueError) as exc:
            raise CLIError(f"bad Hamiltonian: {exc}") from None
        if ham.dim != d:
            raise CLIError(f"Hamiltonian is {ham.dim}x{ham.dim} but --dim is {d}")
        return ham
    raise CLIError(f"unknown Hamiltonian {spec!r}; expected x, free or file:PATH")


def parse_state(spec: str, d: int) -> np.ndarray:
    """Initial density matrix from ``mixed``, ``bloch:a,b,c``, ``basis:k`` or ``file:PATH``."""
    if spec == "mixed":
        return np.eye(d, dtype=np.complex128) / d
    kind, _, arg = spec.partition(":")
    if kind == "bloch":
        if d != 2:
            raise CLIError("bloch states are only defined for the qubit")
        try:
            a, b, c = (float(x) for x in arg.split(","))
        except ValueError:
            raise CLIError(f"bloch state must be 'bloch:a,b,c', got {spec!r}") from None
        st = qubit.BlochState(a, b, c)
        if not st.is_valid:
            raise CLIError(f"Bloch vector ({a}, {b}, {c}) lies outside the unit ball")
        return st.density_matrix()
    if kind == "basis":
        try:
            k = int(arg)
        except ValueError:
            raise CLIError(f"basis state must be 'basis:k', got {spec!r}") from None
        if not 0 <= k < d:
            raise CLIError(f"basis index {k} out of range for d={d}")
        rho = np.zeros((d, d), dtype=np.complex128)
        rho[k, k] = 1
        return rho
    if kind == "file":
        try:
            rho = traceio.load_matrix(arg)
        except (OSError, ValueError) as exc:
            raise CLIError(f"cannot read state from {arg}: {exc}") from None
        if rho.shape != (d, d):
            raise CLIError(f"state is {rho.shape[0]}x{rho.shape[1]} but --dim is {d}")
        if abs(np.trace(rho) - 1) > 1e-9 or np.max(np.abs(rho - rho.conj().T)) > 1e-9:
            raise CLIError("state must be Hermitian with unit trace")
        return rho
    raise CLIError(f"unknown state {spec!r}; expected mixed, bloch:a,b,c, basis:k or file:PATH")


def cmd_evolve(args) -> int:
    d = args.dim
    ham = parse_hamiltonian(args.hamiltonian, d)
    rho = parse_state(args.state, d)
    space = dynamics.phase_space(d)
    cfg = dynamics.IntegratorConfig(
        step=args.step, method=args.method, bracket=args.bracket, hbar=args.hbar, stride=args.stride
    )
    try:
        trace = dynamics.evolve(ham, space.to_function(rho), args.t_max, cfg)
    except (ValueError, dynamics.IntegrationError) as exc:
        raise CLIError(str(exc)) from None
    if args.out is None:
        sys.stdout.write(traceio.dumps_trace(trace, args.format))
    else:
        try:
            traceio.write_trace(trace, args.out, args.format)
        except OSError as exc:
            raise CLIError(f"cannot write trace {args.out}: {exc.strerror}") from None
        onset = "none" if trace.negativity_onset is None else f"{trace.negativity_onset:g}"
        print(f"wrote {len(trace.times)} samples to {args.out}; negativity onset: {onset}")
    return 0


def cmd_bracket(args) -> int:
    d = args.dim
    if d == 2:
        raise CLIError("monomial brackets need an odd prime dimension")
    dim = prime.PrimeDim(d)
    m1 = tuple(x % d for x in args.f)
    m2 = tuple(x % d for x in args.g)
    f, g = prime.monomial(dim, *m1), prime.monomial(dim, *m2)
    comm = prime.moyal_bracket(dim, f, g, args.hbar)
    closed = prime.monomial_bracket_closed_form(dim, m1, m2, args.hbar)
    k = (m1[0] * m2[1] - m1[1] * m2[0]) % d
    coef = -2 / args.hbar * math.sin(prime.half_angle(dim, k)) + 0.0  # no "-0" in the output
    print(f"d={d} hbar={args.hbar:g} f=w^({m1[0]}q+{m1[1]}p) g=w^({m2[0]}q+{m2[1]}p)")
    print(f"alpha*delta - beta*gamma = {k} (mod {d}); {{f,g}} = {coef:.15g} * f g")
    print(f"{'p':>3} {'q':>3} {'commutator':>44} {'closed form':>44} {'|diff|':>10}")
    worst = 0.0
    for p in range(d):
        for q in range(d):
            a, b = comm[p, q], closed[p, q]
            diff = abs(a - b)
            worst = max(worst, diff)
            print(f"{p:>3} {q:>3} {a.real:>21.15f} {a.imag:>+21.15f}i {b.real:>21.15f} {b.imag:>+21.15f}i {diff:>10.2e}")
    print(f"max |diff| = {worst:.3e}")
    return 0


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qphase", description="Discrete phase-space calculus for qubits and qudits.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, dim_default=2):
        p.add_argument("--dim", type=dimension, default=dim_default, help="2 or an odd prime <= 101")
        p.add_argument("--hbar", type=positive_float, default=1.0)
        p.add_argument("--seed", type=int, default=42)

    p = sub.add_parser("tables", help="write phase-point operators and trace tables")
    common(p)
    p.add_argument("--out", help="output directory (d=2 without --out prints the (++) page)")
    p.set_defaults(func=cmd_tables)

    p = sub.add_parser("verify", help="run the identity suite; exit status 1 on failure")
    common(p)
    p.add_argument("--out", help="write the JSON report here")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("evolve", help="evolve a state and emit its Wigner-function trace")
    common(p)
    p.add_argument("--hamiltonian", help="x (qubit), free (odd prime) or file:PATH")
    p.add_argument("--state", default="mixed", help="mixed, bloch:a,b,c, basis:k or file:PATH")
    p.add_argument("--bracket", choices=[k.value for k in BracketKind], default="moyal")
    p.add_argument("--method", choices=[m.value for m in dynamics.Method], default="rk4")
    p.add_argument("--t-max", type=positive_float, default=1.0)
    p.add_argument("--step", type=positive_float, default=1e-3)
    p.add_argument("--stride", type=int, default=10, help="keep every n-th step")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--out", help="trace file (stdout if omitted)")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("bracket", help="compare a monomial bracket with its closed form")
    common(p, dim_default=3)
    p.add_argument("--f", type=exponent_pair, default=(1, 0), help="exponents alpha,beta of w^(alpha q + beta p)")
    p.add_argument("--g", type=exponent_pair, default=(0, 1), help="exponents gamma,delta")
    p.set_defaults(func=cmd_bracket)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CLIError as exc:
        print(f"qphase: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
