"""
Command-line entry point.

Subcommands: ``verify``, ``dmat``, ``curve``, ``fig2``, ``estimate``. Output is
CSV (header row, 17 significant digits) or JSON (``{"meta": ..., "data": ...}``).
Exit codes: 0 success, 1 verification failure, 2 usage error, 3 numerical
integrity error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .dynamics import PhaseConfig
from .errors import CapabilityError, DomainError, NumericalIntegrityError
from .estimation import PRNG_NAME, crb_report
from .metrology import (
    cfi_from_distribution,
    cfi_parity,
    dpc_distribution,
    h_joo,
    qfi_ensemble,
)
from .states import PhotonSectorEnsemble, ec_ensemble, noon
from .wigner import (
    EulerAngles,
    HalfInt,
    ORACLE_MAX_TWICE_J,
    ParitySelector,
    d_matrix,
    d_matrix_oracle,
    parity_orthogonality_contract,
    parity_orthogonality_matrix,
    symmetry_negate_column,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INTEGRITY = 0, 1, 2, 3
CONFIGS = {"single": PhaseConfig.SINGLE_ARM, "balanced": PhaseConfig.BALANCED}
ORACLE_BETAS = (0.0, 1e-3, math.pi / 4, math.pi / 2, math.pi - 1e-3, math.pi)


class UsageError(Exception):
    pass


# --- output -----------------------------------------------------------------

def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    if isinstance(x, str):
        return x
    return format(float(x), ".17g")


def write_table(columns: dict, meta: dict, fmt: str, out) -> None:
    """Emit equal-length columns as CSV or as ``{"meta", "data"}`` JSON."""
    if fmt == "json":
        data = {k: [v if isinstance(v, str) else _jsonable(v) for v in col] for k, col in columns.items()}
        json.dump({"meta": meta, "data": data}, out, indent=2)
        out.write("\n")
        return
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(list(columns))
    for row in zip(*columns.values()):
        writer.writerow([_fmt(v) for v in row])


def _jsonable(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _meta(args, **extra) -> dict:
    meta = {
        "version": __version__,
        "command": args.command,
        "seed": getattr(args, "seed", None),
        "truncation_residual": 0.0,
    }
    meta.update(extra)
    return meta


# --- helpers ----------------------------------------------------------------

def _phi_grid(args) -> np.ndarray:
    if args.steps < 2:
        raise UsageError("--steps must be at least 2")
    if not args.phi_max > args.phi_min:
        raise UsageError("--phi-max must exceed --phi-min")
    return np.linspace(args.phi_min, args.phi_max, args.steps)


def _probe(args) -> PhotonSectorEnsemble:
    if args.probe == "noon":
        if args.n is None:
            raise UsageError("--probe noon needs --n")
        return PhotonSectorEnsemble.pure(noon(args.n))
    if args.alpha is None:
        raise UsageError("--probe ec needs --alpha")
    return ec_ensemble(args.alpha, args.tail_tol)


def _fisher(probe, phi, config, measurement) -> float:
    if measurement == "dpc":
        return cfi_from_distribution(dpc_distribution(probe, phi, config)).value
    return cfi_parity(probe, phi, config).value


# --- commands ---------------------------------------------------------------

def _worst(record: dict, residual: float, case: dict) -> None:
    if residual > record["max_residual"]:
        record["max_residual"] = float(residual)
        record["worst_case"] = case


def run_verify(max_n: int, tol: float, seed: int) -> dict:
    """Evaluate the Wigner-matrix identities and return per-identity residuals."""
    rng = np.random.default_rng(seed)
    names = ("parity_sum", "parity_total", "unitarity", "oracle", "symmetry")
    recs = {n: {"identity": n, "max_residual": 0.0, "worst_case": None} for n in names}
    diag = [math.inf, -math.inf]

    for N in range(max_n + 1):
        m = (N - 2 * np.arange(N + 1)) / 2
        for _ in range(10):
            alpha, gamma = rng.uniform(0, 2 * math.pi, 2)
            total = 0
            for sel in ParitySelector:
                got = parity_orthogonality_matrix(N, sel, alpha, gamma)
                err = np.abs(got - parity_orthogonality_contract(N, sel, gamma))
                r, c = np.unravel_index(np.argmax(err), err.shape)
                _worst(recs["parity_sum"], err[r, c], {
                    "N": N, "parity": sel.name.lower(), "m": m[r], "m_prime": m[c],
                    "alpha": alpha, "gamma": gamma})
                off_zero = m != 0
                d = got.diagonal().real[off_zero]
                if d.size:
                    diag[0], diag[1] = min(diag[0], d.min()), max(diag[1], d.max())
                total = total + got
            err = np.abs(total - np.eye(N + 1))
            r, c = np.unravel_index(np.argmax(err), err.shape)
            _worst(recs["parity_total"], err[r, c], {
                "N": N, "m": m[r], "m_prime": m[c], "alpha": alpha, "gamma": gamma})

    for tj in range(max_n + 1):
        betas = [math.pi / 2] + list(rng.uniform(0, math.pi, 20))
        for beta in betas:
            alpha, gamma = rng.uniform(0, 2 * math.pi, 2)
            angles = EulerAngles(alpha, beta, gamma)
            res = d_matrix(HalfInt(tj), angles).unitarity_residual()
            _worst(recs["unitarity"], res, {"j": str(HalfInt(tj)), "angles": list(angles)})

    for tj in range(min(max_n, ORACLE_MAX_TWICE_J) + 1):
        for beta in ORACLE_BETAS:
            got = d_matrix(HalfInt(tj), EulerAngles.ry(beta)).entries
            ref = d_matrix_oracle(HalfInt(tj), beta).entries
            _worst(recs["oracle"], np.abs(got - ref).max(), {"j": str(HalfInt(tj)), "beta": beta})
        alpha = float(rng.uniform(0, 2 * math.pi))
        for tmu in range(-tj, tj + 1, 2):
            for tm in range(-tj, tj + 1, 2):
                lhs, rhs = symmetry_negate_column(HalfInt(tj), HalfInt(tmu), HalfInt(tm), alpha, 0.0)
                _worst(recs["symmetry"], abs(lhs - rhs), {
                    "j": str(HalfInt(tj)), "mu": str(HalfInt(tmu)), "m": str(HalfInt(tm))})

    for rec in recs.values():
        rec["passed"] = bool(rec["max_residual"] <= tol)
    recs["parity_sum"]["diagonal_range_m_nonzero"] = diag if diag[0] <= diag[1] else None
    return {"identities": list(recs.values()), "passed": all(r["passed"] for r in recs.values())}


def cmd_verify(args, out) -> int:
    if args.max_n < 0:
        raise UsageError("--max-n must be non-negative")
    report = run_verify(args.max_n, args.tol, args.seed)
    meta = _meta(args, max_n=args.max_n, tol=args.tol)
    if args.format == "csv":
        write_table(
            {
                "identity": [r["identity"] for r in report["identities"]],
                "max_residual": [r["max_residual"] for r in report["identities"]],
                "passed": [str(r["passed"]).lower() for r in report["identities"]],
            },
            meta, "csv", out,
        )
    else:
        json.dump({"meta": meta, "data": _jsonable_tree(report)}, out, indent=2)
        out.write("\n")
    return EXIT_OK if report["passed"] else EXIT_FAIL


def _jsonable_tree(obj):
    if isinstance(obj, dict):
        return {k: _jsonable_tree(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable_tree(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def cmd_dmat(args, out) -> int:
    j = HalfInt.of(args.j)
    D = d_matrix(j, EulerAngles(args.euler_alpha, args.beta, args.euler_gamma))
    m = D.m_values
    rows, cols = np.meshgrid(m, m, indexing="ij")
    columns = {
        "m_row": rows.ravel(),
        "m_col": cols.ravel(),
        "real": D.entries.real.ravel(),
        "imag": D.entries.imag.ravel(),
    }
    write_table(columns, _meta(args, j=str(j), unitarity_residual=D.unitarity_residual()),
                args.format, out)
    return EXIT_OK


def cmd_curve(args, out) -> int:
    phis = _phi_grid(args)
    probe = _probe(args)
    config = CONFIGS[args.config]
    values = [_fisher(probe, phi, config, args.measurement) for phi in phis]
    qfi = qfi_ensemble(probe, config).value
    columns = {"phi": phis, "cfi": values, "qfi": [qfi] * len(phis)}
    meta = _meta(args, probe=args.probe, measurement=args.measurement, config=args.config,
                 truncation_residual=probe.truncation_residual)
    write_table(columns, meta, args.format, out)
    return EXIT_OK


def fig2_table(alpha: float, phis, tail_tol: float = 1e-12) -> tuple[dict, float]:
    """Columns of the entangled-coherent CFI comparison at amplitude ``alpha``."""
    probe = ec_ensemble(alpha, tail_tol)
    config = PhaseConfig.SINGLE_ARM
    dpc = [cfi_from_distribution(dpc_distribution(probe, phi, config)).value for phi in phis]
    parity = [cfi_parity(probe, phi, config).value for phi in phis]
    qfi = qfi_ensemble(probe, config).value
    joo = h_joo(alpha)
    columns = {
        "phi": list(phis),
        "cfi_dpc": dpc,
        "cfi_parity": parity,
        "qfi_ec": [qfi] * len(phis),
        "h_joo": [joo] * len(phis),
    }
    return columns, probe.truncation_residual


def cmd_fig2(args, out) -> int:
    phis = _phi_grid(args)
    alpha = math.sqrt(5) if args.alpha is None else args.alpha
    columns, residual = fig2_table(alpha, phis, args.tail_tol)
    write_table(columns, _meta(args, alpha=alpha, truncation_residual=residual), args.format, out)
    return EXIT_OK


def cmd_estimate(args, out) -> int:
    probe = _probe(args)
    if args.nu < 1 or args.trials < 2:
        raise UsageError("--nu must be >= 1 and --trials >= 2")
    rep = crb_report(probe, CONFIGS[args.config], args.phi, args.nu, args.trials, args.seed)
    record = rep.as_dict()
    record.pop("prng")
    bracket = record.pop("bracket")
    record["bracket_lo"], record["bracket_hi"] = bracket
    columns = {k: [v] for k, v in record.items()}
    meta = _meta(args, prng=PRNG_NAME, probe=args.probe,
                 truncation_residual=probe.truncation_residual)
    write_table(columns, meta, args.format, out)
    return EXIT_OK


# --- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wigmetro", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fmt="csv"):
        p.add_argument("--format", choices=("csv", "json"), default=fmt)
        p.add_argument("--out", metavar="PATH", help="output file (default: stdout)")

    def sweep(p, lo=1e-4, hi=3.0, steps=300):
        p.add_argument("--phi-min", type=float, default=lo)
        p.add_argument("--phi-max", type=float, default=hi)
        p.add_argument("--steps", type=int, default=steps)

    def probe(p):
        p.add_argument("--probe", choices=("noon", "ec"), default="noon")
        p.add_argument("--n", type=int, help="photon number of a NOON probe")
        p.add_argument("--alpha", type=float, help="coherent amplitude of an EC probe")
        p.add_argument("--tail-tol", type=float, default=1e-12)
        p.add_argument("--config", choices=tuple(CONFIGS), default="single")

    p = sub.add_parser("verify", help="check orthogonality, unitarity and symmetry identities")
    p.add_argument("--max-n", type=int, default=50)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--seed", type=int, default=7)
    common(p, fmt="json")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("dmat", help="dump a Wigner D-matrix")
    p.add_argument("--j", required=True, help="angular momentum, e.g. 3/2")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--euler-alpha", type=float, default=0.0)
    p.add_argument("--euler-gamma", type=float, default=0.0)
    common(p)
    p.set_defaults(func=cmd_dmat)

    p = sub.add_parser("curve", help="Fisher information versus phase")
    probe(p)
    p.add_argument("--measurement", choices=("dpc", "parity"), default="dpc")
    sweep(p)
    common(p)
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("fig2", help="EC-state CFI curves (DPC, parity) with QFI references")
    p.add_argument("--alpha", type=float, default=None, help="default sqrt(5)")
    p.add_argument("--tail-tol", type=float, default=1e-12)
    sweep(p)
    common(p)
    p.set_defaults(func=cmd_fig2)

    p = sub.add_parser("estimate", help="Monte-Carlo MLE against the Cramer-Rao bound")
    probe(p)
    p.add_argument("--phi", type=float, default=0.3)
    p.add_argument("--nu", type=int, default=10_000)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=1)
    common(p)
    p.set_defaults(func=cmd_estimate)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    out = open(args.out, "w", newline="") if args.out else io.StringIO()
    try:
        code = args.func(args, out)
    except (UsageError, DomainError, CapabilityError) as exc:
        print(f"wigmetro {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalIntegrityError as exc:
        print(f"wigmetro {args.command}: numerical integrity failure: {exc}", file=sys.stderr)
        return EXIT_INTEGRITY
    finally:
        if args.out:
            out.close()
    if not args.out:
        sys.stdout.write(out.getvalue())
    return code


if __name__ == "__main__":
    sys.exit(main())
