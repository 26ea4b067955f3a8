"""Command-line entry point.

Every subcommand echoes its configuration and seed in its output and
exits 0 only when all executed checks pass (1 on a failed check, 2 on a
usage or input error). ``QINFERENCE_SEED`` sets the default seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import classical, quantum
from .boolean import boolean_closure, verify_boolean_identities
from .errors import ConditioningOnNullError, InputError, NonCommutingError, OracleStarvationError
from .io import load_operators, to_csv
from .linalg import MAX_DIM, DensityMatrix, Projector
from .oracle import delta_oracle, sample_proposition, sample_sequential
from .report import AxiomReport

SEED_ENV = "QINFERENCE_SEED"


@dataclass
class RunConfig:
    seed: int = 0
    dims: list = field(default_factory=lambda: [3, 4, 5])
    trials: int = 1000
    tolerances: dict = field(default_factory=dict)
    out: str | None = None
    report: str | None = None

    def __post_init__(self):
        for d in self.dims:
            if not 2 <= d <= MAX_DIM:
                raise InputError(f"dimension {d} outside [2, {MAX_DIM}]")
        if self.trials < 1:
            raise InputError("trials must be >= 1")


def _default_seed() -> int:
    try:
        return int(os.environ.get(SEED_ENV, "0"))
    except ValueError:
        return 0


def _dims(text: str) -> list:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad dimension list {text!r}") from exc


def _write(path, text: str):
    if path in (None, "-"):
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")


def _emit_report(report: AxiomReport, path):
    _write(path, report.to_json())
    for line in report.summary_lines():
        print(line, file=sys.stderr)
    return 0 if report.passed else 1


def cmd_verify_classical(args) -> int:
    report = classical.classical_suite(args.tables, range(args.n_min, args.n_max + 1), args.seed,
                                       args.tol, args.sample_budget)
    return _emit_report(report, args.out)


def cmd_verify_quantum(args) -> int:
    cfg = RunConfig(seed=args.seed, dims=args.dims, trials=args.trials, out=args.out)
    report = quantum.quantum_suite(cfg.dims, cfg.trials, cfg.seed,
                                   frame_resolutions=args.frame_resolutions)
    return _emit_report(report, cfg.out)


def _select(ops: dict, labels):
    try:
        return [ops[x] for x in labels]
    except KeyError as exc:
        raise InputError(f"operator {exc} not found; available: {sorted(ops)}") from exc


def cmd_closure(args) -> int:
    ops = load_operators(args.input)
    labels = args.labels.split(",") if args.labels else list(ops)
    gens = [Projector(m) for m in _select(ops, labels)]
    dim = next(iter(ops.values())).shape[0]
    algebra = boolean_closure(gens, labels=labels, dim=dim)
    report = verify_boolean_identities(algebra, args.tol, seed=args.seed)
    doc = json.loads(algebra.to_json())
    doc["n_atoms"] = algebra.n_atoms
    doc["n_elements"] = algebra.n_elements
    doc["generator_masks"] = {lab: algebra.mask_of(g) for lab, g in zip(labels, gens)}
    doc["elements"] = [format(mask, f"0{max(algebra.n_atoms, 1)}b") for mask in range(algebra.n_elements)]
    doc["report"] = report.to_dict()
    _write(args.out, json.dumps(doc, indent=2, sort_keys=True))
    print(f"{algebra.n_atoms} atoms, {algebra.n_elements} elements", file=sys.stderr)
    return 0 if report.passed else 1


def cmd_lueders(args) -> int:
    ops = load_operators(args.input)
    rho, p, q = _select(ops, [args.rho, args.p, args.q])
    val = quantum.lueders(DensityMatrix(rho), Projector(p), Projector(q))
    doc = {"command": "lueders", "rho": args.rho, "p": args.p, "q": args.q,
           "value": val.value, "numerator": val.numerator, "denominator": val.denominator}
    _write(args.out, json.dumps(doc, indent=2, sort_keys=True))
    return 0


def cmd_born(args) -> int:
    ops = load_operators(args.input)
    rho, p = _select(ops, [args.rho, args.p])
    doc = {"command": "born", "rho": args.rho, "p": args.p,
           "value": quantum.born(DensityMatrix(rho), Projector(p))}
    _write(args.out, json.dumps(doc, indent=2, sort_keys=True))
    return 0


DELTA_HEADER = ["r", "convention", "delta", "pr_joint", "pr_first", "pr_second",
                "reference_closed_form", "note", "oracle_delta", "oracle_stderr"]


def cmd_delta_curve(args) -> int:
    conventions = quantum.CONVENTIONS if args.convention == "both" else (args.convention,)
    oracle_rs = [float(x) for x in args.oracle_r.split(",")] if args.oracle else []
    report = AxiomReport("delta-curve", seed=args.seed,
                         config={"r_steps": args.r_steps, "conventions": list(conventions),
                                 "oracle": args.oracle, "oracle_r": oracle_rs})
    rows = []
    for conv in conventions:
        curve = quantum.delta_curve(args.r_steps, conv)
        numeric = [rec for rec in curve if rec.delta is not None]
        for rec in curve:
            od = ose = None
            if args.oracle and rec.delta is not None and any(abs(rec.r - x) < 1e-12 for x in oracle_rs):
                fam = quantum.two_qubit_family(rec.r)
                est = delta_oracle(fam.rho, fam.P, fam.Q, fam.R, conv, args.oracle, args.seed)
                od, ose = est.value, est.stderr
                report.observe(f"{conv}:oracle_5sigma", abs(est.value - rec.delta) / max(est.stderr, 1e-13),
                               5.0, "Δ from sampled frequencies", f"r={rec.r}")
            comps = rec.component_values() if rec.delta is not None else (None, None, None)
            rows.append([rec.r, conv, rec.delta, *comps, quantum.reference_closed_form(rec.r),
                         rec.note, od, ose])
        if numeric:
            end = [rec for rec in numeric if rec.r == 1.0]
            if end:
                report.observe(f"{conv}:delta_at_r1", abs(end[0].delta), 1e-12,
                               "Δ = 0 for the completely mixed case r = 1")
            report.observe(f"{conv}:affine_fit",
                           quantum.affine_fit_residual([x.r for x in numeric], [x.delta for x in numeric]),
                           1e-10, "Δ(r) affine in r")
            start = [rec for rec in numeric if rec.r == 0.0]
            if start:
                report.notes[f"{conv}:delta_at_r0"] = start[0].delta
                report.notes[f"{conv}:reference_closed_form_r0"] = quantum.reference_closed_form(0.0)
                report.notes[f"{conv}:discrepancy_r0"] = start[0].delta - quantum.reference_closed_form(0.0)
        else:
            report.skip(f"{conv}:delta_at_r1", 1e-12, "Δ = 0 for the completely mixed case r = 1",
                        len(curve))
            report.notes[f"{conv}:degenerate"] = curve[0].note
    _write(args.out, to_csv(DELTA_HEADER, rows))
    if args.report:
        _write(args.report, report.to_json())
    for line in report.summary_lines():
        print(line, file=sys.stderr)
    return 0 if report.passed else 1


SCAN_HEADER = ["rank", "trial", "purity_mix", "convention", "delta", "pr_joint", "pr_first", "pr_second"]


def cmd_delta_scan(args) -> int:
    result = quantum.delta_scan(args.dim, args.trials, (args.purity_min, args.purity_max), args.seed,
                                args.commuting, args.convention)
    shown = result[: args.top] if args.top else result
    rows = [[i, rec.index, rec.r, rec.convention, rec.delta, *rec.component_values()]
            for i, rec in enumerate(shown)]
    _write(args.out, to_csv(SCAN_HEADER, rows))
    summary = {"config": result.config, "records": len(result),
               "rejected_commuting": result.rejected_commuting, "rejected_null": result.rejected_null,
               "max_abs_delta": abs(result[0].delta) if result else None}
    print(json.dumps(summary, sort_keys=True), file=sys.stderr)
    return 0


def cmd_mc_oracle(args) -> int:
    ops = load_operators(args.input)
    rho = DensityMatrix(_select(ops, [args.rho])[0])
    p = Projector(_select(ops, [args.p])[0])
    report = AxiomReport("mc-oracle", seed=args.seed, config={"n": args.n, "rho": args.rho,
                                                              "p": args.p, "q": args.q})
    if args.q:
        q = Projector(_select(ops, [args.q])[0])
        run = sample_sequential(rho, q, p, args.n, args.seed)
        exact = quantum.lueders(rho, p, q).value
        weight = quantum.born(rho, q)
        acc_se = np.sqrt(weight * (1 - weight) / args.n)
        report.observe("acceptance_5sigma", abs(run.acceptance - weight), max(5 * acc_se, 1e-12),
                       "acceptance → tr(ρQ)")
    else:
        run = sample_proposition(rho, p, args.n, args.seed)
        exact = quantum.born(rho, p)
    report.observe("estimate_5sigma", abs(run.estimate - exact), max(5 * run.stderr, 1e-12),
                   "Pr(P|Q) = tr(QρQP)/tr(ρQ)")
    report.notes["run"] = run.to_dict()
    report.notes["exact"] = exact
    return _emit_report(report, args.out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qinference",
                                     description="Verify probability axioms, Lüders/Born rules and "
                                                 "product-rule violations for projector logics.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, out_help="output path (default stdout)"):
        p.add_argument("--seed", type=int, default=_default_seed(),
                       help=f"random seed (default ${SEED_ENV} or 0)")
        p.add_argument("--out", default=None, help=out_help)
        return p

    p = common(sub.add_parser("verify-classical", help="Kolmogorov / Rényi / Cox suites"))
    p.add_argument("--tables", type=int, default=100)
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--n-max", type=int, default=8)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--sample-budget", type=int, default=20000)
    p.set_defaults(func=cmd_verify_classical)

    p = common(sub.add_parser("verify-quantum", help="quantum Rényi + frame additivity suites"))
    p.add_argument("--dims", type=_dims, default=[3, 4, 5])
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--frame-resolutions", type=int, default=100)
    p.set_defaults(func=cmd_verify_quantum)

    p = common(sub.add_parser("closure", help="Boolean closure of operators from a JSON file"))
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--labels", default=None, help="comma-separated generator labels (default all)")
    p.add_argument("--tol", type=float, default=1e-11)
    p.set_defaults(func=cmd_closure)

    for name, fn in (("lueders", cmd_lueders), ("born", cmd_born)):
        p = common(sub.add_parser(name, help=f"single {name} evaluation from an operator file"))
        p.add_argument("--in", dest="input", required=True)
        p.add_argument("--rho", required=True)
        p.add_argument("--p", required=True)
        if name == "lueders":
            p.add_argument("--q", required=True)
        p.set_defaults(func=fn)

    p = common(sub.add_parser("delta-curve", help="CSV of Δ(r) for the two-qubit family"),
               "CSV output path (default stdout)")
    p.add_argument("--r-steps", type=int, default=101)
    p.add_argument("--convention", choices=[*quantum.CONVENTIONS, "both"], default=quantum.B_THEN_A)
    p.add_argument("--oracle", type=int, default=0, metavar="N", help="Monte Carlo trials per component")
    p.add_argument("--oracle-r", default="0,1", help="r values at which the oracle runs")
    p.add_argument("--report", default=None, help="JSON report path")
    p.set_defaults(func=cmd_delta_curve)

    p = common(sub.add_parser("delta-scan", help="randomized product-rule violation search"),
               "CSV output path (default stdout)")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--purity-min", type=float, default=0.0)
    p.add_argument("--purity-max", type=float, default=0.0)
    p.add_argument("--commuting", action="store_true")
    p.add_argument("--convention", choices=quantum.CONVENTIONS, default=quantum.B_THEN_A)
    p.add_argument("--top", type=int, default=0, help="keep only the K largest |Δ| (0 = all)")
    p.set_defaults(func=cmd_delta_scan)

    p = common(sub.add_parser("mc-oracle", help="standalone Monte Carlo sampling run"))
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--rho", required=True)
    p.add_argument("--p", required=True)
    p.add_argument("--q", default=None, help="conditioning projector (omit for a Born run)")
    p.add_argument("--n", type=int, default=10 ** 6)
    p.set_defaults(func=cmd_mc_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    print(json.dumps({"command": args.command,
                      "config": {k: v for k, v in sorted(vars(args).items()) if k != "func"}},
                     sort_keys=True), file=sys.stderr)
    try:
        return args.func(args)
    except (InputError, NonCommutingError, ConditioningOnNullError, OracleStarvationError,
            OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
