"""Command line entry point: ``percheeger <subcommand> ...``.

Exit codes: 0 success, 1 other failure, 2 usage, 3 solver guard, 4 phi undefined.
Failures print exactly one line ``error: <message>`` on stderr.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from contextlib import contextmanager
from pathlib import Path

from . import io
from .cuts import (
    BudgetExceeded,
    GuardViolation,
    PhiUndefined,
    cheeger_brute,
    cheeger_exact,
    cheeger_heuristic,
    epsilon_n,
    iso_profile,
)
from .events import analyze_flips, events_from_analysis, gradient_claim_from_analysis
from .experiments import (
    estimate_event_probabilities,
    gradient_tail_summary,
    run_samples,
    run_variance_experiment,
    talagrand_diagnostic,
    trend_table,
)
from .percolation import giant_component, sample_configuration
from .torus import TorusSpec

EXIT_FAILURE, EXIT_USAGE, EXIT_GUARD, EXIT_UNDEFINED = 1, 2, 3, 4
SOLVERS = {"brute": cheeger_brute, "exact": cheeger_exact, "heuristic": cheeger_heuristic}


@contextmanager
def _output(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def cmd_sample(args):
    spec = TorusSpec(args.d, args.n)
    omega = sample_configuration(spec, args.p, args.seed)
    with _output(args.out) as fh:
        fh.write(io.format_configuration(omega, {"p": repr(args.p), "seed": args.seed}))


def cmd_solve(args):
    omega, meta = io.read_configuration(args.infile)
    t0 = time.perf_counter()
    C = giant_component(omega)
    result = SOLVERS[args.mode](omega, C)
    rec = io.solve_record(omega, result, C.size, meta, (time.perf_counter() - t0) * 1e3)
    with _output(args.out) as fh:
        fh.write(io.dumps_record(rec) + "\n")


def cmd_gradient(args):
    omega, _ = io.read_configuration(args.infile)
    analysis = analyze_flips(omega, args.mode)
    if analysis.phi is None:
        raise PhiUndefined(analysis.giant_size)
    with _output(args.out) as fh:
        writer = csv.writer(fh)
        writer.writerow(["edge_id", "case", "grad_num", "grad_den"])
        for e, (case, g) in enumerate(zip(analysis.cases, analysis.gradients())):
            writer.writerow([e, case.value, "" if g is None else g.numerator, "" if g is None else g.denominator])


def cmd_events(args):
    omega, _ = io.read_configuration(args.infile)
    k = io.read_constants(args.constants) if args.constants else io.default_constants()
    analysis = analyze_flips(omega, args.mode)
    report = events_from_analysis(analysis, k)
    claim = gradient_claim_from_analysis(analysis, k)
    out = report.as_dict()
    out["gradient_claim"] = {
        "in_Hn": claim.in_Hn,
        "sup_grad": None if claim.sup_grad is None else [claim.sup_grad.numerator, claim.sup_grad.denominator],
        "bound": claim.bound,
        "holds": claim.holds,
        "undefined_edges": list(claim.undefined_edges),
    }
    with _output(args.out) as fh:
        json.dump(io.jsonable(out), fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_profile(args):
    omega, _ = io.read_configuration(args.infile)
    eps = epsilon_n(omega.spec) if args.epsilon == "auto" else float(args.epsilon)
    res = iso_profile(omega, None, eps, mode=args.mode)
    with _output(args.out) as fh:
        json.dump({"epsilon": res.epsilon, "value": res.value, "witness": list(res.witness)}, fh, sort_keys=True)
        fh.write("\n")


def cmd_experiment(args):
    plan = io.parse_plan(args.plan)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    records = run_samples(plan, workers=args.workers)
    with open(out_dir / "records.jsonl", "w") as fh:
        for n in plan.n_list:
            for rec in records[n]:
                fh.write(io.dumps_record(io.sample_record(plan, rec)) + "\n")
    stats = run_variance_experiment(plan, records)
    io.write_summary_csv(out_dir / "summary.csv", stats)
    summary = {
        "plan": {"d": plan.d, "n_list": plan.n_list, "p": plan.p, "samples": plan.samples,
                 "master_seed": plan.master_seed, "solver_mode": plan.solver_mode,
                 "record_gradients": plan.record_gradients},
        "note": "all targets are property-based trends; the constants in the concentration bounds are not identified",
        "trend": trend_table(stats),
    }
    if plan.solver_mode != "heuristic":
        summary["events"] = estimate_event_probabilities(plan, records)
    if plan.record_gradients:
        summary["talagrand"] = talagrand_diagnostic(plan, records)
        summary["gradient_tails"] = gradient_tail_summary(plan, records)
    (out_dir / "summary.json").write_text(json.dumps(io.jsonable(summary), indent=2, sort_keys=True) + "\n")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="percheeger", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="draw a percolation configuration")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("solve", help="Cheeger constant of the giant component")
    p.add_argument("--in", dest="infile", required=True)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--mode", choices=sorted(SOLVERS), default="exact")
    for name in sorted(SOLVERS):
        mode.add_argument(f"--{name}", dest="mode", action="store_const", const=name, help=f"same as --mode {name}")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("gradient", help="per-edge flip gradient of phi as CSV")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--mode", choices=["brute", "exact"], default="exact")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_gradient)

    p = sub.add_parser("events", help="evaluate H_n^1..H_n^5 and G_n")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--constants", default=None)
    p.add_argument("--mode", choices=["brute", "exact"], default="exact")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_events)

    p = sub.add_parser("profile", help="isoperimetric profile I_eps")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--epsilon", default="auto")
    p.add_argument("--mode", choices=["brute", "exact"], default="exact")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("experiment", help="run a Monte Carlo plan")
    p.add_argument("--plan", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except PhiUndefined as exc:
        return _fail(exc, EXIT_UNDEFINED)
    except GuardViolation as exc:
        return _fail(exc, EXIT_GUARD)
    except (BudgetExceeded, io.FormatError, OSError, ValueError) as exc:
        return _fail(exc, EXIT_FAILURE)
    return 0


def _fail(exc, code: int) -> int:
    msg = " ".join(str(exc).split())
    print(f"error: {msg}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
