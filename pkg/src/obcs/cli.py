"""Command-line front end.

Subcommands mirror the library layers: `solve` runs one recovery program
on a measurement CSV, `evaluate` scores an estimate against a truth
vector, `vc` exposes the dimension bounds and shattering tools, `bounds`
prints the sample-complexity plan, and `experiment run` drives a full
sweep into an output directory. All structured output is JSON on stdout
except where a flag names a file.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .complexity import (
    noisy_rate_bound,
    noisy_rate_bound_log,
    obcs_plan,
    rate_upper,
    rate_upper_log2,
    samples_necessary,
    uniform_convergence_bound,
    uniform_convergence_bound_log,
)
from .errors import InvalidArgumentError
from .experiment import ExperimentConfig, run_experiment, write_outputs
from .measurement import NoiseChannel, SamplingDistribution, load_measurements_csv
from .metrics import recovery_report
from .sparse_core import vector_from_json
from .solvers import METHODS, RecoveryConfig, recover
from .vc_tools import (
    ShatterInstance,
    build_witness,
    is_shattered,
    vc_bounds_affine,
    vc_lower_bound,
    vc_upper_bound,
    witness_shatters,
)


def _emit(payload: dict, path: str | None) -> None:
    text = json.dumps(payload, indent=2)
    if path:
        Path(path).write_text(text + "\n")
    else:
        print(text)


def _cmd_solve(args: argparse.Namespace) -> int:
    ms = load_measurements_csv(args.input)
    cfg = RecoveryConfig(
        lambda_weight=args.lambda_weight,
        tau=args.tau,
        truncation_k=args.truncate_k,
        tolerance=args.tol,
        max_iterations=args.max_iter,
    )
    sol = recover(ms, args.method, cfg)
    _emit({
        "estimate": [float(v) for v in sol.estimate.values],
        "offset_coefficient": sol.offset_coefficient,
        "objective": sol.objective_value,
        "status": sol.status,
        "slack_total": sol.slack_total,
        "iterations": sol.iterations_used,
    }, args.output)
    return 0


def _load_vector(path: str):
    return vector_from_json(Path(path).read_text())


def _cmd_evaluate(args: argparse.Namespace) -> int:
    estimate = _load_vector(args.estimate)
    truth = _load_vector(args.truth)
    k = args.k if args.k is not None else max(1, int(np.count_nonzero(truth.values)))
    dist = channel = None
    if args.dist:
        text = Path(args.dist).read_text() if Path(args.dist).exists() else args.dist
        dist = SamplingDistribution.from_dict(json.loads(text))
        channel = NoiseChannel(flip_probability=args.alpha)
    report = recovery_report(estimate, truth, k, dist=dist, channel=channel,
                             trials=args.trials, seed=args.seed)
    payload = report.to_dict()
    print(json.dumps(payload, indent=2))
    if args.append_csv:
        path = Path(args.append_csv)
        fresh = not path.exists()
        with open(path, "a", newline="") as fh:
            writer = csv.writer(fh)
            if fresh:
                writer.writerow(payload.keys())
            writer.writerow("" if v is None else v for v in payload.values())
    return 0


def _cmd_vc_bounds(args: argparse.Namespace) -> int:
    if args.affine:
        lower, upper = vc_bounds_affine(args.n, args.k)
    else:
        lower, upper = vc_lower_bound(args.n, args.k), vc_upper_bound(args.n, args.k)
    _emit({"n": args.n, "k": args.k, "affine": bool(args.affine),
           "lower": lower, "upper": upper}, None)
    return 0


def _cmd_vc_witness(args: argparse.Namespace) -> int:
    witness = build_witness(args.n, args.k)
    if args.verify and not witness_shatters(witness):
        print("witness replay failed", file=sys.stderr)
        return 1
    writer = csv.writer(sys.stdout)
    for row in witness.matrix:
        writer.writerow([int(v) for v in row])
    return 0


def _cmd_vc_shatter(args: argparse.Namespace) -> int:
    with open(args.points, newline="") as fh:
        body = [row for row in csv.reader(fh) if row]
    if not body:
        raise InvalidArgumentError(f"{args.points}: no point rows")
    points = np.array([[float(v) for v in row] for row in body])
    inst = ShatterInstance(points=points, sparsity_budget=args.k)
    _emit({"points": int(points.shape[0]), "k": args.k,
           "shattered": bool(is_shattered(inst))}, None)
    return 0


def _cmd_bounds(args: argparse.Namespace) -> int:
    plan = obcs_plan(args.n, args.k, args.eps, args.delta, affine=args.affine)
    d, m = plan["d_used"], plan["m_required"]
    payload = {
        "n": args.n,
        "k": args.k,
        "eps": args.eps,
        "delta": args.delta,
        "affine": bool(args.affine),
        "d_used": d,
        "m_required": m,
        "mse_guarantee": plan["mse_guarantee"],
        "samples_necessary": samples_necessary(args.eps, args.delta, d),
        "rate_upper": rate_upper(m, args.eps, d),
        "rate_upper_log2": rate_upper_log2(m, args.eps, d),
    }
    if args.noisy:
        payload["noisy_rate_bound"] = noisy_rate_bound(m, args.eps, d)
        payload["noisy_rate_bound_log"] = noisy_rate_bound_log(m, args.eps, d)
        payload["uniform_convergence_bound"] = uniform_convergence_bound(m, args.eps, d)
        payload["uniform_convergence_bound_log"] = uniform_convergence_bound_log(
            m, args.eps, d)
    _emit(payload, None)
    return 0


def _cmd_experiment_run(args: argparse.Namespace) -> int:
    cfg = ExperimentConfig.from_dict(json.loads(Path(args.config).read_text()))
    records = run_experiment(cfg, workers=args.workers)
    paths = write_outputs(cfg, records, args.out)
    _emit({"records": str(paths["records"]), "summary": str(paths["summary"]),
           "meta": str(paths["meta"]), "count": len(records)}, None)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="obcs",
        description="Sparse recovery from one-bit measurements: solvers, "
                    "error metrics, dimension bounds, sample-size calculators, "
                    "and a sweep harness.")
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="run one recovery program on a measurement csv")
    solve.add_argument("--input", required=True, help="measurement csv (a_1..a_n[,b],y)")
    solve.add_argument("--method", required=True, choices=METHODS)
    solve.add_argument("--lambda", dest="lambda_weight", type=float, default=0.05,
                       help="slack vs sparsity weight in (0,1)")
    solve.add_argument("--tau", type=float, default=1.0, help="offset coefficient price")
    solve.add_argument("--truncate-k", type=int, default=None,
                       help="keep only the k largest-magnitude entries")
    solve.add_argument("--tol", type=float, default=1e-8)
    solve.add_argument("--max-iter", type=int, default=None)
    solve.add_argument("--output", default=None, help="write the JSON here instead of stdout")
    solve.set_defaults(func=_cmd_solve)

    evaluate = sub.add_parser("evaluate", help="score an estimate against a truth vector")
    evaluate.add_argument("--estimate", required=True, help="vector JSON file")
    evaluate.add_argument("--truth", required=True, help="vector JSON file")
    evaluate.add_argument("--k", type=int, default=None,
                          help="support size scored; defaults to the truth's")
    evaluate.add_argument("--dist", default=None,
                          help="sampling distribution JSON (file or literal) "
                               "enabling the Monte Carlo noisy risk")
    evaluate.add_argument("--alpha", type=float, default=0.0,
                          help="label flip probability for the noisy risk")
    evaluate.add_argument("--trials", type=int, default=100_000)
    evaluate.add_argument("--seed", type=int, default=0)
    evaluate.add_argument("--append-csv", default=None,
                          help="also append the report as a row of this csv")
    evaluate.set_defaults(func=_cmd_evaluate)

    vc = sub.add_parser("vc", help="dimension bounds, witness matrices, shattering checks")
    vcsub = vc.add_subparsers(dest="vc_command", required=True)
    vb = vcsub.add_parser("bounds", help="closed-form dimension bounds")
    vb.add_argument("--n", type=int, required=True)
    vb.add_argument("--k", type=int, required=True)
    vb.add_argument("--affine", action="store_true")
    vb.set_defaults(func=_cmd_vc_bounds)
    vw = vcsub.add_parser("witness", help="emit the shattered witness matrix as integer csv")
    vw.add_argument("--n", type=int, required=True)
    vw.add_argument("--k", type=int, required=True)
    vw.add_argument("--verify", action="store_true",
                    help="replay every dichotomy before emitting")
    vw.set_defaults(func=_cmd_vc_witness)
    vs = vcsub.add_parser("shatter", help="decide shattering for points in a csv")
    vs.add_argument("--points", required=True, help="csv, one point per row")
    vs.add_argument("--k", type=int, required=True)
    vs.set_defaults(func=_cmd_vc_shatter)

    bounds = sub.add_parser("bounds", help="sample-complexity plan for a recovery target")
    bounds.add_argument("--n", type=int, required=True)
    bounds.add_argument("--k", type=int, required=True)
    bounds.add_argument("--eps", type=float, required=True)
    bounds.add_argument("--delta", type=float, required=True)
    bounds.add_argument("--affine", action="store_true")
    bounds.add_argument("--noisy", action="store_true",
                        help="include the noise-robust rate bounds")
    bounds.set_defaults(func=_cmd_bounds)

    experiment = sub.add_parser("experiment", help="sweep harness")
    expsub = experiment.add_subparsers(dest="experiment_command", required=True)
    run = expsub.add_parser("run", help="run a sweep from a config json")
    run.add_argument("--config", required=True)
    run.add_argument("--out", required=True)
    run.add_argument("--workers", type=int, default=1)
    run.set_defaults(func=_cmd_experiment_run)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InvalidArgumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
