"""Command line: ``faircoreset {build,eval,bench,validate}``.

Exit status is 0 on success, 1 when a check fails (validation violations,
infeasible constraint) and 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys

import numpy as np

from .core import CoresetParams
from .fairflow import ProfileConstraint, evaluate_objective
from .harness import BenchConfig, load_csv, normalize_minmax, run_benchmark
from .pipeline import (build_fair_coreset, check_artifact, load_coreset, save_coreset,
                       uniform_coreset)


class UsageError(Exception):
    pass


def _names(text: str | None) -> list[str]:
    return [s.strip() for s in text.split(",") if s.strip()] if text else []


def _floats(text: str) -> list[float]:
    return [float(s) for s in _names(text)]


def _add_dataset_args(p, required=True):
    p.add_argument("--input", required=required, help="dataset CSV with a header row")
    p.add_argument("--features", help="comma-separated numeric feature columns")
    p.add_argument("--groups", default="", help="comma-separated categorical group columns")
    p.add_argument("--normalize", action="store_true", help="min-max scale features to [0, 1]")


def _dataset(args):
    if not args.features:
        raise UsageError("--features is required with --input")
    cfg = BenchConfig(args.input, _names(args.features), _names(args.groups))
    D = load_csv(cfg)
    if D.dropped_rows:
        logging.warning("dropped %d rows with missing or non-numeric values", D.dropped_rows)
    return normalize_minmax(D) if args.normalize else D


def _read_table(path, min_cols):
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if not rows:
        raise UsageError(f"{path}: no header")
    body = rows[1:]
    for lineno, row in enumerate(body, start=2):
        if len(row) < min_cols:
            raise UsageError(f"{path}: line {lineno}: expected at least {min_cols} columns")
    return rows[0], body


def read_constraint(path, k: int, n_profiles: int) -> ProfileConstraint:
    """Rows ``cluster,profile,mass``; unlisted cells are zero."""
    _, body = _read_table(path, 3)
    quotas = np.zeros((k, n_profiles))
    for lineno, (i, t, mass, *_) in enumerate(body, start=2):
        i, t = int(i), int(t)
        if not (0 <= i < k and 0 <= t < n_profiles):
            raise UsageError(f"{path}: line {lineno}: cluster {i} / profile {t} out of range")
        quotas[i, t] += float(mass)
    return ProfileConstraint(quotas)


def read_centers(path) -> np.ndarray:
    _, body = _read_table(path, 1)
    return np.array([[float(v) for v in row] for row in body], dtype=float)


def cmd_build(args) -> int:
    D = _dataset(args)
    if args.method == "uniform":
        if not args.size:
            raise UsageError("--size is required with --method uniform")
        A = uniform_coreset(D, args.size, args.seed)
    else:
        params = CoresetParams(args.epsilon, args.k, args.z, args.seed, args.budget_scale)
        A = build_fair_coreset(D, params)
    save_coreset(A, args.output)
    print(f"wrote {A.size} weighted points for {D.n} input points to {args.output}")
    return 0


def cmd_eval(args) -> int:
    S = load_coreset(args.coreset).points if args.coreset else _dataset(args)
    C = read_centers(args.centers)
    F = read_constraint(args.constraint, len(C), S.n_profiles)
    try:
        plan = evaluate_objective(S, F, C, args.z)
    except ValueError as exc:
        if "infeasible" not in str(exc):
            raise
        print("inf")
        print(exc, file=sys.stderr)
        return 1
    print(format(plan.objective, ".17g"))
    return 0


def cmd_bench(args) -> int:
    cfg = BenchConfig(args.input, _names(args.features), _names(args.groups), k=args.k, z=args.z,
                      epsilons=_floats(args.epsilons), trials=args.trials,
                      normalize=args.normalize, seed=args.seed, output=args.output)
    report = run_benchmark(cfg)
    print(f"{'eps':>6} {'size':>7} {'err':>10} {'uni err':>10} {'T_C ms':>10} {'T_S ms':>9} {'T_X ms':>9}")
    for r in report.rows:
        print(f"{r.epsilon:6.3f} {r.size:7d} {r.error:10.5f} {r.uniform_error:10.5f} "
              f"{r.t_c_ms:10.1f} {r.t_s_ms:9.2f} {r.t_x_ms:9.2f}")
    return 0


def cmd_validate(args) -> int:
    A = load_coreset(args.coreset)
    problems = check_artifact(A, _dataset(args))
    for p in problems:
        print(p)
    if problems:
        return 1
    print("ok")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="faircoreset",
                                     description="Coresets for fair k-median / k-means clustering.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="dataset -> coreset CSV (+ JSON sidecar)")
    _add_dataset_args(p)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--z", type=int, choices=(1, 2), default=1)
    p.add_argument("--epsilon", type=float, default=0.2)
    p.add_argument("--budget-scale", type=float, default=1.0)
    p.add_argument("--method", choices=("fair", "uniform"), default="fair")
    p.add_argument("--size", type=int, help="sample size for --method uniform")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("eval", help="objective of a dataset or coreset for given F and C")
    _add_dataset_args(p, required=False)
    p.add_argument("--coreset", help="coreset CSV written by build")
    p.add_argument("--constraint", required=True, help="CSV rows cluster,profile,mass")
    p.add_argument("--centers", required=True, help="CSV, one center per row")
    p.add_argument("--z", type=int, choices=(1, 2), default=1)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", help="empirical error and timings per epsilon")
    _add_dataset_args(p)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--z", type=int, choices=(1, 2), default=1)
    p.add_argument("--epsilons", default="0.1,0.2,0.3,0.4")
    p.add_argument("--trials", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", help="report path prefix; writes .json and .csv")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("validate", help="check a coreset against its source dataset")
    _add_dataset_args(p)
    p.add_argument("--coreset", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "eval" and not (args.coreset or args.input):
        parser.error("eval needs --coreset or --input")
    try:
        return args.func(args)
    except (UsageError, ValueError, OSError) as exc:
        print(f"faircoreset {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
