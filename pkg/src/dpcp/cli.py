"""Command-line front end.

Subcommands: gen (synthesize a dataset), fit (estimate a complement
basis), grid (benchmark sweep from a JSON config), theory-check
(sufficient-condition sweep), roc (ROC curves for fitted estimates
against a labeled dataset). Exit codes: 0 success, 1 usage error,
2 runtime failure. All file outputs are written atomically (temp file
plus rename).
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import tempfile

import numpy as np

from . import baselines, datagen, evaluation, solvers


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        raise UsageError(message)


def _atomic_write(path: str, writer) -> None:
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=".csv")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            writer(fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_matrix(path: str, rows: np.ndarray) -> None:
    def writer(fh):
        w = csv.writer(fh)
        for row in np.atleast_2d(rows):
            w.writerow([format(float(v), ".17g") for v in row])
    _atomic_write(path, writer)


def _int_list(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v != ""]


def _float_list(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v != ""]


def build_parser() -> _Parser:
    p = _Parser(prog="dpcp", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[], help="synthesize a labeled dataset CSV")
    g.add_argument("--D", type=int, required=True, help="ambient dimension")
    g.add_argument("--d", type=int, required=True, help="inlier subspace dimension")
    g.add_argument("--N", type=int, required=True, help="number of inliers")
    g.add_argument("--M", type=int, required=True, help="number of outliers")
    g.add_argument("--sigma", type=float, default=0.0,
                   help="noise std in the complement (default 0)")
    g.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    g.add_argument("--out", required=True, help="output CSV; basis goes to <out>.basis.csv")

    f = sub.add_parser("fit", help="estimate the complement basis of a dataset CSV")
    f.add_argument("--method", required=True,
                   choices=["dpcp-lp", "dpcp-irls", "dpcp-d", "ransac"])
    f.add_argument("--codim", type=int, help="number of dual components (dpcp methods)")
    f.add_argument("--eps", type=float, default=solvers.DEFAULT_EPSILON,
                   help="relative convergence tolerance (default 1e-3)")
    f.add_argument("--tmax", type=int, default=None,
                   help="max iterations (defaults: lp 10, irls 100, dpcp-d 1000)")
    f.add_argument("--delta", type=float, default=solvers.DEFAULT_DELTA,
                   help="IRLS/Cholesky regularizer (default 1e-6)")
    f.add_argument("--tau", type=float, default=None,
                   help="dpcp-d threshold (default 1/sqrt(L))")
    f.add_argument("--d", type=int, help="subspace dimension (ransac)")
    f.add_argument("--thresh", type=float, default=1e-3,
                   help="ransac inlier distance threshold (default 1e-3)")
    f.add_argument("--trials", type=int, default=None, help="ransac trial floor")
    f.add_argument("--success-prob", type=float, default=0.99,
                   help="ransac success probability (default 0.99)")
    f.add_argument("--ratio-hint", type=float, default=0.0,
                   help="assumed outlier ratio for the trial bound (default 0)")
    f.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    f.add_argument("--input", required=True, help="dataset CSV from gen")
    f.add_argument("--output", required=True,
                   help="estimate CSV, one complement component per line")

    r = sub.add_parser("grid", help="run a benchmark grid from a JSON config")
    r.add_argument("--config", required=True, help="JSON config (see README for keys)")
    r.add_argument("--out", default=None, help="output CSV (overrides config out_csv)")
    r.add_argument("--jobs", type=int, default=None,
                   help="worker processes (default: available parallelism)")
    r.add_argument("--seed", type=int, default=None, help="override config seed")

    t = sub.add_parser("theory-check", help="sufficient-condition sweep to CSV")
    t.add_argument("--D", type=int, required=True)
    t.add_argument("--d", type=_int_list, required=True,
                   help="comma-separated subspace dimensions")
    t.add_argument("--N", type=int, required=True)
    t.add_argument("--ratios", type=_float_list, required=True,
                   help="comma-separated outlier ratios")
    t.add_argument("--trials", type=int, default=10, help="trials per cell (default 10)")
    t.add_argument("--probes", type=int, default=10_000,
                   help="Monte-Carlo probes per estimate (default 10000)")
    t.add_argument("--circum-budget", type=int, default=20_000,
                   help="circumradius search budget (default 20000)")
    t.add_argument("--seed", type=int, default=0, help="base seed (default 0)")
    t.add_argument("--jobs", type=int, default=None)
    t.add_argument("--out", required=True)

    c = sub.add_parser("roc", help="ROC curves of estimates on a labeled dataset")
    c.add_argument("--input", required=True, help="dataset CSV from gen")
    c.add_argument("--estimate", action="append", required=True,
                   help="estimate CSV from fit (repeatable)")
    c.add_argument("--label", action="append", default=None,
                   help="curve label (repeatable, pairs with --estimate)")
    c.add_argument("--seed", type=int, default=0,
                   help="accepted for interface uniformity; unused")
    c.add_argument("--output", required=True, help="CSV of method,fpr,tpr,area_above")
    return p


def _require_file(path: str) -> None:
    if not os.path.exists(path):
        raise UsageError(f"config not found: {path}" if path.endswith(".json")
                         else f"file not found: {path}")


def _cmd_gen(args) -> int:
    ds = datagen.synthesize(args.D, args.d, args.N, args.M, args.sigma, args.seed)

    def writer(fh):
        w = csv.writer(fh)
        D = ds.data.shape[0]
        w.writerow(["label"] + [f"x{i + 1}" for i in range(D)])
        for j in range(ds.data.shape[1]):
            w.writerow([int(ds.labels[j])]
                       + [format(float(v), ".17g") for v in ds.data[:, j]])
    _atomic_write(args.out, writer)
    _write_matrix(datagen.basis_path(args.out), ds.true_basis)
    return 0


def _cmd_fit(args) -> int:
    _require_file(args.input)
    data, _ = datagen.read_dataset_csv(args.input)
    D = data.shape[0]
    if args.method == "ransac":
        if args.d is None:
            raise UsageError("ransac requires --d")
        cfg = baselines.RansacConfig(dim=args.d, threshold=args.thresh,
                                     success_prob=args.success_prob,
                                     outlier_ratio_hint=args.ratio_hint,
                                     seed=args.seed, trials=args.trials)
        est = baselines.ransac(data, cfg)
    else:
        if args.codim is None:
            raise UsageError(f"{args.method} requires --codim")
        defaults = {"dpcp-lp": solvers.DEFAULT_TMAX_LP,
                    "dpcp-irls": solvers.DEFAULT_TMAX_IRLS,
                    "dpcp-d": solvers.DEFAULT_TMAX_D}
        cfg = solvers.SolverConfig(epsilon=args.eps,
                                   t_max=args.tmax or defaults[args.method],
                                   delta=args.delta, tau=args.tau)
        fit = {"dpcp-lp": solvers.dpcp_lp, "dpcp-irls": solvers.dpcp_irls,
               "dpcp-d": solvers.dpcp_d_basis}[args.method]
        if not 1 <= args.codim <= D:
            raise UsageError(f"--codim must lie in [1, {D}]")
        est = fit(data, args.codim, cfg)
    _write_matrix(args.output, est.complement_basis.T)
    return 0


def _cmd_grid(args) -> int:
    _require_file(args.config)
    with open(args.config) as fh:
        raw = json.load(fh)
    try:
        cfg = evaluation.GridConfig.from_dict(raw)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    if args.jobs is not None:
        cfg.jobs = args.jobs
    if args.seed is not None:
        cfg.seed = args.seed
    out = args.out or raw.get("out_csv")
    if not out:
        raise UsageError("no output path: pass --out or set out_csv in the config")
    records = evaluation.run_grid(cfg)
    _atomic_write(out, lambda fh: evaluation.write_records_csv(
        records, evaluation.GRID_HEADER, fh))
    return 0


def _cmd_theory_check(args) -> int:
    cfg = evaluation.TheoryCheckConfig(D=args.D, d_list=args.d, N=args.N,
                                       ratio_list=args.ratios, trials=args.trials,
                                       probes=args.probes,
                                       circum_budget=args.circum_budget,
                                       seed=args.seed, jobs=args.jobs)
    records = evaluation.run_theory_check(cfg)
    _atomic_write(args.out, lambda fh: evaluation.write_records_csv(
        records, evaluation.THEORY_HEADER, fh))
    return 0


def _cmd_roc(args) -> int:
    _require_file(args.input)
    data, labels = datagen.read_dataset_csv(args.input)
    labels_set = set(np.unique(labels))
    if labels_set <= {0} or labels_set <= {1}:
        raise UsageError("dataset has a single class; ROC needs both")
    names = args.label or []
    if names and len(names) != len(args.estimate):
        raise UsageError("--label count must match --estimate count")
    rows = []
    for i, path in enumerate(args.estimate):
        _require_file(path)
        basis = datagen.read_basis_csv(path).T
        est = solvers.SubspaceEstimate(complement_basis=basis)
        sig = evaluation.Signal(values=evaluation.point_distances(data, est),
                                labels=labels)
        result = evaluation.roc(sig)
        name = names[i] if names else os.path.splitext(os.path.basename(path))[0]
        for fpr, tpr in result.points:
            rows.append({"method": name, "fpr": fpr, "tpr": tpr,
                         "area_above": result.area_above})
    _atomic_write(args.output, lambda fh: evaluation.write_records_csv(
        rows, ["method", "fpr", "tpr", "area_above"], fh))
    return 0


_COMMANDS = {
    "gen": _cmd_gen,
    "fit": _cmd_fit,
    "grid": _cmd_grid,
    "theory-check": _cmd_theory_check,
    "roc": _cmd_roc,
}


def dispatch(argv: list[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:
        print(f"failure: {exc}", file=sys.stderr)
        return 2


def main() -> int:
    return dispatch(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
