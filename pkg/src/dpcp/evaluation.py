"""Outlier signals, ROC evaluation, and the benchmark grid runners.

A grid run sweeps (subspace dimension, outlier ratio, noise level,
trial) cells, synthesizes one dataset per cell from a seed derived
deterministically from the base seed and the cell coordinates, runs each
requested method, and records separation, ROC area, recovery angle and
timing. Records are gathered and sorted before writing, so the output
order does not depend on scheduling; wall-clock columns are the only
nondeterministic ones.
"""

from __future__ import annotations

import concurrent.futures
import csv
import math
import os
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import baselines, solvers, theory
from .datagen import Dataset, synthesize
from .numerics import orthonormal_complement, principal_angles

GRID_HEADER = ["D", "d", "N", "M", "ratio", "sigma", "trial", "seed", "method",
               "separation", "area_above", "angle_deg", "iterations", "wall_ms", "status"]
THEORY_HEADER = ["D", "d", "N", "M", "trial", "eps_O", "eps_X", "gamma",
                 "condition_holds", "phi0_star"]

_MASK64 = (1 << 64) - 1


def derive_seed(base: int, *parts: int) -> int:
    """Deterministic seed mixing: fold the cell coordinates into the base
    seed (boost-style combine), then XOR the final part (the trial index)
    so parallel trials get distinct streams."""
    h = base & _MASK64
    for p in parts[:-1] if parts else ():
        h ^= (p + 0x9E3779B97F4A7C15 + ((h << 6) & _MASK64) + (h >> 2)) & _MASK64
        h &= _MASK64
    if parts:
        h ^= parts[-1] & _MASK64
    return h


@dataclass
class Signal:
    """Per-point nonnegative score (larger = more outlier-like) with the
    ground-truth labels (1 = inlier)."""

    values: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        self.labels = np.asarray(self.labels)
        if self.values.shape != self.labels.shape:
            raise ValueError("values and labels must have equal length")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("signal values must be finite")


@dataclass
class RocResult:
    points: np.ndarray          # (k, 2) rows of (fpr, tpr), from (0,0) to (1,1)
    area_above: float


def point_distances(data: np.ndarray, est: solvers.SubspaceEstimate) -> np.ndarray:
    """Distance of each column to the estimated subspace: the norm of its
    component along the complement basis."""
    return np.linalg.norm(est.complement_basis.T @ np.asarray(data, dtype=float), axis=0)


def distance_signal(ds: Dataset, est: solvers.SubspaceEstimate) -> Signal:
    return Signal(values=point_distances(ds.data, est), labels=ds.labels)


def roc(sig: Signal) -> RocResult:
    """Threshold sweep declaring a point inlier when its score is <= t.

    The area above the curve is 1 - AUC, where AUC is the probability
    that a random inlier scores below a random outlier, ties counting
    one half.
    """
    inl = sig.values[sig.labels == 1]
    out = sig.values[sig.labels != 1]
    if inl.size == 0 or out.size == 0:
        raise ValueError("need at least one inlier and one outlier")
    thresholds = np.unique(sig.values)
    tpr = np.searchsorted(np.sort(inl), thresholds, side="right") / inl.size
    fpr = np.searchsorted(np.sort(out), thresholds, side="right") / out.size
    points = np.vstack([[0.0, 0.0], np.column_stack([fpr, tpr])])
    out_sorted = np.sort(out)
    greater = out.size - np.searchsorted(out_sorted, inl, side="right")
    equal = (np.searchsorted(out_sorted, inl, side="right")
             - np.searchsorted(out_sorted, inl, side="left"))
    auc = float(np.sum(greater + 0.5 * equal) / (inl.size * out.size))
    return RocResult(points=points, area_above=1.0 - auc)


def perfect_separation(sig: Signal) -> bool:
    """True iff some threshold splits the classes exactly: every inlier
    scores strictly below every outlier."""
    inl = sig.values[sig.labels == 1]
    out = sig.values[sig.labels != 1]
    if inl.size == 0 or out.size == 0:
        raise ValueError("need at least one inlier and one outlier")
    return bool(inl.max() < out.min())


@dataclass
class GridConfig:
    D: int
    d_list: list[int]
    N: int
    ratio_list: list[float]
    sigma_list: list[float] = field(default_factory=lambda: [0.0])
    trials: int = 5
    methods: list[str] = field(default_factory=lambda: ["dpcp-lp"])
    seed: int = 0
    jobs: int | None = None
    ransac_trial_cap: int = 100_000

    @staticmethod
    def from_dict(raw: dict) -> "GridConfig":
        known = {f for f in GridConfig.__dataclass_fields__}
        extra = set(raw) - known - {"out_csv"}
        if extra:
            raise ValueError(f"unknown grid config keys: {sorted(extra)}")
        return GridConfig(**{k: v for k, v in raw.items() if k in known})


def outlier_count(N: int, ratio: float) -> int:
    """M with M/(N+M) = ratio, rounded half-up."""
    if not 0.0 <= ratio < 1.0:
        raise ValueError("ratio must lie in [0, 1)")
    return int(math.floor(ratio * N / (1.0 - ratio) + 0.5))


def _fit_method(method: str, ds: Dataset, c: int, ratio: float, seed: int,
                ransac_cap: int) -> solvers.SubspaceEstimate:
    d = ds.true_basis.shape[1]
    if method == "dpcp-lp":
        return solvers.dpcp_lp(ds.data, c)
    if method == "dpcp-irls":
        return solvers.dpcp_irls(ds.data, c, solvers.SolverConfig(t_max=solvers.DEFAULT_TMAX_IRLS))
    if method == "dpcp-d":
        tau = solvers.default_tau(ds.data.shape[1], ds.sigma)
        cfg = solvers.SolverConfig(t_max=solvers.DEFAULT_TMAX_D, tau=tau)
        return solvers.dpcp_d_basis(ds.data, c, cfg)
    if method == "ransac":
        theory_trials = baselines.ransac_trials(0.99, ratio, d)
        cfg = baselines.RansacConfig(
            dim=d,
            threshold=ds.sigma if ds.sigma > 0 else 1e-3,
            success_prob=0.99,
            outlier_ratio_hint=ratio,
            seed=derive_seed(seed, 0x5A),
            trials=min(3 * theory_trials, ransac_cap),
            max_trials=ransac_cap,
        )
        return baselines.ransac(ds.data, cfg)
    raise ValueError(f"unknown method {method!r}")


def _grid_cell(task: tuple) -> list[dict]:
    (D, N, d, d_i, ratio, r_i, sigma, s_i, trial, base_seed, methods, cap) = task
    seed = derive_seed(base_seed, d_i, r_i, s_i, trial)
    M = outlier_count(N, ratio)
    ds = synthesize(D, d, N, M, sigma, seed)
    true_comp = orthonormal_complement(ds.true_basis, D)
    c = D - d
    rows = []
    for method in methods:
        row = {"D": D, "d": d, "N": N, "M": M, "ratio": ratio, "sigma": sigma,
               "trial": trial, "seed": seed, "method": method}
        t0 = time.perf_counter()
        try:
            est = _fit_method(method, ds, c, ratio, seed, cap)
            sig = distance_signal(ds, est)
            angles = principal_angles(est.complement_basis, true_comp)
            row.update(
                separation=int(perfect_separation(sig)),
                area_above=roc(sig).area_above,
                angle_deg=math.degrees(float(angles.max())) if angles.size else 0.0,
                iterations=est.iterations,
                status="ok",
            )
        except Exception as exc:  # per-cell failures recorded, run continues
            row.update(separation="", area_above="", angle_deg="", iterations="",
                       status="failed")
            print(f"[grid] {method} failed on cell d={d} R={ratio} sigma={sigma} "
                  f"trial={trial}: {exc}", file=sys.stderr)
        row["wall_ms"] = 1000.0 * (time.perf_counter() - t0)
        rows.append(row)
    return rows


def _run_tasks(tasks: list[tuple], worker, jobs: int | None) -> list:
    jobs = jobs if jobs is not None else (os.cpu_count() or 1)
    if jobs <= 1 or len(tasks) <= 1:
        return [worker(t) for t in tasks]
    with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(worker, tasks, chunksize=1))


def run_grid(cfg: GridConfig) -> list[dict]:
    """Run every (d, ratio, sigma, trial) cell for every method and return
    the records in deterministic (cell, trial, method) order."""
    tasks = []
    for d_i, d in enumerate(cfg.d_list):
        for r_i, ratio in enumerate(cfg.ratio_list):
            for s_i, sigma in enumerate(cfg.sigma_list):
                for trial in range(cfg.trials):
                    tasks.append((cfg.D, cfg.N, d, d_i, ratio, r_i, sigma, s_i,
                                  trial, cfg.seed, list(cfg.methods), cfg.ransac_trial_cap))
    results = _run_tasks(tasks, _grid_cell, cfg.jobs)
    return [row for rows in results for row in rows]


@dataclass
class TheoryCheckConfig:
    D: int
    d_list: list[int]
    N: int
    ratio_list: list[float]
    trials: int = 10
    probes: int = 10_000
    circum_budget: int = 20_000
    seed: int = 0
    jobs: int | None = None

    @staticmethod
    def from_dict(raw: dict) -> "TheoryCheckConfig":
        known = {f for f in TheoryCheckConfig.__dataclass_fields__}
        extra = set(raw) - known - {"out_csv"}
        if extra:
            raise ValueError(f"unknown theory-check config keys: {sorted(extra)}")
        return TheoryCheckConfig(**{k: v for k, v in raw.items() if k in known})


def _theory_cell(task: tuple) -> dict:
    (D, N, d, d_i, ratio, r_i, trial, base_seed, probes, budget) = task
    seed = derive_seed(base_seed, d_i, r_i, trial)
    M = outlier_count(N, ratio)
    ds = synthesize(D, d, N, M, 0.0, seed)
    inl, out = ds.inliers, ds.outliers
    eps_X = theory.estimate_average_error(inl, restrict=ds.true_basis,
                                          probes=probes, seed=derive_seed(seed, 1))
    eps_O = theory.estimate_average_error(out, probes=probes, seed=derive_seed(seed, 2))
    splits = theory.required_splits(D, d)
    circum_O = {k1: theory.estimate_circumradius(out, k1, budget, derive_seed(seed, 3, k1))
                for k1 in sorted({k1 for k1, _ in splits})}
    circum_X = {k2: theory.estimate_circumradius(inl, k2, budget, derive_seed(seed, 4, k2))
                for k2 in sorted({k2 for _, k2 in splits if k2 >= 1})}
    model = theory.ContinuousModel(M=M, N=N, D=D, d=d)
    cond = theory.theorem_conditions(model, eps_O, eps_X, circum_O, circum_X)
    return {"D": D, "d": d, "N": N, "M": M, "trial": trial,
            "eps_O": eps_O, "eps_X": eps_X, "gamma": cond.gamma,
            "condition_holds": int(cond.condition_holds),
            "phi0_star": math.degrees(cond.phi0_star)}


def run_theory_check(cfg: TheoryCheckConfig) -> list[dict]:
    """Estimate the uniformity parameters and evaluate the sufficient
    conditions over the (d, ratio) grid; phi0_star is reported in degrees."""
    tasks = []
    for d_i, d in enumerate(cfg.d_list):
        for r_i, ratio in enumerate(cfg.ratio_list):
            for trial in range(cfg.trials):
                tasks.append((cfg.D, cfg.N, d, d_i, ratio, r_i, trial,
                              cfg.seed, cfg.probes, cfg.circum_budget))
    return _run_tasks(tasks, _theory_cell, cfg.jobs)


def _fmt_cell(v) -> str:
    if isinstance(v, float):
        return format(v, ".12g")
    return str(v)


def write_records_csv(records: list[dict], header: list[str], path_or_file) -> None:
    """Write records under the fixed header; floats use a deterministic
    12-significant-digit format."""
    def _write(fh):
        w = csv.writer(fh)
        w.writerow(header)
        for rec in records:
            w.writerow([_fmt_cell(rec.get(col, "")) for col in header])

    if hasattr(path_or_file, "write"):
        _write(path_or_file)
    else:
        with open(path_or_file, "w", newline="") as fh:
            _write(fh)
