"""RANSAC subspace baseline.

Each trial spans a model from d sampled points and scores it by the
number of points within ``threshold`` distance (a point at exactly the
threshold counts as an inlier). The best model over all trials wins,
earliest trial on ties. The trial count combines the classic coupon
bound for a target success probability with an optional explicit floor,
which is how the benchmark harness grants it a budget comparable to the
slower LP recursion without coupling results to wall-clock time.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .numerics import orthonormal_complement
from .solvers import SubspaceEstimate, _normalize_columns

_BATCH = 256


class DegenerateDataError(RuntimeError):
    """Every sampled subset was rank-deficient."""


@dataclass
class RansacConfig:
    dim: int
    threshold: float = 1e-3
    success_prob: float = 0.99
    outlier_ratio_hint: float = 0.0
    seed: int = 0
    trials: int | None = None          # explicit floor on the trial count
    min_time_s: float | None = None    # keep sampling at least this long
    max_trials: int = 200_000

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be at least 1")
        if self.threshold <= 0:
            raise ValueError("threshold must be positive")
        if not 0.0 < self.success_prob < 1.0:
            raise ValueError("success_prob must lie in (0, 1)")
        if not 0.0 <= self.outlier_ratio_hint < 1.0:
            raise ValueError("outlier_ratio_hint must lie in [0, 1)")


def ransac_trials(p: float, R: float, d: int) -> int:
    """ceil(log(1-p) / log(1 - (1-R)^d)) trials for an all-inlier sample
    with probability p, at outlier ratio R; at least 1."""
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0, 1)")
    if not 0.0 <= R < 1.0:
        raise ValueError("R must lie in [0, 1)")
    if d < 1:
        raise ValueError("d must be at least 1")
    w = (1.0 - R) ** d
    if w >= 1.0:
        return 1
    if w <= 0.0:  # underflow: no finite bound, fall back to the cap's job
        return int(1e18)
    return max(1, math.ceil(math.log(1.0 - p) / math.log(1.0 - w)))


def ransac(data: np.ndarray, cfg: RansacConfig) -> SubspaceEstimate:
    """Fit a dim-dimensional subspace by maximizing the consensus count;
    returns the orthonormal complement basis of the best model."""
    X = _normalize_columns(data)
    D, L = X.shape
    d = cfg.dim
    if L < d:
        raise ValueError(f"need at least {d} columns, got {L}")
    budget = min(cfg.max_trials,
                 max(ransac_trials(cfg.success_prob, cfg.outlier_ratio_hint, d),
                     cfg.trials or 1))
    gen = np.random.Generator(np.random.Philox(cfg.seed))
    thresh_sq = cfg.threshold ** 2

    best_count = -1
    best_model = None
    valid_trials = 0
    done = 0
    t0 = time.perf_counter()
    while True:
        n_batch = min(_BATCH, budget - done)
        if n_batch <= 0:
            if cfg.min_time_s is not None and time.perf_counter() - t0 < cfg.min_time_s:
                n_batch = _BATCH  # keep going until the time floor passes
            else:
                break
        # sample d distinct column indices per trial
        idx = np.argsort(gen.random((n_batch, L)), axis=1)[:, :d]
        samples = X.T[idx].transpose(0, 2, 1)  # (batch, D, d)
        q, r = np.linalg.qr(samples)
        diag = np.abs(np.diagonal(r, axis1=1, axis2=2))
        ok = diag.min(axis=1) > 1e-10
        # squared distance of unit points to span(q): 1 - ||q^T x||^2
        proj = np.einsum("bds,dl->bsl", q, X)
        dist_sq = np.maximum(0.0, 1.0 - np.sum(proj ** 2, axis=1))
        counts = np.sum(dist_sq <= thresh_sq + 1e-15, axis=1)
        counts[~ok] = -1
        valid_trials += int(ok.sum())
        batch_best = int(np.argmax(counts))
        if counts[batch_best] > best_count:
            best_count = int(counts[batch_best])
            best_model = q[batch_best].copy()
        done += n_batch
    if best_model is None or valid_trials == 0:
        raise DegenerateDataError("all sampled subsets were rank-deficient")
    complement = orthonormal_complement(best_model, D)
    return SubspaceEstimate(complement_basis=complement,
                            objective_trace=[float(L - best_count)],
                            iterations_per_component=[done])
