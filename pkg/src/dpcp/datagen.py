"""Synthetic data generation for the subspace-plus-outliers model.

All randomness flows through a Philox counter-based generator seeded per
call, with Gaussian variates produced by Box-Muller on its uniform
stream. This pins the exact byte stream independent of platform and of
numpy's own normal-sampling algorithm, so a (function, seed) pair fully
determines the output. The draw order inside ``synthesize`` (basis,
inlier directions, outliers, noise, permutation) is part of that
reproducibility contract.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass

import numpy as np


def _generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def _normals(gen: np.random.Generator, shape: tuple[int, ...]) -> np.ndarray:
    """Standard normals via Box-Muller on the generator's uniforms."""
    count = int(np.prod(shape))
    half = (count + 1) // 2
    if half == 0:
        return np.zeros(shape)
    u1 = 1.0 - gen.random(half)  # (0, 1]: keeps the log finite
    u2 = gen.random(half)
    r = np.sqrt(-2.0 * np.log(u1))
    z = np.concatenate([r * np.cos(2.0 * np.pi * u2), r * np.sin(2.0 * np.pi * u2)])
    return z[:count].reshape(shape)


def unit_sphere_sample(D: int, n: int, seed: int) -> np.ndarray:
    """n i.i.d. uniform samples on the unit sphere of R^D, as columns."""
    if D < 1 or n < 0:
        raise ValueError("need D >= 1 and n >= 0")
    gen = _generator(seed)
    return _sphere_from(gen, D, n)


def _sphere_from(gen: np.random.Generator, D: int, n: int) -> np.ndarray:
    g = _normals(gen, (D, n))
    norms = np.linalg.norm(g, axis=0)
    if n and norms.min() <= 0.0:
        raise RuntimeError("degenerate Gaussian draw")
    return g / norms


def random_subspace(D: int, d: int, seed: int) -> np.ndarray:
    """Orthonormal basis (D x d) of a uniformly random d-dimensional
    subspace, from QR of a Gaussian matrix."""
    if not 1 <= d <= D:
        raise ValueError(f"need 1 <= d <= D, got d={d}, D={D}")
    gen = _generator(seed)
    return _subspace_from(gen, D, d)


def _subspace_from(gen: np.random.Generator, D: int, d: int) -> np.ndarray:
    g = _normals(gen, (D, d))
    q, r = np.linalg.qr(g)
    # sign-fix against R's diagonal so the distribution is exactly Haar
    # and the result is deterministic.
    return q * np.sign(np.diag(r))


@dataclass
class Dataset:
    """Ambient data matrix with ground-truth labels.

    data: D x (N+M) matrix, one point per column.
    labels: per-column 1 for inlier, 0 for outlier.
    true_basis: D x d orthonormal basis of the inlier subspace.
    """

    data: np.ndarray
    labels: np.ndarray
    true_basis: np.ndarray
    sigma: float
    seed: int

    @property
    def inlier_mask(self) -> np.ndarray:
        return self.labels == 1

    @property
    def inliers(self) -> np.ndarray:
        return self.data[:, self.inlier_mask]

    @property
    def outliers(self) -> np.ndarray:
        return self.data[:, ~self.inlier_mask]


def synthesize(D: int, d: int, N: int, M: int, sigma: float, seed: int) -> Dataset:
    """Sample N unit-norm inliers on a random d-dimensional subspace plus
    M uniform outliers on the sphere, shuffled by a seeded permutation.

    Inlier noise (std ``sigma`` per coordinate) is supported in the
    orthogonal complement of the subspace; noisy inliers are not
    re-normalized to the sphere.
    """
    if not 1 <= d <= D:
        raise ValueError(f"need 1 <= d <= D, got d={d}, D={D}")
    if N < d + 1 or M < 0:
        raise ValueError("need N >= d+1 and M >= 0")
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    if 0 < M < D - d:
        warnings.warn(
            f"M={M} outliers < codimension {D - d}: the dataset spans a proper "
            "hyperplane and the recovery problem is degenerate",
            stacklevel=2,
        )
    gen = _generator(seed)
    basis = _subspace_from(gen, D, d)
    inliers = basis @ _sphere_from(gen, d, N)
    outliers = _sphere_from(gen, D, M)
    if sigma > 0:
        g = _normals(gen, (D, N))
        inliers = inliers + sigma * (g - basis @ (basis.T @ g))
    data = np.hstack([inliers, outliers])
    labels = np.concatenate([np.ones(N, dtype=np.int8), np.zeros(M, dtype=np.int8)])
    perm = gen.permutation(N + M)
    return Dataset(data=data[:, perm], labels=labels[perm], true_basis=basis,
                   sigma=float(sigma), seed=int(seed))


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_dataset_csv(ds: Dataset, path: str) -> None:
    """Write one row per point with header label,x1,...,xD (label 1 =
    inlier); the true basis goes to a sibling ``<path>.basis.csv``."""
    D = ds.data.shape[0]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["label"] + [f"x{i + 1}" for i in range(D)])
        for j in range(ds.data.shape[1]):
            w.writerow([int(ds.labels[j])] + [_fmt(v) for v in ds.data[:, j]])
    with open(basis_path(path), "w", newline="") as fh:
        w = csv.writer(fh)
        for i in range(D):
            w.writerow([_fmt(v) for v in ds.true_basis[i]])


def basis_path(data_path: str) -> str:
    return data_path + ".basis.csv"


def read_dataset_csv(path: str) -> tuple[np.ndarray, np.ndarray]:
    """Read a dataset CSV back as (data D x L, labels)."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or not rows[0] or rows[0][0] != "label":
        raise ValueError(f"{path}: expected header starting with 'label'")
    body = rows[1:]
    labels = np.array([int(r[0]) for r in body], dtype=np.int8)
    data = np.array([[float(v) for v in r[1:]] for r in body]).T
    return data, labels


def read_basis_csv(path: str) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = [[float(v) for v in r] for r in csv.reader(fh) if r]
    return np.array(rows)
