"""Dense linear-algebra kernel shared by all solvers.

Singular-direction extraction goes through an eigendecomposition of the
small D x D Gram matrix (the data matrices here are tall and thin), which
is both simpler and faster than a full SVD of the L x D matrix at the
problem sizes this package targets.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg


class NotPositiveDefiniteError(ValueError):
    """Raised when a matrix handed to an SPD solve fails the Cholesky test."""


def fix_sign(v: np.ndarray) -> np.ndarray:
    """Flip ``v`` so its first nonzero entry is positive.

    Eigen/singular vectors are only defined up to sign; pinning the sign
    makes every downstream result deterministic and testable.
    """
    v = np.asarray(v)
    nz = np.flatnonzero(np.abs(v) > 1e-14)
    if nz.size and v[nz[0]] < 0:
        return -v
    return v


def smallest_right_singular_vectors(A: np.ndarray, c: int) -> np.ndarray:
    """Return the ``c`` right-singular directions of ``A`` with smallest
    singular values, as an orthonormal D x c matrix ordered by ascending
    singular value.

    Computed from the symmetric eigendecomposition of the Gram matrix
    A.T @ A; each column's sign is fixed so the first nonzero entry is
    positive.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] < 1:
        raise ValueError("A must be a nonempty 2-d array")
    D = A.shape[1]
    if not 1 <= c <= D:
        raise ValueError(f"need 1 <= c <= {D}, got c={c}")
    gram = A.T @ A
    # eigh sorts eigenvalues ascending, so the first c eigenvectors are
    # exactly the smallest singular directions.
    _, vecs = np.linalg.eigh(gram)
    out = vecs[:, :c].copy()
    for j in range(c):
        out[:, j] = fix_sign(out[:, j])
    return out


def orthonormalize(V: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the column span of ``V`` (D x rank matrix).

    Rank-deficient input shrinks the number of columns; an all-zero or
    empty input yields a D x 0 matrix.
    """
    V = np.atleast_2d(np.asarray(V, dtype=float))
    if V.shape[1] == 0:
        return V.reshape(V.shape[0], 0)
    u, s, _ = np.linalg.svd(V, full_matrices=False)
    tol = max(V.shape) * np.finfo(float).eps * (s[0] if s.size else 0.0)
    rank = int(np.sum(s > tol))
    Q = u[:, :rank].copy()
    for j in range(rank):
        Q[:, j] = fix_sign(Q[:, j])
    return Q


def orthonormal_complement(B: np.ndarray, dim: int) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of span(B) in R^dim.

    ``B`` may have zero columns, in which case the identity is returned.
    """
    B = np.asarray(B, dtype=float).reshape(dim, -1)
    k = B.shape[1]
    if k == 0:
        return np.eye(dim)
    # Full SVD of B: the left singular vectors beyond rank(B) span the
    # complement.
    u, s, _ = np.linalg.svd(B, full_matrices=True)
    tol = dim * np.finfo(float).eps * (s[0] if s.size else 0.0)
    rank = int(np.sum(s > tol))
    return u[:, rank:].copy()


def principal_angles(U: np.ndarray, V: np.ndarray) -> np.ndarray:
    """Principal angles (radians, ascending) between span(U) and span(V).

    Both inputs must have orthonormal columns.
    """
    s = np.linalg.svd(np.asarray(U).T @ np.asarray(V), compute_uv=False)
    return np.arccos(np.clip(np.sort(s)[::-1], -1.0, 1.0))


class SpdFactor:
    """Cholesky factorization of a symmetric positive definite matrix,
    reusable across solves with the same matrix."""

    def __init__(self, G: np.ndarray):
        G = np.asarray(G, dtype=float)
        if G.ndim != 2 or G.shape[0] != G.shape[1]:
            raise ValueError("G must be square")
        sym_err = np.max(np.abs(G - G.T)) if G.size else 0.0
        scale = max(1.0, float(np.max(np.abs(G))) if G.size else 0.0)
        if sym_err > 1e-10 * scale:
            raise NotPositiveDefiniteError("matrix is not symmetric")
        try:
            self._cho = scipy.linalg.cho_factor(0.5 * (G + G.T), lower=True)
        except np.linalg.LinAlgError as exc:  # pragma: no cover - scipy raises its own
            raise NotPositiveDefiniteError(str(exc)) from exc
        except scipy.linalg.LinAlgError as exc:
            raise NotPositiveDefiniteError(str(exc)) from exc

    def solve(self, r: np.ndarray) -> np.ndarray:
        return scipy.linalg.cho_solve(self._cho, np.asarray(r, dtype=float))


def solve_spd(G: np.ndarray, r: np.ndarray) -> np.ndarray:
    """Solve G @ x = r for symmetric positive definite G via Cholesky.

    Raises NotPositiveDefiniteError if G is not symmetric within 1e-10
    (relative) or has a non-positive pivot. For repeated solves against
    the same G, build an :class:`SpdFactor` once instead.
    """
    return SpdFactor(G).solve(r)
