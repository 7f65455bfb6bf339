"""The three dual-component solvers.

``dpcp_lp``   : recursion of linear programs, one dual component at a
                time, each anchored at the previous normalized iterate.
``dpcp_irls`` : iteratively reweighted least squares on the full
                orthonormal basis of the complement.
``dpcp_d``    : denoised variant alternating soft-thresholding with a
                regularized least-squares step solved against a single
                Cholesky factorization.

Input columns are normalized to unit L2 norm on entry: the data model
lives on the sphere, and real or noisy inputs need the normalization.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import lp
from .numerics import SpdFactor, fix_sign, orthonormal_complement, smallest_right_singular_vectors

DEFAULT_EPSILON = 1e-3
DEFAULT_TMAX_LP = 10
DEFAULT_TMAX_IRLS = 100
DEFAULT_TMAX_D = 1000
DEFAULT_DELTA = 1e-6


@dataclass
class SolverConfig:
    """Convergence tolerance, iteration cap, regularizer and denoising
    threshold. ``tau=None`` lets dpcp_d pick its default 1/sqrt(L)."""

    epsilon: float = DEFAULT_EPSILON
    t_max: int = DEFAULT_TMAX_LP
    delta: float = DEFAULT_DELTA
    tau: float | None = None

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.t_max < 1:
            raise ValueError("t_max must be at least 1")
        if self.delta <= 0:
            raise ValueError("delta must be positive")
        if self.tau is not None and self.tau < 0:
            raise ValueError("tau must be nonnegative")


@dataclass
class SubspaceEstimate:
    """Orthonormal basis of the estimated orthogonal complement, with the
    per-component objective traces concatenated in order. The converged
    flags record whether each component stopped by its convergence rule
    rather than by hitting the iteration cap."""

    complement_basis: np.ndarray
    objective_trace: list[float] = field(default_factory=list)
    iterations_per_component: list[int] = field(default_factory=list)
    converged_per_component: list[bool] = field(default_factory=list)

    @property
    def iterations(self) -> int:
        return int(sum(self.iterations_per_component))


class ComponentSolverError(RuntimeError):
    """LP failure while computing one dual component."""

    def __init__(self, component: int, cause: Exception):
        super().__init__(f"component {component}: {cause}")
        self.component = component


def _normalize_columns(data: np.ndarray) -> np.ndarray:
    data = np.asarray(data, dtype=float)
    if data.ndim != 2 or data.shape[1] == 0:
        raise ValueError("data must be a nonempty D x L matrix")
    norms = np.linalg.norm(data, axis=0)
    if np.min(norms) <= 0:
        raise ValueError("data contains a zero column")
    return data / norms


def default_tau(n_points: int, sigma: float = 0.0) -> float:
    """Denoising threshold: 1/sqrt(L), lifted to sigma when the noise
    level is known and larger."""
    return max(float(sigma), 1.0 / np.sqrt(n_points))


def soft_threshold(v: np.ndarray, tau: float) -> np.ndarray:
    """Elementwise sign(v) * max(|v| - tau, 0)."""
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    v = np.asarray(v, dtype=float)
    return np.sign(v) * np.maximum(np.abs(v) - tau, 0.0)


def _init_direction(data: np.ndarray, found: list[np.ndarray]) -> np.ndarray:
    """Unit minimizer of ||data^T b||_2 over b orthogonal to the found
    components: smallest right-singular direction of the restricted data."""
    D = data.shape[0]
    B = np.column_stack(found) if found else np.zeros((D, 0))
    Q = orthonormal_complement(B, D)
    beta = smallest_right_singular_vectors(data.T @ Q, 1)[:, 0]
    b = Q @ beta
    return b / np.linalg.norm(b)


def dpcp_lp(data: np.ndarray, c: int, cfg: SolverConfig | None = None) -> SubspaceEstimate:
    """Estimate c dual components by the linear-programming recursion.

    Each component starts from the smallest singular direction of the
    data restricted to the complement of the components already found,
    then iterates the anchored L1 step until the normalized objective
    decrease falls to epsilon (relative) or t_max steps are taken.
    """
    cfg = cfg or SolverConfig(t_max=DEFAULT_TMAX_LP)
    X = _normalize_columns(data)
    D = X.shape[0]
    if not 1 <= c <= D:
        raise ValueError(f"need 1 <= c <= D, got c={c}")
    found: list[np.ndarray] = []
    trace: list[float] = []
    iters: list[int] = []
    converged: list[bool] = []
    for i in range(c):
        ortho = np.column_stack(found) if found else None
        n_hat = _init_direction(X, found)
        obj = float(np.sum(np.abs(X.T @ n_hat)))
        trace.append(obj)
        k = 0
        done = False
        prev_basis = None
        while k < cfg.t_max:
            prev_obj = obj
            k += 1
            try:
                # the previous optimal basis stays feasible under the new
                # anchor row (the vertex rescales), so later iterations
                # warm-start and need only marginal pivots
                problem, crash = lp.build_step_problem(X, n_hat, ortho)
                hints = [h for h in (prev_basis, crash) if h is not None]
                sol = lp.solve_standard_form(problem, initial_basis=hints or None)
                if sol.status != "optimal":
                    raise lp.SolverFailureError(f"step LP is {sol.status}")
            except lp.SolverFailureError as exc:
                raise ComponentSolverError(i, exc) from exc
            prev_basis = np.array(sol.basis)
            n_next = sol.x[2 * X.shape[1]:]
            n_hat_next = n_next / np.linalg.norm(n_next)
            new_obj = float(np.sum(np.abs(X.T @ n_hat_next)))
            stationary = np.max(np.abs(n_hat_next - n_hat)) <= 1e-12
            n_hat, obj = n_hat_next, new_obj
            trace.append(obj)
            if stationary or prev_obj - new_obj <= cfg.epsilon * max(prev_obj, np.finfo(float).tiny):
                done = True
                break
        iters.append(k)
        converged.append(done)
        found.append(n_hat)
    B = np.column_stack(found)
    B = _tidy_basis(B)
    return SubspaceEstimate(complement_basis=B, objective_trace=trace,
                            iterations_per_component=iters,
                            converged_per_component=converged)


def _tidy_basis(B: np.ndarray) -> np.ndarray:
    """Light Gram-Schmidt pass plus sign convention; components are already
    orthogonal by construction up to solver tolerance."""
    B = np.array(B, dtype=float)
    for j in range(B.shape[1]):
        for i in range(j):
            B[:, j] -= (B[:, i] @ B[:, j]) * B[:, i]
        B[:, j] /= np.linalg.norm(B[:, j])
        B[:, j] = fix_sign(B[:, j])
    return B


def dpcp_irls(data: np.ndarray, c: int, cfg: SolverConfig | None = None) -> SubspaceEstimate:
    """Estimate the whole complement basis at once by IRLS on the
    sum-of-row-norms objective ||data^T B||_{1,2} over orthonormal B."""
    cfg = cfg or SolverConfig(t_max=DEFAULT_TMAX_IRLS)
    X = _normalize_columns(data)
    D = X.shape[0]
    if not 1 <= c <= D:
        raise ValueError(f"need 1 <= c <= D, got c={c}")
    B = smallest_right_singular_vectors(X.T, c)
    obj = float(np.sum(np.linalg.norm(X.T @ B, axis=1)))
    trace = [obj]
    k = 0
    done = False
    while k < cfg.t_max:
        prev_obj = obj
        k += 1
        residuals = np.linalg.norm(X.T @ B, axis=1)
        w = 1.0 / np.maximum(cfg.delta, residuals)
        B = smallest_right_singular_vectors(X.T * np.sqrt(w)[:, None], c)
        obj = float(np.sum(np.linalg.norm(X.T @ B, axis=1)))
        trace.append(obj)
        if prev_obj - obj <= cfg.epsilon * max(prev_obj, np.finfo(float).tiny):
            done = True
            break
    for j in range(B.shape[1]):
        B[:, j] = fix_sign(B[:, j])
    return SubspaceEstimate(complement_basis=B, objective_trace=trace,
                            iterations_per_component=[k],
                            converged_per_component=[done])


def dpcp_d(data: np.ndarray, cfg: SolverConfig | None = None
           ) -> tuple[np.ndarray, np.ndarray, list[float]]:
    """Denoised single-component solver.

    Alternates y <- soft_threshold(data^T b, tau) with the regularized
    least-squares step (data data^T + delta I) xi = data y, b <- xi/|xi|,
    reusing one Cholesky factorization. Returns (y, b, objective trace)
    for J(y, b) = tau ||y||_1 + 0.5 ||y - data^T b||_2^2.
    """
    cfg = cfg or SolverConfig(t_max=DEFAULT_TMAX_D)
    X = _normalize_columns(data)
    D, L = X.shape
    tau = cfg.tau if cfg.tau is not None else default_tau(L)
    factor = SpdFactor(X @ X.T + cfg.delta * np.eye(D))
    b = smallest_right_singular_vectors(X.T, 1)[:, 0]
    y = np.zeros(L)

    def j_value(yv, bv):
        return float(tau * np.sum(np.abs(yv)) + 0.5 * np.sum((yv - X.T @ bv) ** 2))

    trace = [j_value(y, b)]
    k = 0
    while k < cfg.t_max:
        obj = trace[-1]
        y = soft_threshold(X.T @ b, tau)
        xi = factor.solve(X @ y)
        norm = np.linalg.norm(xi)
        k += 1
        if norm <= 1e-12:
            # everything thresholded away: keep the previous direction
            trace.append(j_value(y, b))
            break
        b = xi / norm
        new_obj = j_value(y, b)
        trace.append(new_obj)
        if obj - new_obj <= cfg.epsilon * max(obj, np.finfo(float).tiny):
            break
    return y, b, trace


def dpcp_d_basis(data: np.ndarray, c: int, cfg: SolverConfig | None = None) -> SubspaceEstimate:
    """Multi-component extension of dpcp_d by deflation: each next
    component is found on the data projected onto the complement of the
    components already computed."""
    X = _normalize_columns(data)
    D = X.shape[0]
    if not 1 <= c <= D:
        raise ValueError(f"need 1 <= c <= D, got c={c}")
    cfg = cfg or SolverConfig(t_max=DEFAULT_TMAX_D)
    found: list[np.ndarray] = []
    trace: list[float] = []
    iters: list[int] = []
    converged: list[bool] = []
    for _ in range(c):
        B = np.column_stack(found) if found else np.zeros((D, 0))
        Q = orthonormal_complement(B, D)
        proj = Q.T @ X
        norms = np.linalg.norm(proj, axis=0)
        keep = norms > 1e-12
        _, b_sub, sub_trace = dpcp_d(proj[:, keep], cfg)
        b = Q @ b_sub
        found.append(b / np.linalg.norm(b))
        trace.extend(sub_trace)
        iters.append(len(sub_trace) - 1)
        converged.append(len(sub_trace) - 1 < cfg.t_max)
    return SubspaceEstimate(complement_basis=_tidy_basis(np.column_stack(found)),
                            objective_trace=trace, iterations_per_component=iters,
                            converged_per_component=converged)
