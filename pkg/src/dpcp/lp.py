"""Dense standard-form linear programming.

A two-phase revised simplex with an explicitly maintained basis inverse,
Dantzig pricing with a Bland fallback for anti-cycling, and periodic
refactorization. Problems here are small and dense (a few hundred rows,
a couple thousand columns), which this implementation is tuned for.

The module also contains the builder that encodes one step of the L1
hyperplane-pursuit recursion

    min ||data^T b||_1   s.t.   b . anchor = 1,  b perp ortho

as a standard-form LP over (u+, u-, b) with u+ - u- = data^T b.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.linalg.blas
from threadpoolctl import threadpool_limits

PIVOT_TOL = 1e-10
FEAS_TOL = 1e-9
ENTER_TOL = 1e-9
REFACTOR_EVERY = 100


class SolverFailureError(RuntimeError):
    """The LP could not be solved to a usable vertex (degenerate input,
    iteration cap, or a step LP that came back infeasible/unbounded)."""


@dataclass
class LpProblem:
    """min cost . x  s.t.  constraint_matrix @ x = rhs, with x_j >= 0
    wherever nonneg_mask[j] is True and x_j free otherwise.

    Free variables are handled by splitting x_j = x_j^+ - x_j^-; the
    negative parts are appended after the declared variables in index
    order, which fixes the internal column layout used by ``basis``
    indices and ``initial_basis`` hints.
    """

    cost: np.ndarray
    constraint_matrix: np.ndarray
    rhs: np.ndarray
    nonneg_mask: np.ndarray

    def __post_init__(self):
        self.cost = np.asarray(self.cost, dtype=float)
        self.constraint_matrix = np.atleast_2d(np.asarray(self.constraint_matrix, dtype=float))
        self.rhs = np.asarray(self.rhs, dtype=float)
        self.nonneg_mask = np.asarray(self.nonneg_mask, dtype=bool)
        m, n = self.constraint_matrix.shape
        if self.cost.shape != (n,) or self.rhs.shape != (m,) or self.nonneg_mask.shape != (n,):
            raise ValueError("inconsistent LP dimensions")
        if not (np.all(np.isfinite(self.cost)) and np.all(np.isfinite(self.constraint_matrix))
                and np.all(np.isfinite(self.rhs))):
            raise ValueError("LP data must be finite")


@dataclass
class LpSolution:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: np.ndarray | None = None
    objective: float = float("nan")
    basis: tuple[int, ...] = field(default_factory=tuple)


def _split_free(p: LpProblem) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return (A, b, c) of the all-nonnegative internal form."""
    free = ~p.nonneg_mask
    if not free.any():
        return p.constraint_matrix.copy(), p.rhs.copy(), p.cost.copy()
    A = np.hstack([p.constraint_matrix, -p.constraint_matrix[:, free]])
    c = np.concatenate([p.cost, -p.cost[free]])
    return A, p.rhs.copy(), c


def _recombine(p: LpProblem, z: np.ndarray) -> np.ndarray:
    free_idx = np.flatnonzero(~p.nonneg_mask)
    n = p.cost.size
    x = z[:n].copy()
    x[free_idx] -= z[n:n + free_idx.size]
    return x


class _Simplex:
    """Revised simplex state over min c.z s.t. A z = b, z >= 0."""

    def __init__(self, A: np.ndarray, b: np.ndarray, c: np.ndarray, basis: np.ndarray):
        self.A = np.asfortranarray(A)
        self.b = b
        self.c = c
        self.basis = np.asarray(basis, dtype=int).copy()
        self.m, self.n = A.shape
        self._refactor()

    def _refactor(self):
        B = self.A[:, self.basis]
        try:
            self.Binv = np.asfortranarray(np.linalg.inv(B))
        except np.linalg.LinAlgError as exc:
            raise SolverFailureError("singular basis") from exc
        self.xB = self.Binv @ self.b

    def objective(self) -> float:
        return float(self.c[self.basis] @ self.xB)

    def run(self, allow_unbounded: bool) -> str:
        """Pivot to optimality. Returns "optimal" or "unbounded"."""
        m, n = self.m, self.n
        bland = False
        stall = 0
        stall_limit = 2 * (m + n)
        best = self.objective()
        max_iter = 50 * (m + n) + 10000
        in_basis = np.zeros(n, dtype=bool)
        in_basis[self.basis] = True
        reduced = np.empty(n)
        for it in range(max_iter):
            y = self.c[self.basis] @ self.Binv
            np.dot(y, self.A, out=reduced)
            np.subtract(self.c, reduced, out=reduced)
            reduced[in_basis] = 0.0
            if bland:
                cands = np.flatnonzero(reduced < -ENTER_TOL)
                if cands.size == 0:
                    return "optimal"
                q = int(cands[0])
            else:
                q = int(np.argmin(reduced))
                if reduced[q] >= -ENTER_TOL:
                    return "optimal"
            d = self.Binv @ self.A[:, q]
            eligible = np.flatnonzero(d > PIVOT_TOL)
            if eligible.size == 0:
                if allow_unbounded:
                    return "unbounded"
                raise SolverFailureError("phase-1 subproblem reported unbounded")
            ratios = self.xB[eligible] / d[eligible]
            theta = np.min(ratios)
            ties = eligible[ratios <= theta + 1e-12]
            # lowest leaving-variable index on ties: deterministic and
            # consistent with Bland's rule.
            r = int(ties[np.argmin(self.basis[ties])])
            theta = self.xB[r] / d[r]
            self.xB -= theta * d
            self.xB[r] = theta
            np.maximum(self.xB, 0.0, out=self.xB)
            in_basis[self.basis[r]] = False
            in_basis[q] = True
            self.basis[r] = q
            piv = d[r]
            row = self.Binv[r] / piv
            self.Binv[r] = row
            d[r] = 0.0
            # in-place rank-1 update Binv -= d row^T
            self.Binv = scipy.linalg.blas.dger(-1.0, d, row, a=self.Binv,
                                               overwrite_a=1)
            if (it + 1) % REFACTOR_EVERY == 0:
                self._refactor()
                np.maximum(self.xB, 0.0, out=self.xB)
            z = self.objective()
            if z < best - 1e-12 * (1.0 + abs(best)):
                best = z
                stall = 0
            else:
                stall += 1
                if stall > stall_limit:
                    bland = True
        raise SolverFailureError("simplex iteration cap exceeded")


def _valid_initial_basis(A: np.ndarray, b: np.ndarray, basis) -> np.ndarray | None:
    """Return the basis as an index array if it is square, invertible and
    primal feasible for (A, b); otherwise None."""
    basis = np.asarray(basis, dtype=int)
    m = A.shape[0]
    if basis.shape != (m,) or np.unique(basis).size != m:
        return None
    if basis.min() < 0 or basis.max() >= A.shape[1]:
        return None
    try:
        xB = np.linalg.solve(A[:, basis], b)
    except np.linalg.LinAlgError:
        return None
    if np.min(xB, initial=0.0) < -FEAS_TOL * (1.0 + np.linalg.norm(b)):
        return None
    return basis


def solve_standard_form(p: LpProblem, initial_basis=None) -> LpSolution:
    """Solve the LP to an optimal vertex.

    ``initial_basis`` is an optional basis hint (or list of hints, tried
    in order): column indices into the internal (free-split) layout.
    When a hint describes a feasible basis, phase 1 is skipped.
    Infeasible and unbounded problems are encoded in the returned status,
    never raised.
    """
    # the pivot loop is a stream of small gemv/ger calls where BLAS thread
    # handoff costs far more than the arithmetic
    with threadpool_limits(limits=1, user_api="blas"):
        return _solve_standard_form(p, initial_basis)


def _solve_standard_form(p: LpProblem, initial_basis=None) -> LpSolution:
    A, b, c = _split_free(p)
    m, n = A.shape

    sim = None
    if initial_basis is not None:
        if (isinstance(initial_basis, (list, tuple)) and len(initial_basis)
                and not np.isscalar(initial_basis[0])):
            hints = list(initial_basis)
        else:
            hints = [initial_basis]
        for hint in hints:
            basis = _valid_initial_basis(A, b, hint)
            if basis is not None:
                sim = _Simplex(A, b, c, basis)
                np.maximum(sim.xB, 0.0, out=sim.xB)
                break

    if sim is None:
        # Phase 1: artificial columns form the starting basis; rows are
        # sign-flipped so the artificial solution is feasible.
        flip = b < 0
        A1 = A.copy()
        A1[flip] *= -1.0
        b1 = np.abs(b)
        A_art = np.hstack([A1, np.eye(m)])
        c_art = np.concatenate([np.zeros(n), np.ones(m)])
        sim1 = _Simplex(A_art, b1, c_art, np.arange(n, n + m))
        sim1.run(allow_unbounded=False)
        if sim1.objective() > FEAS_TOL * (1.0 + np.linalg.norm(b)) * m:
            return LpSolution(status="infeasible")
        keep_rows = np.ones(m, dtype=bool)
        for r in range(m):
            if sim1.basis[r] < n:
                continue
            # artificial still basic (at zero level): pivot it out on any
            # usable real column, else the row is redundant and dropped.
            row = sim1.Binv[r] @ A1
            row[sim1.basis[sim1.basis < n]] = 0.0
            q = int(np.argmax(np.abs(row)))
            if abs(row[q]) > 1e-7:
                d = sim1.Binv @ A_art[:, q]
                piv = d[r]
                sim1.Binv[r] /= piv
                d[r] = 0.0
                sim1.Binv -= np.outer(d, sim1.Binv[r])
                sim1.basis[r] = q
            else:
                keep_rows[r] = False
        basis = sim1.basis[keep_rows]
        if not keep_rows.all():
            A1 = A1[keep_rows]
            b1 = b1[keep_rows]
        sim = _Simplex(A1, b1, c, basis)
        np.maximum(sim.xB, 0.0, out=sim.xB)

    status = sim.run(allow_unbounded=True)
    if status == "unbounded":
        return LpSolution(status="unbounded")

    # Final solve against the factored basis rather than the accumulated
    # inverse, to remove pivot drift.
    xB = np.linalg.solve(sim.A[:, sim.basis], sim.b)
    z = np.zeros(n)
    z[sim.basis] = np.maximum(xB, 0.0)
    x = _recombine(p, z)
    residual = np.linalg.norm(p.constraint_matrix @ x - p.rhs)
    if residual > FEAS_TOL * (1.0 + np.linalg.norm(p.rhs)) * 10:
        raise SolverFailureError(f"vertex residual {residual:.2e} out of tolerance")
    return LpSolution(
        status="optimal",
        x=x,
        objective=float(p.cost @ x),
        basis=tuple(int(i) for i in sim.basis),
    )


def build_step_problem(data: np.ndarray, anchor: np.ndarray,
                       ortho: np.ndarray | None = None) -> tuple[LpProblem, np.ndarray]:
    """Encode one recursion step as a standard LP and a warm-start basis.

    Variables are [u+ (L), u- (L), b (D, free)]; constraints are
    u+ - u- = data^T b, anchor . b = 1 and ortho^T b = 0. The warm basis
    is built from a feasible point supported on 1+k coordinates of b,
    so the solver can skip phase 1.
    """
    data = np.asarray(data, dtype=float)
    D, L = data.shape
    anchor = np.asarray(anchor, dtype=float).reshape(D)
    if ortho is None:
        ortho = np.zeros((D, 0))
    ortho = np.asarray(ortho, dtype=float).reshape(D, -1)
    k = ortho.shape[1]

    A = np.zeros((L + 1 + k, 2 * L + D))
    A[:L, :L] = np.eye(L)
    A[:L, L:2 * L] = -np.eye(L)
    A[:L, 2 * L:] = -data.T
    A[L, 2 * L:] = anchor
    if k:
        A[L + 1:, 2 * L:] = ortho.T
    rhs = np.zeros(L + 1 + k)
    rhs[L] = 1.0
    cost = np.concatenate([np.ones(2 * L), np.zeros(D)])
    nonneg = np.concatenate([np.ones(2 * L, dtype=bool), np.zeros(D, dtype=bool)])
    problem = LpProblem(cost=cost, constraint_matrix=A, rhs=rhs, nonneg_mask=nonneg)

    # Feasible point: restrict b to 1+k well-conditioned coordinates of
    # the (1+k) x D system [anchor; ortho^T] b = e_1 and read u off it.
    # A singular restriction (degenerate anchor) just means no warm start.
    req = np.vstack([anchor[None, :], ortho.T])
    _, _, perm = scipy.linalg.qr(req, pivoting=True)
    cols = np.sort(perm[:1 + k])
    try:
        restricted = np.linalg.solve(req[:, cols], np.eye(1 + k)[:, 0])
    except np.linalg.LinAlgError:
        return problem, None
    b0 = np.zeros(D)
    b0[cols] = restricted
    t = data.T @ b0
    # internal layout: u+ j -> j, u- j -> L+j, b+ i -> 2L+i, b- i -> 2L+D+i
    basis = np.where(t >= 0, np.arange(L), L + np.arange(L))
    b_cols = np.where(b0[cols] >= 0, 2 * L + cols, 2 * L + D + cols)
    return problem, np.concatenate([basis, b_cols])


def dpcp_lp_step(data: np.ndarray, anchor: np.ndarray,
                 ortho: np.ndarray | None = None) -> tuple[np.ndarray, float]:
    """Minimize ||data^T b||_1 subject to b . anchor = 1 and b perp ortho.

    Returns the minimizing b and the optimal objective value. The anchor
    must be orthogonal to the columns of ``ortho``. Raises
    SolverFailureError when the LP is degenerate (infeasible/unbounded).
    """
    data = np.asarray(data, dtype=float)
    D, L = data.shape
    anchor = np.asarray(anchor, dtype=float).reshape(D)
    if ortho is not None and ortho.size:
        if np.max(np.abs(np.asarray(ortho).T @ anchor)) > 1e-6:
            raise ValueError("anchor must be orthogonal to ortho columns")
    problem, warm = build_step_problem(data, anchor, ortho)
    sol = solve_standard_form(problem, initial_basis=warm if warm is not None else None)
    if sol.status != "optimal":
        raise SolverFailureError(f"step LP is {sol.status}")
    n = sol.x[2 * L:]
    return n, float(sol.objective)
