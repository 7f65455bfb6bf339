"""Continuous-model quantities, the finite-convergence simulation and
bound for the anchored recursion, Monte-Carlo estimators for the
uniformity parameters and circumradii, and the sufficient-condition
checkers for global optimality and recursion convergence.

Also houses the small brute-force oracles (maximal hyperplane by subset
enumeration) used to validate the solvers on desk-scale instances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .datagen import unit_sphere_sample
from .numerics import fix_sign

_LOGSPACE_CUTOFF = 150


class DegenerateDataError(RuntimeError):
    pass


class InternalInconsistencyError(RuntimeError):
    """The angle-threshold argument fell outside [-1, 1] even though the
    ratio condition held; this should be impossible."""


def _log_double_factorial(k: int) -> float:
    # k!! = 2^(k/2) (k/2)!           for even k
    # k!! = k! / (2^((k-1)/2) ((k-1)/2)!)  for odd k
    if k <= 0:
        return 0.0
    if k % 2 == 0:
        h = k // 2
        return h * math.log(2.0) + math.lgamma(h + 1)
    h = (k - 1) // 2
    return math.lgamma(k + 1) - h * math.log(2.0) - math.lgamma(h + 1)


def c_coefficient(D: int) -> float:
    """Average height of the unit hemisphere of R^D: the mean of |b . z|
    over the unit sphere, equal to (D-2)!!/(D-1)!! times 2/pi for even D
    and times 1 for odd D (empty products are 1)."""
    if D < 1:
        raise ValueError("D must be at least 1")
    factor = 2.0 / math.pi if D % 2 == 0 else 1.0
    if D <= _LOGSPACE_CUTOFF:
        num = 1.0
        for k in range(D - 2, 1, -2):
            num *= k
        den = 1.0
        for k in range(D - 1, 1, -2):
            den *= k
        return factor * num / den
    return factor * math.exp(_log_double_factorial(D - 2) - _log_double_factorial(D - 1))


@dataclass
class ContinuousModel:
    """Population model: M outlier weight on the full sphere, N inlier
    weight on the subspace sphere, with the hemisphere-height constants
    and the convergence rate alpha = N c_d / (M c_D)."""

    M: int
    N: int
    D: int
    d: int
    c_D: float = 0.0
    c_d: float = 0.0
    alpha: float = 0.0

    def __post_init__(self):
        if not 1 <= self.d <= self.D:
            raise ValueError("need 1 <= d <= D")
        if self.M < 1 or self.N < 1:
            raise ValueError("need M >= 1 and N >= 1")
        self.c_D = c_coefficient(self.D)
        self.c_d = c_coefficient(self.d)
        self.alpha = self.N * self.c_d / (self.M * self.c_D)


def continuous_objective(norm_b: float, phi: float, m: ContinuousModel) -> float:
    """Population value of the L1 objective at a vector of norm ``norm_b``
    whose principal angle from the inlier subspace is ``phi``."""
    if norm_b < 0:
        raise ValueError("norm_b must be nonnegative")
    if not 0.0 <= phi <= math.pi / 2 + 1e-12:
        raise ValueError("phi must lie in [0, pi/2]")
    return norm_b * (m.M * m.c_D + m.N * m.c_d * math.cos(phi))


def simulate_continuous_recursion(alpha: float, phi0: float) -> tuple[list[float], int]:
    """Iterate the population angle update phi <- phi + asin(alpha sin phi)
    until tan(phi) >= 1/alpha, after which the next angle is pi/2 and the
    sequence stays there. Returns (angles including phi0, first index at
    pi/2)."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if not 0.0 < phi0 <= math.pi / 2:
        raise ValueError("phi0 must lie in (0, pi/2]")
    angles = [phi0]
    phi = phi0
    while phi < math.pi / 2:
        if math.tan(phi) >= 1.0 / alpha:
            phi = math.pi / 2
        else:
            phi = phi + math.asin(alpha * math.sin(phi))
        angles.append(phi)
    return angles, len(angles) - 1


def kstar_bound(alpha: float, phi0: float) -> int:
    """Iteration bound for the population recursion: 0 at phi0 = pi/2,
    1 once tan(phi0) >= 1/alpha, else
    ceil((atan(1/alpha) - phi0) / asin(alpha sin phi0)) + 1."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if not 0.0 < phi0 <= math.pi / 2:
        raise ValueError("phi0 must lie in (0, pi/2]")
    if phi0 == math.pi / 2:
        return 0
    if math.tan(phi0) >= 1.0 / alpha:
        return 1
    step = math.asin(alpha * math.sin(phi0))
    return math.ceil((math.atan(1.0 / alpha) - phi0) / step) + 1


def average_direction_error(points: np.ndarray, probes: np.ndarray, c: float) -> np.ndarray:
    """Per-probe deviation || c b - mean_j sign(b . y_j) y_j ||_2 with
    sign(0) = 0 exactly."""
    points = np.asarray(points, dtype=float)
    probes = np.asarray(probes, dtype=float)
    signs = np.sign(probes.T @ points)            # (p, n)
    avg = (signs @ points.T) / points.shape[1]    # (p, D)
    return np.linalg.norm(c * probes.T - avg, axis=1)


def estimate_average_error(points: np.ndarray, restrict: np.ndarray | None = None,
                           probes: int = 10_000, seed: int = 0) -> float:
    """Monte-Carlo estimate (a lower bound, increasing in the probe count)
    of the worst-case deviation of the signed sample mean from its
    population value c b.

    For inliers pass their subspace basis as ``restrict``: probes are then
    drawn on the sphere of that subspace and the constant is the one of
    the intrinsic dimension.
    """
    points = np.asarray(points, dtype=float)
    D, n = points.shape
    if n == 0:
        raise ValueError("need at least one point")
    if restrict is None:
        c = c_coefficient(D)
        b = unit_sphere_sample(D, probes, seed)
    else:
        restrict = np.asarray(restrict, dtype=float)
        d = restrict.shape[1]
        c = c_coefficient(d)
        b = restrict @ unit_sphere_sample(d, probes, seed)
    best = 0.0
    chunk = max(1, 4_000_000 // max(1, n))  # cap the probe-by-point sign matrix
    for lo in range(0, probes, chunk):
        errs = average_direction_error(points, b[:, lo:lo + chunk], c)
        best = max(best, float(errs.max()))
    return best


def estimate_circumradius(points: np.ndarray, K: int, budget: int = 20_000,
                          seed: int = 0) -> float:
    """Largest circumradius max ||sum_i s_i y_{j_i}||_2 over K-column
    subsets and sign patterns s in {-1, +1}^K. The circumradius of the
    sign polytope is attained at a vertex because the norm is convex.

    Exhaustive when C(n, K) 2^K fits the budget, otherwise random subsets
    with coordinate (greedy sign) ascent per subset.
    """
    points = np.asarray(points, dtype=float)
    D, n = points.shape
    if not 0 <= K <= n:
        raise ValueError(f"need 0 <= K <= {n}")
    if K == 0:
        return 0.0
    count = math.comb(n, K) * (2 ** K)
    if count <= budget:
        best = 0.0
        patterns = np.array(list(np.ndindex(*(2,) * K))) * 2 - 1  # each row in {-1,1}^K
        for subset in combinations(range(n), K):
            sub = points[:, subset]                # (D, K)
            norms = np.linalg.norm(patterns @ sub.T, axis=1)
            best = max(best, float(norms.max()))
        return best
    gen = np.random.Generator(np.random.Philox(seed))
    n_subsets = max(1, budget // (2 * K))
    best = 0.0
    for _ in range(n_subsets):
        subset = gen.choice(n, size=K, replace=False)
        sub = points[:, subset]
        s = np.ones(K)
        v = sub @ s
        improved = True
        while improved:
            improved = False
            for i in range(K):
                # flipping s_i helps iff s_i y_i . v < ||y_i||^2
                if s[i] * (sub[:, i] @ v) < sub[:, i] @ sub[:, i] - 1e-12:
                    v = v - 2.0 * s[i] * sub[:, i]
                    s[i] = -s[i]
                    improved = True
        best = max(best, float(np.linalg.norm(v)))
    return best


@dataclass
class TheoremConditions:
    """Outcome of the sufficient-condition check: the outlier/inlier ratio
    gamma, the estimated uniformity parameters, the circumradius maps, the
    verdict, and the minimum initialization angle phi0_star (radians)."""

    gamma: float
    eps_O: float
    eps_X: float
    circum_O: dict[int, float]
    circum_X: dict[int, float]
    condition_holds: bool
    phi0_star: float


def required_splits(D: int, d: int) -> list[tuple[int, int]]:
    """(K1, K2) pairs with K1 + K2 = D - 1, K1 >= 1 outliers and
    0 <= K2 <= d - 1 inliers. K2 = 0 is included (conservative: the
    stated condition ranges over positive K2, its proof over K2 >= 0)."""
    pairs = []
    for k2 in range(0, d):
        k1 = D - 1 - k2
        if k1 >= 1:
            pairs.append((k1, k2))
    return pairs


def theorem_conditions(m: ContinuousModel, eps_O: float, eps_X: float,
                       circum_O: dict[int, float], circum_X: dict[int, float]
                       ) -> TheoremConditions:
    """Evaluate the ratio condition over every (K1, K2) split and, when it
    holds, the minimum initialization angle

        phi0_star = acos((c_d - eps_X - 2 gamma eps_O) / (c_d + eps_X)).
    """
    gamma = m.M / m.N
    splits = required_splits(m.D, m.d)
    bound = math.inf
    for k1, k2 in splits:
        if k1 not in circum_O:
            raise ValueError(f"circum_O missing K={k1}")
        r_o = circum_O[k1]
        r_x = 0.0 if k2 == 0 else circum_X.get(k2, None)
        if r_x is None:
            raise ValueError(f"circum_X missing K={k2}")
        for numer, denom in (
            (m.c_d - eps_X, 2.0 * eps_O),
            (m.c_d - eps_X - (r_o + r_x) / m.N, eps_O),
        ):
            if denom > 0:
                bound = min(bound, numer / denom)
            elif numer <= 0:
                bound = -math.inf
    holds = gamma < bound
    arg = (m.c_d - eps_X - 2.0 * gamma * eps_O) / (m.c_d + eps_X)
    if holds and abs(arg) > 1.0 + 1e-12:
        raise InternalInconsistencyError(
            f"ratio condition holds but angle argument is {arg}")
    phi0_star = min(math.acos(min(1.0, max(-1.0, arg))), math.pi / 2)
    return TheoremConditions(gamma=gamma, eps_O=eps_O, eps_X=eps_X,
                             circum_O=dict(circum_O), circum_X=dict(circum_X),
                             condition_holds=holds, phi0_star=phi0_star)


def brute_force_maximal_hyperplane(data: np.ndarray, tol: float = 1e-9
                                   ) -> tuple[np.ndarray, int]:
    """Maximal hyperplane by enumeration: every full-rank (D-1)-subset of
    columns proposes its unit normal; the winner contains the most points
    (|data^T b| <= tol), lowest subset index on ties. Only feasible for
    small C(L, D-1)."""
    data = np.asarray(data, dtype=float)
    D, L = data.shape
    if L < D - 1:
        raise ValueError(f"need at least D-1={D - 1} columns")
    best_normal = None
    best_count = -1
    for subset in combinations(range(L), D - 1):
        sub = data[:, subset]
        u, s, _ = np.linalg.svd(sub, full_matrices=True)
        if D > 1 and (s.size < D - 1 or s[D - 2] <= 1e-12 * max(1.0, s[0])):
            continue  # rank-deficient subset
        normal = u[:, -1]
        count = int(np.sum(np.abs(data.T @ normal) <= tol))
        if count > best_count:
            best_count = count
            best_normal = normal
    if best_normal is None:
        raise DegenerateDataError("all (D-1)-subsets were rank-deficient")
    return fix_sign(best_normal), best_count
