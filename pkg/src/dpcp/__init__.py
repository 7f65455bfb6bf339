"""Dual principal component pursuit: robust subspace recovery through
L1 hyperplane pursuit on the unit sphere.

The package estimates an orthonormal basis of the orthogonal complement of
an unknown inlier subspace from data contaminated by outliers, via a
recursion of linear programs, an iteratively reweighted least-squares
scheme, or a denoised alternating-minimization variant, and ships the
condition checkers and synthetic-experiment harness used to study them.
"""

from .datagen import Dataset, random_subspace, synthesize, unit_sphere_sample
from .solvers import SolverConfig, SubspaceEstimate, dpcp_d, dpcp_irls, dpcp_lp, soft_threshold
from .baselines import RansacConfig, ransac, ransac_trials
from .evaluation import GridConfig, Signal, distance_signal, perfect_separation, roc, run_grid
from .theory import (
    ContinuousModel,
    TheoremConditions,
    brute_force_maximal_hyperplane,
    c_coefficient,
    continuous_objective,
    estimate_average_error,
    estimate_circumradius,
    kstar_bound,
    simulate_continuous_recursion,
    theorem_conditions,
)

__all__ = [
    "Dataset",
    "unit_sphere_sample",
    "random_subspace",
    "synthesize",
    "SolverConfig",
    "SubspaceEstimate",
    "dpcp_lp",
    "dpcp_irls",
    "dpcp_d",
    "soft_threshold",
    "RansacConfig",
    "ransac",
    "ransac_trials",
    "Signal",
    "GridConfig",
    "distance_signal",
    "roc",
    "perfect_separation",
    "run_grid",
    "ContinuousModel",
    "TheoremConditions",
    "c_coefficient",
    "continuous_objective",
    "simulate_continuous_recursion",
    "kstar_bound",
    "estimate_average_error",
    "estimate_circumradius",
    "theorem_conditions",
    "brute_force_maximal_hyperplane",
]
