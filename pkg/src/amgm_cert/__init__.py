"""Certified series decomposition of the AM-GM gap and checks of strengthened AM-GM inequalities."""

__version__ = "0.1.0"

from .decomposition import (
    ConvergenceProfile,
    GapDecomposition,
    SeriesTerm,
    convergence_profile,
    decompose,
    decompose_to_tolerance,
    remainder,
    series_term,
)
from .inequalities import (
    EqualityCase,
    InequalityId,
    InequalityVerdict,
    Status,
    check_all,
    check_cauchy,
    check_pairwise,
    check_product_form,
    check_strong_v1,
    check_strong_v2,
    classify_equality,
)
from .means import MeanPair, Sample, arithmetic_mean, compute_means, geometric_mean
from .numerics import IntervalScalar, PrecisionContext
from .optimality import (
    FamilyHypothesis,
    Variant,
    constant_witness,
    falsify_alpha,
    family_rhs,
    gap_at_epsilon,
    h_monotonicity,
    sweep,
)

__all__ = [
    "arithmetic_mean",
    "check_all",
    "check_cauchy",
    "check_pairwise",
    "check_product_form",
    "check_strong_v1",
    "check_strong_v2",
    "classify_equality",
    "compute_means",
    "constant_witness",
    "convergence_profile",
    "ConvergenceProfile",
    "decompose",
    "decompose_to_tolerance",
    "EqualityCase",
    "falsify_alpha",
    "family_rhs",
    "FamilyHypothesis",
    "gap_at_epsilon",
    "GapDecomposition",
    "geometric_mean",
    "h_monotonicity",
    "InequalityId",
    "InequalityVerdict",
    "IntervalScalar",
    "MeanPair",
    "PrecisionContext",
    "remainder",
    "Sample",
    "series_term",
    "SeriesTerm",
    "Status",
    "sweep",
    "Variant",
]
