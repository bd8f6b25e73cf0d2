"""Correlated Bernoulli pair model, balanced estimators, and exact oracles."""

from .model import (
    CapacityError,
    DomainError,
    EdgeCellProbs,
    GraphPair,
    ModelParams,
    cell_probs,
    child_rng,
    point_probability,
    sample_pair,
)
from .stats import (
    CONVENTION_VALUE,
    DisagreementVector,
    ParamFunctionals,
    Tern,
    alignment_strength,
    delta_stat,
    densities,
    disagreement_vector,
    param_functionals,
)
from .balance import (
    Statistic,
    balance_brute,
    balanced_alignment_strength,
    balanced_dxdy,
    is_balanced,
    modified_alignment_strength,
    sigma2_umvue,
)
from .oracle import ExactMoments, class_probabilities, class_sum_vector, exact_moments, mse_against

__all__ = [
    "CapacityError",
    "CONVENTION_VALUE",
    "DisagreementVector",
    "DomainError",
    "EdgeCellProbs",
    "ExactMoments",
    "GraphPair",
    "ModelParams",
    "ParamFunctionals",
    "Statistic",
    "Tern",
    "alignment_strength",
    "balance_brute",
    "balanced_alignment_strength",
    "balanced_dxdy",
    "cell_probs",
    "child_rng",
    "class_probabilities",
    "class_sum_vector",
    "delta_stat",
    "densities",
    "disagreement_vector",
    "exact_moments",
    "is_balanced",
    "modified_alignment_strength",
    "mse_against",
    "param_functionals",
    "point_probability",
    "sample_pair",
    "sigma2_umvue",
]
