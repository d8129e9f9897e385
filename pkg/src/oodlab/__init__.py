"""Tools for probing single-sample goodness-of-fit testing with density models.

The package bundles a small zoo of tractable distributions, score-preserving
alternative constructions, fitted test statistics, ROC/power evaluation
helpers, and a handful of reproducible experiment drivers exposed through the
``oodlab`` command line tool.
"""

from oodlab.rng import make_rng, split_rng
from oodlab.distributions import (
    DiagonalGaussian,
    FiniteDiscrete,
    Mixture,
    ProductBernoulli,
    UniformDiscrete,
    UnsupportedAnalyticEntropy,
    distribution_from_dict,
)
from oodlab.alternatives import (
    LevelSetCollapseSpec,
    level_set_collapse,
    probability_level_sets,
    quadrant_fold,
    radial_collapse,
)
from oodlab.statistics import (
    DoseLiteStatistic,
    FittedStatistic,
    LikelihoodRatioStatistic,
    LogLikelihoodStatistic,
    TypicalityStatistic,
    bits_per_dimension,
    estimate_entropy,
    silverman_bandwidth,
)
from oodlab.testing import (
    OneSidedAbove,
    OneSidedBelow,
    OutsideInterval,
    RocResult,
    bayes_error,
    exact_power_and_size,
    ks_critical_value,
    ks_distance,
    power_at_size,
    recast_rule,
    roc_and_auc,
)
from oodlab.scenarios import (
    EpsilonTransferSpec,
    NonIntegrableRatio,
    TypicalSetSpec,
    auc_by_quadrature,
    best_threshold_accuracy,
    epsilon_transfer,
    level_set_report,
    lr_optimal_model,
    min_epsilon,
    overlap_bound_report,
    score_preservation_report,
    swap_set_comparison,
    typical_mass,
    typical_mass_mc,
    typical_membership,
    wrong_model_report,
)
from oodlab.training import (
    GridDensityModel,
    TrainConfig,
    evaluate_grid,
    grid_mle_fit,
    grid_nt_fit,
)

__version__ = "0.1.0"

__all__ = [
    "make_rng",
    "split_rng",
    "DiagonalGaussian",
    "ProductBernoulli",
    "FiniteDiscrete",
    "UniformDiscrete",
    "Mixture",
    "UnsupportedAnalyticEntropy",
    "distribution_from_dict",
    "quadrant_fold",
    "radial_collapse",
    "probability_level_sets",
    "LevelSetCollapseSpec",
    "level_set_collapse",
    "FittedStatistic",
    "LogLikelihoodStatistic",
    "TypicalityStatistic",
    "LikelihoodRatioStatistic",
    "DoseLiteStatistic",
    "estimate_entropy",
    "bits_per_dimension",
    "silverman_bandwidth",
    "OneSidedBelow",
    "OneSidedAbove",
    "OutsideInterval",
    "recast_rule",
    "exact_power_and_size",
    "RocResult",
    "roc_and_auc",
    "power_at_size",
    "bayes_error",
    "ks_distance",
    "ks_critical_value",
    "NonIntegrableRatio",
    "lr_optimal_model",
    "auc_by_quadrature",
    "wrong_model_report",
    "EpsilonTransferSpec",
    "epsilon_transfer",
    "min_epsilon",
    "TypicalSetSpec",
    "typical_membership",
    "typical_mass",
    "typical_mass_mc",
    "swap_set_comparison",
    "score_preservation_report",
    "level_set_report",
    "best_threshold_accuracy",
    "overlap_bound_report",
    "GridDensityModel",
    "TrainConfig",
    "grid_mle_fit",
    "grid_nt_fit",
    "evaluate_grid",
]
