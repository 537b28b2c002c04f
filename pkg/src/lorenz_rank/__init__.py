"""Fairness-aware stochastic ranking via rank-weighted welfare maximization."""

__version__ = "0.1.0"

from .model import (  # noqa: F401
    Assignment,
    ExposureWeights,
    PreferenceMatrix,
    RankingPolicy,
    UtilityProfile,
    dcg_exposure_weights,
    deterministic_policy,
    item_exposures,
    merit_weighted_exposures,
    reconstruct_dense,
    user_utilities,
    utility_profile,
)
from .welfare import (  # noqa: F401
    Dominance,
    GgfWeights,
    bonferroni_weights,
    ggf_supergradient,
    ggf_value,
    gini_index,
    gini_weights,
    lorenz_curve,
    lorenz_dominance,
    lorenz_to_owa,
    parse_weight_scheme,
    quantile_owa_weights,
    two_sided_objective,
    uniform_weights,
)
from .isotonic import (  # noqa: F401
    COMPILED_PAV,
    MoreauParams,
    ProjectionResult,
    moreau_envelope_value,
    moreau_grad_dual,
    pav_nondecreasing,
    permutahedron_project,
)
from .optimizer import (  # noqa: F401
    ConvergenceTrace,
    OptimizerConfig,
    beta_schedule,
    default_beta0,
    eq_exposure_gradient_scores,
    eq_exposure_objective,
    fw_smoothing,
    fw_subgradient,
    run_optimizer,
    update_direction,
    welf_gradient_scores,
    welf_objective,
)
from .reciprocal import (  # noqa: F401
    ReciprocalInstance,
    eq_utility_objective,
    reciprocal_objective,
    reciprocal_tradeoff_weights,
    reciprocal_update_direction,
    two_sided_utilities,
)
from .harness import (  # noqa: F401
    AuditReport,
    OracleResult,
    SweepRecord,
    convergence_compare,
    grid_oracle,
    lorenz_audit,
    pareto_sweep,
    quantile_cumulative_utility,
    synthetic_prefs,
)
