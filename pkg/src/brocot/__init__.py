"""Moment sums over Stern-Brocot partitions of the unit interval.

Exact and deterministic floating-point evaluation of the gap-length
moment sums of the mediant levels, the composition-set partitions behind
their asymptotics, the zeta-ratio constants of the main terms, and
least-squares tooling to confront measured series with the predicted
expansions.
"""

from .asymptotic_fit import (
    ExpansionModel,
    RankDeficientError,
    SlopeConverged,
    SlopeEstimate,
    error_slope,
    extrapolate_limit,
    fit_expansion,
)
from .brocot_sums import (
    BetaRangeError,
    BoundsReport,
    COEFFICIENT_KINDS,
    DecompositionCheck,
    MomentQuery,
    PartitionParams,
    PartitionReport,
    SeriesSample,
    TruncatedCoefficient,
    adjacent_gap_sum,
    all_compositions,
    big_part_decomposition_check,
    binomial_series_coeff,
    bounds_report,
    canonical_compositions,
    default_params,
    flank_moment_sum,
    partition_sums,
    sigma_f,
    sigma_q,
    truncated_coefficient,
)
from .continuants import (
    NeighborTriple,
    cf_value,
    continuant,
    is_canonical,
    max_depth_bound,
    neighbor_denominators,
    reversed_cf_value,
    split_identity_check,
)
from .stern_brocot import (
    GapFrame,
    GuardError,
    LevelStats,
    brocot_order,
    cf_of_fraction,
    gaps,
    level,
    level_stats,
    mediant,
    traverse_reduce,
)
from .zeta_constants import (
    FlankLimit,
    TotientSum,
    ZetaConstants,
    constants_for,
    flank_moment_limit,
    totient_sum_oracle,
    zeta,
)

__version__ = "0.1.0"
