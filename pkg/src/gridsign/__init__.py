"""Approximate recovery of binary node labels on grids and expanders from
noisy node and edge observations, with exact small-scale baselines and the
combinatorial bound calculators that explain the error scaling."""

from .bounds import (
    LowerBoundStats,
    RefinedConstant,
    SeriesBound,
    ambiguous_node_rate,
    bad_region_prob_bound,
    exact_bad_region_prob,
    expander_error_bound,
    expander_error_given_bad,
    lower_bound_estimate,
    mincut_recovery_condition,
    mincut_region_count_bound,
    refined_constant,
    series_error_bound,
)
from .census import CycleCensus, count_saps, read_census, write_census
from .errors import CapacityError, DegenerateNoiseError
from .experiment import (
    ErrorRow,
    ErrorTable,
    ExperimentConfig,
    emit_csv,
    emit_plot,
    merge_tables,
    run_experiment,
)
from .graphs import (
    DualGraph,
    Graph,
    GridGraph,
    boundary,
    build_grid,
    connected_components,
    expansion_constant,
    min_cut,
    random_regular_graph,
    read_graph,
    write_graph,
)
from .inference import (
    FirstStageResult,
    GammaWeight,
    MarginalTable,
    agreement_score,
    gamma,
    map_full,
    marginal_predict,
    marginals,
    max_agreement_edges,
    max_agreement_exhaustive,
    two_step,
)
from .noise import (
    NoiseParams,
    Observations,
    all_plus_truth,
    checkerboard_truth,
    checkerboard_white_mask,
    hamming_error,
    random_truth,
    read_labeling,
    read_observations,
    sample_observations,
    sign_symmetric_error,
    write_labeling,
    write_observations,
)
from .oracles import (
    OracleReport,
    brute_force_marginals,
    brute_force_max,
    check_expander_bound,
    check_filled_components_bad,
    check_flipping_lemma,
)
from .regions import (
    FilledRegion,
    RegionSet,
    classify_region,
    dual_cycle_of_boundary,
    enumerate_filled_regions,
    fill_in,
    region_set,
)

__version__ = "0.1.0"
