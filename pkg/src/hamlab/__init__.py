"""hamlab: Hamilton cycle counting, random graph processes, structural
certification, and rotation-extension search at desk scale."""

from .core import (
    BigCount,
    CapacityError,
    CycleCover,
    Digraph,
    Factor,
    FormatError,
    Graph,
    PreconditionError,
    RotationPath,
    canonical_cycle,
    cycle_edges,
    degrees,
    external_neighborhood,
    format_edge_list,
    hamming_distance,
    is_hamilton_cycle,
    isolated_budget,
    parse_edge_list,
    rotate,
    underlying,
)
from .count import (
    FactorCensus,
    LogValue,
    count_hamilton_cycles,
    count_hamilton_cycles_bruteforce,
    count_one_factors,
    count_perfect_matchings,
    count_two_factors,
    derived_constants,
    double_count_lower_bound,
    expected_hamilton_cycles,
    expected_two_factor_bound,
    iter_two_factors,
    permanent,
    permanent_naive,
    regular_matchings_lower_bound,
)
from .generate import (
    ExposureStream,
    ProcessTrace,
    Rng,
    derive_seed,
    graph_at,
    orient_randomly,
    process_hitting_graph,
    random_process,
    sample_gnm,
    sample_gnp,
    two_round_exposure,
)
from .harness import (
    ExperimentConfig,
    ExperimentResult,
    TrialFailure,
    TrialRow,
    experiment_concentration,
    experiment_expected_count,
    experiment_factor_pipeline,
    experiment_hitting_time,
    experiment_matchings,
    parse_experiment_config,
    read_results,
    run_experiment,
    summarize_rows,
    write_results,
)
from .posa import (
    ClosureResult,
    ConversionReport,
    RotationBudget,
    RoundRecord,
    convert_factor_to_hamilton,
    endpoint_closure,
    extend_path,
    find_hamilton_rotation,
    format_factor_lines,
    parse_factor_lines,
)
from .structure import (
    BipartiteGraph,
    ConstantsProfile,
    DEFAULT_CONSTANTS,
    EdgeDistributionReport,
    EdgeViolation,
    ExpanderCertificate,
    NoRegularSubgraphError,
    OreRyserResult,
    Violation,
    bipartite_double_cover,
    certify_p_expander,
    degree_window_core,
    edge_distribution_check,
    extract_regular_subgraph,
    format_constants_profile,
    low_degree_set,
    ore_ryser_check,
    parse_constants_profile,
    short_path_bound,
    verify_violation,
)

__version__ = "0.1.0"
