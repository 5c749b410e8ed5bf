"""Satellite ground network planning with feed-switching: instances, decoder, solvers."""

from .model import (
    FEED_STATION,
    SATELLITE,
    STATION,
    AntennaRef,
    FeedingWindow,
    GroundStation,
    Instance,
    MalformedScheduleError,
    Placement,
    Rule,
    Satellite,
    Schedule,
    Task,
    TimingParams,
    ValidationReport,
    VisibleWindow,
    Violation,
    busy_intervals,
    fitness,
    validate_schedule,
)
from .io import (
    FORMAT_VERSION,
    GenerationError,
    GeneratorConfig,
    InstanceFormatError,
    generate_instance,
    load_instance,
    load_plan,
    read_instance,
    read_plan,
    save_instance,
    save_plan,
    write_instance,
    write_plan,
)
from .similarity import (
    ATTRIBUTES,
    DegenerateAttributeError,
    TaskSimilarityMatrix,
    attribute_matrix,
    generation_threshold,
    individual_similarity,
    population_similarity_stats,
    rvw_weights,
    task_similarity_matrix,
)
from .decoder import DecodeContext, associate_feed_windows, decode, get_context
from .dsga import (
    DsgaConfig,
    DsgaResult,
    ElitePool,
    Individual,
    OperatorBank,
    apply_operator,
    evolve,
    init_population,
    pick_operator,
    roulette_select,
    update_score,
    update_weights,
)
from .oracle import (
    OracleResult,
    PlacementSim,
    SearchResult,
    exact_optimum,
    greedy_profit,
    random_search,
)
from .bench import (
    ALGORITHMS,
    RunRecord,
    SuiteConfig,
    SummaryRow,
    run_algorithm,
    run_suite,
    summarize,
    write_report,
)

__version__ = "0.1.0"

__all__ = [
    "ALGORITHMS",
    "ATTRIBUTES",
    "AntennaRef",
    "DecodeContext",
    "DsgaConfig",
    "DsgaResult",
    "ElitePool",
    "Individual",
    "OperatorBank",
    "OracleResult",
    "PlacementSim",
    "RunRecord",
    "SearchResult",
    "SuiteConfig",
    "SummaryRow",
    "DegenerateAttributeError",
    "FEED_STATION",
    "FORMAT_VERSION",
    "FeedingWindow",
    "GenerationError",
    "GeneratorConfig",
    "GroundStation",
    "Instance",
    "InstanceFormatError",
    "MalformedScheduleError",
    "Placement",
    "Rule",
    "SATELLITE",
    "STATION",
    "Satellite",
    "Schedule",
    "Task",
    "TaskSimilarityMatrix",
    "TimingParams",
    "ValidationReport",
    "VisibleWindow",
    "Violation",
    "apply_operator",
    "associate_feed_windows",
    "attribute_matrix",
    "busy_intervals",
    "decode",
    "evolve",
    "exact_optimum",
    "fitness",
    "generate_instance",
    "generation_threshold",
    "get_context",
    "greedy_profit",
    "individual_similarity",
    "init_population",
    "load_instance",
    "load_plan",
    "pick_operator",
    "population_similarity_stats",
    "random_search",
    "read_instance",
    "read_plan",
    "roulette_select",
    "run_algorithm",
    "run_suite",
    "rvw_weights",
    "save_instance",
    "save_plan",
    "summarize",
    "task_similarity_matrix",
    "update_score",
    "update_weights",
    "validate_schedule",
    "write_instance",
    "write_plan",
    "write_report",
]
