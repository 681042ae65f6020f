"""provbench: expressiveness benchmarking for system provenance recorders.

The toolkit ingests provenance graphs from capture tools (or a
deterministic synthetic recorder), generalizes repeated trials into a
representative property graph, and extracts the minimal graph
structure attributable to a target activity by subtracting a
background graph from a foreground graph under a cost-minimizing
subgraph embedding.
"""

from .errors import (
    BackgroundNotEmbeddableError,
    BudgetExceededError,
    ConflictingPropertyError,
    CorruptBaselineError,
    DanglingReferenceError,
    IdClashError,
    InsufficientConsistentTrialsError,
    InvalidMatchingError,
    MissingTrialFilesError,
    MixedGidError,
    OracleTooLargeError,
    ParseError,
    ProvBenchError,
    RecorderFailureError,
    UnresolvedEndpointError,
    UnsupportedConstructError,
)
from .compare import (
    BenchmarkGraph,
    is_empty_result,
    read_benchmark_dl,
    subtract,
    write_benchmark_dl,
)
from .generalize import (
    GeneralizedGraph,
    SimilarityClass,
    generalize_pair,
    generalize_trials,
    partition_similarity_classes,
    select_representative_pair,
)
from .graph import PropertyGraph, canonical_form, canonicalize, emit_datalog, parse_datalog
from .ingest import (
    FormatProfile,
    load_document,
    load_path,
    parse_dot,
    parse_generic_json,
    parse_prov_json,
    to_generic_json,
)
from .matching import (
    KERNEL_NAME,
    Matching,
    MatchProblem,
    best_subgraph_matching,
    brute_force_matching,
    check_similar,
    count_optimal_embeddings,
    matching_cost,
)
from .pipeline import (
    BenchmarkResult,
    BenchmarkSpec,
    RecorderProfile,
    RegressionVerdict,
    append_timing,
    load_profiles,
    make_spec,
    record_trials,
    regression_check,
    run_benchmark,
)
from .render import emit_dot, emit_html, graph_to_dot
from .synthetic import TEMPLATES, SyntheticTemplate

__version__ = "0.1.0"
