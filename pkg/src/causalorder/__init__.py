"""Order-based BIC structure learning for linear additive noise models."""

from .errors import (
    CausalOrderError,
    CyclicInput,
    DimensionMismatch,
    NotPositiveDefinite,
    ParseError,
    TooManyVariables,
    UnknownNode,
    ZeroVarianceColumn,
)
from .exact import enumerate_all_dags, exact_search
from .graph import (
    Cpdag,
    Dag,
    consistent_extension,
    dag_to_cpdag,
    read_edge_list,
    read_graph,
    shd_cpdag,
    write_graph,
)
from .scoring import ScoreConfig, local_score, total_score
from .search import FitResult, SearchConfig, fit, ils
from .simulate import AnmInstance, AnmParams, GraphSpec, generate_graph, sample_instance

__version__ = "0.1.0"

__all__ = [
    "AnmInstance",
    "AnmParams",
    "CausalOrderError",
    "Cpdag",
    "CyclicInput",
    "Dag",
    "DimensionMismatch",
    "FitResult",
    "GraphSpec",
    "NotPositiveDefinite",
    "ParseError",
    "ScoreConfig",
    "SearchConfig",
    "TooManyVariables",
    "UnknownNode",
    "ZeroVarianceColumn",
    "consistent_extension",
    "dag_to_cpdag",
    "enumerate_all_dags",
    "exact_search",
    "fit",
    "generate_graph",
    "ils",
    "local_score",
    "read_edge_list",
    "read_graph",
    "sample_instance",
    "shd_cpdag",
    "total_score",
    "write_graph",
]
