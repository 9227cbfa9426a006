"""Approximate graph propagation: exact and randomized push engines for
sum_i w_i (D^-a A D^-b)^i x, with clustering and evaluation helpers."""

__version__ = "0.1.0"

from .basic import PropagationResult, PropagationState, basic_propagate, uniform_signal
from .clustering import SweepResult, conductance, normalize_scores, sweep_cut
from .errors import (
    AGPError,
    CapacityError,
    ConfigError,
    DataError,
    EmptyGraphError,
    EmptySweepError,
    NumericError,
    ParseError,
    ShapeError,
)
from .evaluation import (
    EvalReport,
    dense_oracle,
    evaluate,
    largest_eigenvalue,
    max_error,
    mc_hkpr,
    precision_at_k,
)
from .features import FeatureMatrix, propagate_features
from .graph import Graph, from_edges, load_edge_list, load_graph, neighbor_prefix_below
from .randomized import RandomizedConfig, RepeatedRunner, randomized_propagate, subset_sample
from .weights import WeightScheme, select_level_count, weights_and_partials

__all__ = [name for name in dir() if not name.startswith("_")]
