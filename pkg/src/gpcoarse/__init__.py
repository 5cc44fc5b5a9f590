"""Graph products of groups: normal forms, weighted word metrics, and
verified finite-scale covers and decompositions."""

from .errors import (BudgetExceeded, ConfigError, GPCoarseError, InvalidElement, ParseError,
                     Refusal, VerificationFailure)
from .graphprod import EMPTY, ProductGraph, complete_graph, edgeless_graph, graph_from_config, path_graph
from .groups import VertexGroupSpec, spec_from_config
from .metric import WordMetric, gp_ball, gp_distance, gp_norm

__version__ = "0.1.0"
