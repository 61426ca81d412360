"""Revenue-maximizing pricing for recommendation cascades on social graphs."""

__version__ = "0.1.0"

from .cascade import (CascadeTrace, RevenueEstimate, estimate_revenue, exact_expected_revenue,
                      simulate_once)
from .errors import BudgetError
from .graph import Graph, GraphError, generate_preferential_attachment, load_edge_list
from .local_search import SearchConfig, evaluate_candidate, local_search_improve
from .maxleaf import SpanningTree, approx_max_leaf_tree, exact_max_leaf_tree
from .models import (CostFunction, IndependentCascade, InfluenceFunction, LinearThreshold,
                     default_model, load_model)
from .strategy import (PricingStrategy, build_random_pricing, build_strategy_maxleaf,
                       set_cashback, uniform_pricing)
from .tape import ThresholdTape

__all__ = [
    "BudgetError", "CascadeTrace", "CostFunction", "Graph", "GraphError", "IndependentCascade",
    "InfluenceFunction", "LinearThreshold", "PricingStrategy", "RevenueEstimate", "SearchConfig",
    "SpanningTree", "ThresholdTape", "approx_max_leaf_tree", "build_random_pricing",
    "build_strategy_maxleaf", "default_model", "estimate_revenue", "evaluate_candidate",
    "exact_expected_revenue", "exact_max_leaf_tree", "generate_preferential_attachment",
    "load_edge_list", "load_model", "local_search_improve", "set_cashback", "simulate_once",
    "uniform_pricing",
]
