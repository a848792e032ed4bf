"""Shortest-path search on estimated weighted digraphs (SLB, SUB and TASP)."""
from .ewdg import (INF, Edge, EstimationCache, Instance, Level, PathBounds,
                   apply_next_estimator, parse_instance, path_bounds,
                   serialize_instance, tight_edge_bounds, validate_instance)
from .oracle import (OracleResult, check_admissible, combine_bstar,
                     enumerate_simple_paths, oracle_slb, oracle_sub, solve_oracle)
from .search import (SolveReport, TaspReport, beast, beauty, beauty_and_beast,
                     ei_ucs)

__all__ = [
    "INF", "Edge", "EstimationCache", "Instance", "Level", "PathBounds",
    "apply_next_estimator", "parse_instance", "path_bounds", "serialize_instance",
    "tight_edge_bounds", "validate_instance", "OracleResult", "check_admissible",
    "combine_bstar", "enumerate_simple_paths", "oracle_slb", "oracle_sub",
    "solve_oracle", "SolveReport", "TaspReport", "beast", "beauty",
    "beauty_and_beast", "ei_ucs",
]
