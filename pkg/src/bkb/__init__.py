"""Bayesian knowledge bases over well-founded logic programs.

Influence clauses come from a tabled evaluation of the program; loops in
the resulting influence network are cut into a two-slice dynamic network
that is unrolled for exact queries.
"""

from .cpt import build_node_cpts, combine
from .infer import Query, parse_query, query, unroll
from .influence import InfluenceClause, influence_clauses, random_variable_space
from .kb import KnowledgeBase, ValidationError, validate_kb
from .network import InfluenceNetwork, StateInput, build_influence_network, build_two_slice, complete_two_slice
from .parser import ParseError, load_kb, parse_atom, parse_kb
from .wfs import TabledEngine, WellFoundedModel, alternating_fixpoint, ground_program, well_founded_model

__all__ = [
    "InfluenceClause", "InfluenceNetwork", "KnowledgeBase", "ParseError", "Query", "StateInput",
    "TabledEngine", "ValidationError", "WellFoundedModel", "alternating_fixpoint", "build_influence_network",
    "build_node_cpts", "build_two_slice", "combine", "complete_two_slice", "ground_program",
    "influence_clauses", "load_kb", "parse_atom", "parse_kb", "parse_query", "query",
    "random_variable_space", "unroll", "validate_kb", "well_founded_model",
]
