"""Property-graph matching: similarity and subgraph embedding.

The search kernel exists twice: a pure Python implementation and an
optional compiled (Cython) twin selected at import time; see
``_backend``.  ``KERNEL_NAME`` reports which one is active.
"""

from ._backend import KERNEL_NAME
from .model import DEFAULT_BUDGET, MODE_EXACT, MODE_SUBGRAPH, Matching, MatchProblem
from .oracle import brute_force_matching
from .solver import (
    best_subgraph_matching,
    check_similar,
    count_optimal_embeddings,
    matching_cost,
    solve_problem,
)

__all__ = [
    "KERNEL_NAME",
    "DEFAULT_BUDGET",
    "MODE_EXACT",
    "MODE_SUBGRAPH",
    "Matching",
    "MatchProblem",
    "brute_force_matching",
    "best_subgraph_matching",
    "check_similar",
    "count_optimal_embeddings",
    "matching_cost",
    "solve_problem",
]
