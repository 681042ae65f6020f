"""Matching data model.

A matching witnesses either graph similarity (a bijective, label- and
structure-preserving correspondence that ignores property values) or a
subgraph embedding (the injective variant).  Its ``cost`` counts the
pattern-side properties that have no equal-valued counterpart at their
image; host-only properties are free.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

__all__ = ["Matching", "MatchProblem", "MODE_EXACT", "MODE_SUBGRAPH", "DEFAULT_BUDGET"]

MODE_EXACT = "exact-bijective"
MODE_SUBGRAPH = "subgraph"

#: Default node-expansion budget for one solve.
DEFAULT_BUDGET = 10_000_000


@dataclass(frozen=True)
class Matching:
    """Correspondence between pattern and host elements, plus its cost.

    ``node_map`` and ``edge_map`` are injective id-to-id mappings that
    preserve labels and edge endpoints; ``cost`` is the number of
    (pattern element, key) pairs whose value differs from, or is absent
    at, the image.
    """

    node_map: Mapping[str, str]
    edge_map: Mapping[str, str]
    cost: int

    def __post_init__(self):
        object.__setattr__(self, "node_map", dict(self.node_map))
        object.__setattr__(self, "edge_map", dict(self.edge_map))


@dataclass(frozen=True)
class MatchProblem:
    """One matcher instance: pattern, host, mode, and search budget."""

    pattern: "PropertyGraph"
    host: "PropertyGraph"
    mode: str = MODE_SUBGRAPH
    budget: int | None = DEFAULT_BUDGET

    def __post_init__(self):
        if self.mode not in (MODE_EXACT, MODE_SUBGRAPH):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.budget is not None and self.budget <= 0:
            raise ValueError("budget must be positive")
