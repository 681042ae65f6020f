"""Trial generalization.

Several recording trials of one program are reduced to a single
representative graph: trials are partitioned into similarity classes
(same shape, possibly different properties), singleton classes are
discarded as failed runs, the smallest surviving class supplies a pair
of trials, and properties that disagree between the pair (transient
data such as timestamps and identifiers) are elided.
"""

from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping, Sequence

from .errors import (
    BudgetExceededError,
    InsufficientConsistentTrialsError,
    InvalidMatchingError,
)
from .graph import PropertyGraph, canonicalize, emit_datalog
from .matching import DEFAULT_BUDGET, Matching, check_similar, matching_cost

__all__ = [
    "SimilarityClass",
    "GeneralizedGraph",
    "partition_similarity_classes",
    "select_representative_pair",
    "generalize_pair",
    "generalize_trials",
]


@dataclass(frozen=True)
class SimilarityClass:
    """Mutually similar trials, with witnesses to a representative.

    ``members`` holds (trial index, graph) pairs in trial order;
    ``representative`` is the trial index of the canonically least
    member; ``witnesses`` maps each member's trial index to a
    minimum-cost similarity matching onto the representative.
    """

    members: tuple[tuple[int, PropertyGraph], ...]
    representative: int
    witnesses: Mapping[int, Matching]

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        object.__setattr__(self, "witnesses", MappingProxyType(dict(self.witnesses)))

    @property
    def size(self) -> int:
        return len(self.members)

    def representative_graph(self) -> PropertyGraph:
        for i, g in self.members:
            if i == self.representative:
                return g
        raise KeyError(self.representative)


@dataclass(frozen=True)
class GeneralizedGraph:
    """A pair's common shape with only the agreeing properties kept.

    ``provenance`` records which two trial indices were generalized.
    """

    graph: PropertyGraph
    provenance: tuple[int, int] = (0, 1)


def _canonical_key(g: PropertyGraph) -> str:
    return emit_datalog(canonicalize(g), "c")


def partition_similarity_classes(
    trials: Sequence[PropertyGraph], budget: int = DEFAULT_BUDGET
) -> list[SimilarityClass]:
    """Partition trials into similarity classes.

    Similarity is an equivalence, so each trial is compared against one
    member per existing class.  Classes are returned ordered by
    representative size (node count, then edge count, then canonical
    serialization) ascending.  A budget overrun is re-raised with the
    offending trial pair identified.
    """
    if not trials:
        raise ValueError("at least one trial is required")
    groups: list[list[int]] = []
    for i, g in enumerate(trials):
        placed = False
        for group in groups:
            j = group[0]
            try:
                witness = check_similar(g, trials[j], budget=budget)
            except BudgetExceededError as exc:
                raise BudgetExceededError(
                    f"similarity check between trial {i} and trial {j} "
                    f"exceeded the budget"
                ) from exc
            if witness is not None:
                group.append(i)
                placed = True
                break
        if not placed:
            groups.append([i])

    classes = []
    for group in groups:
        keyed = sorted((_canonical_key(trials[i]), i) for i in group)
        rep = keyed[0][1]
        witnesses = {}
        for i in group:
            try:
                m = check_similar(trials[i], trials[rep], budget=budget)
            except BudgetExceededError as exc:
                raise BudgetExceededError(
                    f"witness matching between trial {i} and trial {rep} "
                    f"exceeded the budget"
                ) from exc
            if m is None:  # unreachable: same class implies similarity
                raise InvalidMatchingError("class member lost its witness")
            witnesses[i] = m
        classes.append(
            SimilarityClass(
                members=tuple((i, trials[i]) for i in group),
                representative=rep,
                witnesses=witnesses,
            )
        )
    classes.sort(
        key=lambda c: (
            c.representative_graph().node_count,
            c.representative_graph().edge_count,
            _canonical_key(c.representative_graph()),
        )
    )
    return classes


def select_representative_pair(
    classes: Sequence[SimilarityClass],
    min_class_size: int = 2,
    budget: int = DEFAULT_BUDGET,
) -> tuple[PropertyGraph, PropertyGraph, Matching]:
    """Pick the trial pair to generalize.

    Classes below ``min_class_size`` are discarded as failed runs.  Of
    the survivors, the one with the smallest representative graph wins
    (ties by canonical serialization); within it, the two members with
    the fewest pairwise property mismatches are chosen (ties by trial
    index).  Returns the pair in trial order plus the minimum-cost
    similarity matching from the first onto the second.
    """
    _i, gi, _j, gj, m = _select_pair(classes, min_class_size, budget)
    return gi, gj, m


def _select_pair(classes, min_class_size, budget):
    survivors = [c for c in classes if c.size >= min_class_size]
    if not survivors:
        raise InsufficientConsistentTrialsError(
            "every similarity class was smaller than "
            f"{min_class_size}; rerun with more trials"
        )
    survivors.sort(
        key=lambda c: (
            c.representative_graph().node_count,
            c.representative_graph().edge_count,
            _canonical_key(c.representative_graph()),
        )
    )
    chosen = survivors[0]
    best = None
    for a in range(chosen.size):
        for b in range(a + 1, chosen.size):
            i, gi = chosen.members[a]
            j, gj = chosen.members[b]
            m = check_similar(gi, gj, budget=budget)
            if m is None:  # unreachable within a class
                raise InvalidMatchingError("class members are not similar")
            key = (m.cost, i, j)
            if best is None or key < best[0]:
                best = (key, i, gi, j, gj, m)
    return best[1], best[2], best[3], best[4], best[5]


def generalize_pair(
    g1: PropertyGraph,
    g2: PropertyGraph,
    m: Matching,
    provenance: tuple[int, int] = (0, 1),
) -> GeneralizedGraph:
    """Keep g1's shape and ids; keep only properties agreeing in g2.

    ``m`` must be a bijective, label- and structure-preserving matching
    from g1 onto g2.  A property (x, k, v) survives exactly when g2
    holds (m(x), k, v); disagreeing or one-sided properties are
    dropped.
    """
    matching_cost(m, g1, g2)  # validates structure, labels, injectivity
    if g1.node_count != g2.node_count or g1.edge_count != g2.edge_count:
        raise InvalidMatchingError("matching is not bijective")
    image = dict(m.node_map)
    image.update(m.edge_map)
    props = {
        (x, k): v
        for (x, k), v in g1.props.items()
        if g2.props.get((image[x], k)) == v
    }
    graph = PropertyGraph(dict(g1.nodes), dict(g1.edges), props, g1.gid)
    return GeneralizedGraph(graph, provenance)


def generalize_trials(
    trials: Sequence[PropertyGraph],
    min_class_size: int = 2,
    budget: int = DEFAULT_BUDGET,
) -> GeneralizedGraph:
    """Partition, select, and generalize in one step."""
    classes = partition_similarity_classes(trials, budget=budget)
    i, gi, j, gj, m = _select_pair(classes, min_class_size, budget)
    return generalize_pair(gi, gj, m, (i, j))
