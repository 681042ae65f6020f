"""Graph similarity and cost-minimizing subgraph embedding.

Two problems are solved over property graphs:

* similarity: a bijective correspondence preserving labels and edge
  structure (property values may differ), choosing among all such
  bijections one of minimum property-mismatch cost;
* subgraph embedding: the injective variant, embedding every pattern
  node and edge into the host while minimizing the number of pattern
  properties without an equal-valued counterpart.

Both are solved exactly by branch-and-bound (see ``_pysearch``), with
a deterministic tie-break: the lexicographically least node map, then
edge map, ordering elements and images by shortlex id rank.  Every
returned matching is revalidated from scratch before being handed out.
"""

from __future__ import annotations

import logging

from ..errors import BudgetExceededError, InvalidMatchingError
from ..graph import PropertyGraph
from ._backend import KERNEL_NAME, kernel
from .encode import encode_problem
from .model import DEFAULT_BUDGET, MODE_EXACT, MODE_SUBGRAPH, Matching, MatchProblem

__all__ = [
    "check_similar",
    "best_subgraph_matching",
    "solve_problem",
    "matching_cost",
    "count_optimal_embeddings",
]

log = logging.getLogger("provbench.matching")

_ST_OK, _ST_NOMATCH, _ST_BUDGET = 0, 1, 2
_MODE_COST, _MODE_LEX, _MODE_COUNT = 0, 1, 2


def check_similar(
    g1: PropertyGraph, g2: PropertyGraph, budget: int = DEFAULT_BUDGET
) -> Matching | None:
    """Minimum-cost bijective similarity matching, or None.

    Graphs are similar when they have the same shape: a bijection over
    nodes and edges preserving labels, sources and targets.  Node
    counts, edge counts and label multisets are checked first for a
    quick rejection.  Raises :class:`BudgetExceededError` when the
    search budget runs out (callers must treat that as inconclusive,
    not as "not similar").
    """
    if g1.node_count != g2.node_count or g1.edge_count != g2.edge_count:
        return None
    if g1.node_label_multiset() != g2.node_label_multiset():
        return None
    if g1.edge_label_multiset() != g2.edge_label_multiset():
        return None
    return _solve(g1, g2, exact=True, budget=budget)


def best_subgraph_matching(
    pattern: PropertyGraph, host: PropertyGraph, budget: int = DEFAULT_BUDGET
) -> Matching | None:
    """Globally minimal-cost embedding of pattern into host, or None.

    Every pattern node and edge is mapped injectively into the host,
    preserving labels and edge endpoints; the returned matching has
    minimal cost over all such embeddings, ties broken by the least
    node map.  Returns None when no embedding exists.
    """
    hm = host.node_label_multiset()
    for lab, n in pattern.node_label_multiset().items():
        if hm.get(lab, 0) < n:
            return None
    he = host.edge_label_multiset()
    for lab, n in pattern.edge_label_multiset().items():
        if he.get(lab, 0) < n:
            return None
    return _solve(pattern, host, exact=False, budget=budget)


def solve_problem(problem: MatchProblem) -> Matching | None:
    """Solve a :class:`MatchProblem` with the engine (not the oracle)."""
    budget = problem.budget if problem.budget is not None else DEFAULT_BUDGET
    if problem.mode == MODE_EXACT:
        return check_similar(problem.pattern, problem.host, budget)
    return best_subgraph_matching(problem.pattern, problem.host, budget)


def _solve(pattern, host, exact, budget):
    inst = encode_problem(pattern, host, exact)
    st, cost, _, _, used = kernel.run(inst, _MODE_COST, budget, -1)
    if st == _ST_BUDGET:
        raise BudgetExceededError(
            f"matcher exceeded {budget} node expansions (cost pass)"
        )
    if st == _ST_NOMATCH:
        return None
    st2, _, nmap, emap, used2 = kernel.run(inst, _MODE_LEX, budget - used, cost)
    if st2 == _ST_BUDGET:
        raise BudgetExceededError(
            f"matcher exceeded {budget} node expansions (reconstruction pass)"
        )
    if st2 != _ST_OK:
        raise InvalidMatchingError("reconstruction pass failed to reach the optimum")
    node_map = {inst.pat_node_ids[i]: inst.host_node_ids[nmap[i]] for i in range(inst.np)}
    edge_map = {inst.pat_edge_ids[i]: inst.host_edge_ids[emap[i]] for i in range(inst.ep)}
    matching = Matching(node_map, edge_map, cost)
    recomputed = matching_cost(matching, pattern, host)
    if recomputed != cost:
        raise InvalidMatchingError(
            f"kernel cost {cost} disagrees with recomputed cost {recomputed}"
        )
    log.debug(
        "%s solve (%s): cost=%d lower_bound=%d expansions=%d+%d",
        "similarity" if exact else "embedding",
        KERNEL_NAME,
        cost,
        sum(inst.static_node_min) + sum(inst.static_edge_min),
        used,
        used2,
    )
    return matching


def matching_cost(m: Matching, pattern: PropertyGraph, host: PropertyGraph) -> int:
    """Recompute a matching's cost from scratch, validating structure.

    One unit per pattern property whose image lacks the key or holds a
    different value; host-only properties are free.  Raises
    :class:`InvalidMatchingError` on any structural violation.
    """
    _validate_structure(m, pattern, host)
    img = dict(m.node_map)
    img.update(m.edge_map)
    cost = 0
    for (x, k), v in pattern.props.items():
        if host.props.get((img[x], k)) != v:
            cost += 1
    return cost


def _validate_structure(m: Matching, pattern: PropertyGraph, host: PropertyGraph):
    if set(m.node_map) != set(pattern.nodes):
        raise InvalidMatchingError("node map does not cover the pattern's vertices")
    if set(m.edge_map) != set(pattern.edges):
        raise InvalidMatchingError("edge map does not cover the pattern's edges")
    if len(set(m.node_map.values())) != len(m.node_map):
        raise InvalidMatchingError("node map is not injective")
    if len(set(m.edge_map.values())) != len(m.edge_map):
        raise InvalidMatchingError("edge map is not injective")
    for x, y in m.node_map.items():
        if y not in host.nodes:
            raise InvalidMatchingError(f"node image {y!r} missing from host")
        if pattern.nodes[x] != host.nodes[y]:
            raise InvalidMatchingError(f"label not preserved on vertex {x!r}")
    for e, f in m.edge_map.items():
        if f not in host.edges:
            raise InvalidMatchingError(f"edge image {f!r} missing from host")
        s, t, lab = pattern.edges[e]
        hs, ht, hlab = host.edges[f]
        if lab != hlab:
            raise InvalidMatchingError(f"label not preserved on edge {e!r}")
        if (m.node_map[s], m.node_map[t]) != (hs, ht):
            raise InvalidMatchingError(f"edge {e!r} does not preserve endpoints")


def count_optimal_embeddings(
    pattern: PropertyGraph, host: PropertyGraph, budget: int = DEFAULT_BUDGET
) -> int:
    """Number of distinct optimal-cost node maps embedding pattern in host.

    Diagnostic companion to :func:`best_subgraph_matching`: a count
    above one means the extracted difference depends on the tie-break.
    Edge-assignment multiplicity is not counted.  If the budget runs
    out mid-count the tally found so far is returned.
    """
    hm = host.node_label_multiset()
    for lab, n in pattern.node_label_multiset().items():
        if hm.get(lab, 0) < n:
            return 0
    he = host.edge_label_multiset()
    for lab, n in pattern.edge_label_multiset().items():
        if he.get(lab, 0) < n:
            return 0
    inst = encode_problem(pattern, host, False)
    st, cost, _, _, used = kernel.run(inst, _MODE_COST, budget, -1)
    if st == _ST_BUDGET:
        raise BudgetExceededError(
            f"matcher exceeded {budget} node expansions (cost pass)"
        )
    if st == _ST_NOMATCH:
        return 0
    st2, count, _, _, _ = kernel.run(inst, _MODE_COUNT, budget - used, cost)
    if st2 == _ST_BUDGET:
        log.debug("optimum count truncated by budget at %d", count)
    return count
