"""Exhaustive matching oracle.

Enumerates every label-preserving node injection (or bijection) and,
per node map, every per-bucket edge assignment, with no pruning or
shared machinery with the search kernels.  Intended for tests and
desk-checks only; a size guard rejects instances whose enumeration
would be unreasonable.
"""

from __future__ import annotations

import itertools

from ..errors import OracleTooLargeError
from ..graph import shortlex
from .model import MODE_EXACT, Matching, MatchProblem

__all__ = ["brute_force_matching", "MAX_PATTERN_NODES", "MAX_PATTERN_EDGES"]

MAX_PATTERN_NODES = 8
MAX_PATTERN_EDGES = 10
_MAX_NODE_MAPS = 2_000_000


def _enumeration_size(nh: int, np_: int) -> int:
    size = 1
    for i in range(np_):
        size *= nh - i
        if size > _MAX_NODE_MAPS:
            return size
    return size


def brute_force_matching(problem: MatchProblem) -> Matching | None:
    """Exact optimum by enumeration; same contract as the solver.

    Ties are broken identically: least node map first, then least edge
    map, comparing images by shortlex id rank.
    """
    pattern, host = problem.pattern, problem.host
    exact = problem.mode == MODE_EXACT
    if pattern.node_count > MAX_PATTERN_NODES or pattern.edge_count > MAX_PATTERN_EDGES:
        raise OracleTooLargeError(
            f"pattern has {pattern.node_count} nodes / {pattern.edge_count} edges; "
            f"oracle guard is {MAX_PATTERN_NODES} / {MAX_PATTERN_EDGES}"
        )
    if _enumeration_size(host.node_count, pattern.node_count) > _MAX_NODE_MAPS:
        raise OracleTooLargeError("node-map enumeration too large for the oracle")

    if exact:
        if pattern.node_count != host.node_count or pattern.edge_count != host.edge_count:
            return None

    pat_nodes = sorted(pattern.nodes, key=shortlex)
    host_nodes = sorted(host.nodes, key=shortlex)
    pat_edges = sorted(pattern.edges, key=shortlex)
    host_edges = sorted(host.edges, key=shortlex)
    pat_labels = [pattern.nodes[x] for x in pat_nodes]
    host_labels = [host.nodes[y] for y in host_nodes]
    pat_props = {x: pattern.props_of(x) for x in pattern.element_ids()}
    host_props = {y: host.props_of(y) for y in host.element_ids()}

    host_buckets: dict[tuple[int, int, str], list[int]] = {}
    host_rank = {y: i for i, y in enumerate(host_nodes)}
    for j, f in enumerate(host_edges):
        s, t, lab = host.edges[f]
        host_buckets.setdefault((host_rank[s], host_rank[t], lab), []).append(j)

    pat_rank = {x: i for i, x in enumerate(pat_nodes)}
    best: tuple[int, tuple[int, ...], list[int]] | None = None
    for perm in itertools.permutations(range(host.node_count), pattern.node_count):
        if any(pat_labels[i] != host_labels[perm[i]] for i in range(len(perm))):
            continue
        node_cost = sum(
            1
            for i, x in enumerate(pat_nodes)
            for k, v in pat_props[x].items()
            if host_props[host_nodes[perm[i]]].get(k) != v
        )
        groups: dict[tuple[int, int, str], list[int]] = {}
        feasible = True
        for i, e in enumerate(pat_edges):
            s, t, lab = pattern.edges[e]
            key = (perm[pat_rank[s]], perm[pat_rank[t]], lab)
            groups.setdefault(key, []).append(i)
            if len(groups[key]) > len(host_buckets.get(key, ())):
                feasible = False
                break
        if not feasible:
            continue
        edge_cost = 0
        emap = [-1] * len(pat_edges)
        for key, pidx in groups.items():
            gcost, gpick = _best_group_assignment(
                [pat_edges[i] for i in pidx],
                [host_edges[j] for j in host_buckets[key]],
                host_buckets[key],
                pat_props,
                host_props,
            )
            edge_cost += gcost
            for i, j in zip(pidx, gpick):
                emap[i] = j
        candidate = (node_cost + edge_cost, perm, emap)
        if best is None or candidate[:2] < best[:2]:
            best = candidate

    if best is None:
        return None
    cost, perm, emap = best
    node_map = {x: host_nodes[perm[i]] for i, x in enumerate(pat_nodes)}
    edge_map = {e: host_edges[emap[i]] for i, e in enumerate(pat_edges)}
    return Matching(node_map, edge_map, cost)


def _best_group_assignment(pedges, hedges, hranks, pat_props, host_props):
    """Least-cost injective assignment within one bucket, by enumeration.

    Returns (cost, picked host-edge ranks aligned with ``pedges``);
    the first minimum in permutation order is the least pick vector.
    """
    best_cost = None
    best_pick = None
    for combo in itertools.permutations(range(len(hedges)), len(pedges)):
        cost = sum(
            1
            for i, e in enumerate(pedges)
            for k, v in pat_props[e].items()
            if host_props[hedges[combo[i]]].get(k) != v
        )
        if best_cost is None or cost < best_cost:
            best_cost = cost
            best_pick = [hranks[j] for j in combo]
    return best_cost, best_pick
