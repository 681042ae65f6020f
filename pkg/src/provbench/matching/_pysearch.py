"""Pure Python branch-and-bound search kernel.

This is the reference implementation of the matcher's inner loop; the
compiled module ``_speedups`` mirrors it statement for statement.  A
solve runs in two passes over one encoded instance:

* mode 0 finds the minimal property-mismatch cost, assigning pattern
  nodes most-constrained-first and pruning with an admissible bound
  (exact cost of assigned nodes, plus per-node and per-edge static
  minima, tightened to bucket minima once both endpoints of a pattern
  edge are fixed);
* mode 1 reproduces the matching deterministically: pattern nodes are
  assigned in id-rank order with candidates ascending, so the first
  full assignment reaching the known optimal cost is the
  lexicographically least node map (no optimal subtree is ever pruned
  because pruning needs the bound to exceed the optimum);
* mode 2 counts the node maps that reach the optimal cost.

Edge images are chosen after all nodes are fixed: within each
(source image, target image, label) bucket a tiny assignment problem
is solved exactly, taking the lexicographically least among the
minimum-cost pick vectors.

Budget is a cap on node expansions (attempted node assignments) shared
by the caller across passes.
"""

from __future__ import annotations

from bisect import bisect_left

from .encode import INF, Instance

__all__ = ["run", "ST_OK", "ST_NOMATCH", "ST_BUDGET", "MODE_COST", "MODE_LEX", "MODE_COUNT"]

ST_OK = 0
ST_NOMATCH = 1
ST_BUDGET = 2

MODE_COST = 0
MODE_LEX = 1
MODE_COUNT = 2


def run(inst: Instance, mode: int, budget: int, cstar: int = -1):
    """Search one encoded instance.

    Returns ``(status, value, node_map, edge_map, expansions)`` where
    value is the optimal cost (mode 0), the confirmed cost (mode 1) or
    the number of optimal node maps (mode 2); the maps are host element
    indexes per pattern element index, only populated in mode 1.
    """
    np_, nh, ep = inst.np, inst.nh, inst.ep

    if np_ == 0:
        value = 1 if mode == MODE_COUNT else 0
        maps = ([], []) if mode == MODE_LEX else (None, None)
        return (ST_OK, value, maps[0], maps[1], 0)
    for x in range(np_):
        if inst.cand_off[x + 1] == inst.cand_off[x]:
            return (ST_NOMATCH, 0, None, None, 0)
    for e in range(ep):
        if inst.static_edge_min[e] >= INF:
            return (ST_NOMATCH, 0, None, None, 0)

    order = inst.order1 if mode == MODE_COST else list(range(np_))
    nbuckets = len(inst.bucket_keys)
    node_map = [-1] * np_
    used = bytearray(nh)
    bucket_used = [0] * nbuckets
    cand_off, cand_flat, ncost_flat = inst.cand_off, inst.cand_flat, inst.ncost_flat
    static_node_min, static_edge_min = inst.static_node_min, inst.static_edge_min
    adj_off, adj_edge, adj_other = inst.adj_off, inst.adj_edge, inst.adj_other
    pe_src, pe_tgt, pe_lab = inst.pe_src, inst.pe_tgt, inst.pe_lab
    ecost, eh = inst.ecost_flat, inst.eh
    bucket_keys, bucket_off, bucket_edges = (
        inst.bucket_keys, inst.bucket_off, inst.bucket_edges,
    )
    nl = inst.n_labels

    state = {
        "best": INF,
        "count": 0,
        "expansions": 0,
        "out_nmap": None,
        "out_emap": None,
        "budget_hit": False,
    }

    def find_bucket(hs: int, ht: int, lab: int) -> int:
        key = (hs * nh + ht) * nl + lab
        i = bisect_left(bucket_keys, key)
        if i < nbuckets and bucket_keys[i] == key:
            return i
        return -1

    def bucket_min(e: int, b: int) -> int:
        row = e * eh
        return min(ecost[row + bucket_edges[k]] for k in range(bucket_off[b], bucket_off[b + 1]))

    def try_assign(x: int, y: int):
        """Check edge feasibility of x -> y; return (delta, buckets) or None.

        ``delta`` tightens the edge bound for every pattern edge whose
        second endpoint just got fixed; ``buckets`` lists the bucket of
        each such edge (with multiplicity) for capacity bookkeeping.
        """
        delta = 0
        buckets: list[int] = []
        pending: dict[int, int] = {}
        for k in range(adj_off[x], adj_off[x + 1]):
            o = adj_other[k]
            om = y if o == x else node_map[o]
            if om < 0:
                continue
            e = adj_edge[k]
            hs = y if pe_src[e] == x else node_map[pe_src[e]]
            ht = y if pe_tgt[e] == x else node_map[pe_tgt[e]]
            b = find_bucket(hs, ht, pe_lab[e])
            if b < 0:
                return None
            pending[b] = pending.get(b, 0) + 1
            if bucket_used[b] + pending[b] > bucket_off[b + 1] - bucket_off[b]:
                return None
            buckets.append(b)
            delta += bucket_min(e, b) - static_edge_min[e]
        return delta, buckets

    def leaf_edges(want_map: bool, limit: int):
        """Exact per-bucket edge assignment for a full node map.

        Returns (cost, edge_map or None); cost INF when the remaining
        assignment cannot stay within ``limit``.
        """
        if ep == 0:
            return 0, ([] if want_map else None)
        groups: dict[int, list[int]] = {}
        for e in range(ep):
            b = find_bucket(node_map[pe_src[e]], node_map[pe_tgt[e]], pe_lab[e])
            groups.setdefault(b, []).append(e)
        total = 0
        emap = [-1] * ep if want_map else None
        for b, pedges in groups.items():
            hedges = [bucket_edges[k] for k in range(bucket_off[b], bucket_off[b + 1])]
            cost, pick = _assign_group(ecost, eh, pedges, hedges, want_map)
            total += cost
            if total > limit:
                return INF, None
            if want_map:
                for i, e in enumerate(pedges):
                    emap[e] = pick[i]
        return total, emap

    def dfs(depth: int, node_cost: int, rem_node_min: int, edge_bound: int) -> bool:
        """Returns True to abort the whole search (success or budget)."""
        if depth == np_:
            if mode == MODE_COST:
                total, _ = leaf_edges(False, state["best"] - node_cost - 1)
                if total < INF and node_cost + total < state["best"]:
                    state["best"] = node_cost + total
                return False
            total, emap = leaf_edges(mode == MODE_LEX, cstar - node_cost)
            if total < INF and node_cost + total == cstar:
                if mode == MODE_LEX:
                    state["out_nmap"] = node_map[:]
                    state["out_emap"] = emap
                    return True
                state["count"] += 1
            return False
        x = order[depth]
        new_rem = rem_node_min - static_node_min[x]
        for idx in range(cand_off[x], cand_off[x + 1]):
            y = cand_flat[idx]
            if used[y]:
                continue
            state["expansions"] += 1
            if state["expansions"] > budget:
                state["budget_hit"] = True
                return True
            res = try_assign(x, y)
            if res is None:
                continue
            delta, buckets = res
            bound = node_cost + ncost_flat[idx] + new_rem + edge_bound + delta
            if mode == MODE_COST:
                if bound >= state["best"]:
                    continue
            elif bound > cstar:
                continue
            node_map[x] = y
            used[y] = 1
            for b in buckets:
                bucket_used[b] += 1
            stop = dfs(depth + 1, node_cost + ncost_flat[idx], new_rem, edge_bound + delta)
            node_map[x] = -1
            used[y] = 0
            for b in buckets:
                bucket_used[b] -= 1
            if stop:
                return True
        return False

    total_static_node = sum(static_node_min)
    total_static_edge = sum(static_edge_min)
    dfs(0, 0, total_static_node, total_static_edge)

    if state["budget_hit"]:
        # In count mode the partial tally is still useful diagnostics.
        value = state["count"] if mode == MODE_COUNT else 0
        return (ST_BUDGET, value, None, None, state["expansions"])
    if mode == MODE_COST:
        if state["best"] >= INF:
            return (ST_NOMATCH, 0, None, None, state["expansions"])
        return (ST_OK, state["best"], None, None, state["expansions"])
    if mode == MODE_LEX:
        if state["out_nmap"] is None:
            return (ST_NOMATCH, 0, None, None, state["expansions"])
        return (ST_OK, cstar, state["out_nmap"], state["out_emap"], state["expansions"])
    return (ST_OK, state["count"], None, None, state["expansions"])


def _assign_group(ecost, eh, pedges, hedges, want_pick):
    """Minimum-cost injective assignment of pattern to host edges.

    Both lists arrive ascending, so the first minimum found is the
    lexicographically least pick vector; equal-cost subtrees are pruned.
    """
    k = len(pedges)
    mins = [min(ecost[e * eh + f] for f in hedges) for e in pedges]
    suffix = [0] * (k + 1)
    for i in range(k - 1, -1, -1):
        suffix[i] = suffix[i + 1] + mins[i]
    taken = [False] * len(hedges)
    pick = [-1] * k
    best = [INF, None]

    def go(i, cost):
        if cost + suffix[i] >= best[0]:
            return
        if i == k:
            best[0] = cost
            best[1] = pick[:] if want_pick else True
            return
        row = pedges[i] * eh
        for j, f in enumerate(hedges):
            if taken[j]:
                continue
            taken[j] = True
            pick[i] = f
            go(i + 1, cost + ecost[row + f])
            taken[j] = False
    go(0, 0)
    return best[0], (best[1] if want_pick else None)
