"""Flat integer encoding of a matching instance.

Both search kernels (the pure Python one and its compiled twin) run on
the same :class:`Instance`: labels interned to ints, elements numbered
by shortlex id order, candidate lists pre-filtered by label and degree
signature, and property-mismatch costs precomputed into matrices.  Host
edges are grouped into buckets keyed by (source, target, label) so the
search can check edge capacity and, at a leaf, assign pattern edges to
host edges bucket by bucket.

Element numbering doubles as the tie-break order: the solver returns
the matching whose node map (then edge map) is lexicographically least
over pattern elements in shortlex id order, comparing images by their
shortlex rank.
"""

from __future__ import annotations

from ..graph import PropertyGraph, shortlex

__all__ = ["Instance", "encode_problem", "INF"]

INF = 1 << 30


class Instance:
    """One encoded matching instance (see module docstring)."""

    __slots__ = (
        "np", "nh", "ep", "eh", "n_labels",
        "cand_off", "cand_flat", "ncost_flat", "static_node_min",
        "pe_src", "pe_tgt", "pe_lab",
        "ecost_flat", "static_edge_min",
        "bucket_keys", "bucket_off", "bucket_edges",
        "adj_off", "adj_edge", "adj_other",
        "order1",
        "pat_node_ids", "host_node_ids", "pat_edge_ids", "host_edge_ids",
    )


def _signature(
    edges: dict[str, tuple[str, str, str]], lab_id: dict[str, int]
) -> dict[str, dict[tuple[int, int], int]]:
    """Per-node degree signature: (kind, edge label) -> count.

    Kind 0 counts outgoing edges, 1 incoming, 2 self-loops; self-loops
    are also included in the outgoing and incoming counts.
    """
    sig: dict[str, dict[tuple[int, int], int]] = {}
    for (s, t, lab) in edges.values():
        li = lab_id[lab]
        ssig = sig.setdefault(s, {})
        ssig[(0, li)] = ssig.get((0, li), 0) + 1
        tsig = sig.setdefault(t, {})
        tsig[(1, li)] = tsig.get((1, li), 0) + 1
        if s == t:
            ssig[(2, li)] = ssig.get((2, li), 0) + 1
    return sig


def _prop_mismatch(pat_props: dict[str, str], host_props: dict[str, str]) -> int:
    return sum(1 for k, v in pat_props.items() if host_props.get(k) != v)


def encode_problem(pattern: PropertyGraph, host: PropertyGraph, exact: bool) -> Instance:
    inst = Instance()

    labels = sorted(
        {lab for lab in pattern.nodes.values()}
        | {lab for lab in host.nodes.values()}
        | {lab for (_s, _t, lab) in pattern.edges.values()}
        | {lab for (_s, _t, lab) in host.edges.values()}
    )
    lab_id = {lab: i for i, lab in enumerate(labels)}
    inst.n_labels = max(len(labels), 1)

    inst.pat_node_ids = sorted(pattern.nodes, key=shortlex)
    inst.host_node_ids = sorted(host.nodes, key=shortlex)
    inst.pat_edge_ids = sorted(pattern.edges, key=shortlex)
    inst.host_edge_ids = sorted(host.edges, key=shortlex)
    pn_idx = {x: i for i, x in enumerate(inst.pat_node_ids)}
    hn_idx = {x: i for i, x in enumerate(inst.host_node_ids)}
    inst.np = len(inst.pat_node_ids)
    inst.nh = len(inst.host_node_ids)
    inst.ep = len(inst.pat_edge_ids)
    inst.eh = len(inst.host_edge_ids)

    pat_props = {x: pattern.props_of(x) for x in pattern.element_ids()}
    host_props = {x: host.props_of(x) for x in host.element_ids()}

    # Candidate lists: label equality plus degree-signature feasibility
    # (equality in exact-bijective mode, component-wise <= in subgraph
    # mode).  Properties never constrain feasibility, only cost.
    psig = _signature(dict(pattern.edges), lab_id)
    hsig = _signature(dict(host.edges), lab_id)
    cand_off = [0]
    cand_flat: list[int] = []
    ncost_flat: list[int] = []
    static_node_min: list[int] = []
    for x in inst.pat_node_ids:
        xsig = psig.get(x, {})
        best = INF
        for j, y in enumerate(inst.host_node_ids):
            if pattern.nodes[x] != host.nodes[y]:
                continue
            ysig = hsig.get(y, {})
            if exact:
                if xsig != ysig:
                    continue
            else:
                if any(ysig.get(key, 0) < n for key, n in xsig.items()):
                    continue
            c = _prop_mismatch(pat_props[x], host_props[y])
            cand_flat.append(j)
            ncost_flat.append(c)
            best = min(best, c)
        cand_off.append(len(cand_flat))
        static_node_min.append(best)
    inst.cand_off = cand_off
    inst.cand_flat = cand_flat
    inst.ncost_flat = ncost_flat
    inst.static_node_min = static_node_min

    inst.pe_src = [pn_idx[pattern.edges[e][0]] for e in inst.pat_edge_ids]
    inst.pe_tgt = [pn_idx[pattern.edges[e][1]] for e in inst.pat_edge_ids]
    inst.pe_lab = [lab_id[pattern.edges[e][2]] for e in inst.pat_edge_ids]
    he_lab = [lab_id[host.edges[e][2]] for e in inst.host_edge_ids]

    ecost = [INF] * (inst.ep * inst.eh)
    static_edge_min = [INF] * inst.ep
    for i, e in enumerate(inst.pat_edge_ids):
        pp = pat_props[e]
        row = i * inst.eh
        for j, f in enumerate(inst.host_edge_ids):
            if inst.pe_lab[i] != he_lab[j]:
                continue
            c = _prop_mismatch(pp, host_props[f])
            ecost[row + j] = c
            if c < static_edge_min[i]:
                static_edge_min[i] = c
    inst.ecost_flat = ecost
    inst.static_edge_min = static_edge_min

    # Host edge buckets, keyed by (src index, tgt index, label id)
    # packed into one int; keys sorted so kernels can binary-search.
    nh, nl = inst.nh, inst.n_labels
    grouped: dict[int, list[int]] = {}
    for j, f in enumerate(inst.host_edge_ids):
        s, t, _lab = host.edges[f]
        key = (hn_idx[s] * nh + hn_idx[t]) * nl + he_lab[j]
        grouped.setdefault(key, []).append(j)
    inst.bucket_keys = sorted(grouped)
    bucket_off = [0]
    bucket_edges: list[int] = []
    for key in inst.bucket_keys:
        bucket_edges.extend(sorted(grouped[key]))
        bucket_off.append(len(bucket_edges))
    inst.bucket_off = bucket_off
    inst.bucket_edges = bucket_edges

    # Pattern adjacency: for node x, the incident edges with the other
    # endpoint; self-loops appear once with other == x.
    adj: list[list[tuple[int, int]]] = [[] for _ in range(inst.np)]
    for i in range(inst.ep):
        s, t = inst.pe_src[i], inst.pe_tgt[i]
        adj[s].append((i, t))
        if s != t:
            adj[t].append((i, s))
    adj_off = [0]
    adj_edge: list[int] = []
    adj_other: list[int] = []
    for entries in adj:
        for (e, o) in entries:
            adj_edge.append(e)
            adj_other.append(o)
        adj_off.append(len(adj_edge))
    inst.adj_off = adj_off
    inst.adj_edge = adj_edge
    inst.adj_other = adj_other

    # Phase-1 assignment order: most-constrained first, preferring
    # nodes adjacent to already-ordered ones so edge buckets start
    # pruning early.  Deterministic; used only to find the optimal
    # cost, never the reported tie-break.
    n_cand = [cand_off[i + 1] - cand_off[i] for i in range(inst.np)]
    adjacent = [False] * inst.np
    remaining = set(range(inst.np))
    order1: list[int] = []
    while remaining:
        x = min(remaining, key=lambda i: (not adjacent[i], n_cand[i], i))
        order1.append(x)
        remaining.remove(x)
        for k in range(adj_off[x], adj_off[x + 1]):
            adjacent[adj_other[k]] = True
    inst.order1 = order1

    return inst
