"""Random property-graph generators shared by the test suite.

All generators take an explicit ``random.Random`` so every test run is
reproducible from its seed.
"""

from __future__ import annotations

import random

from provbench.graph import PropertyGraph

LABELS = ("A", "B", "C")
KEYS = ("k1", "k2", "k3", "k4")
VALUES = ("u", "v", "w")


def random_graph(
    rng: random.Random,
    max_nodes: int = 6,
    max_edges: int = 8,
    labels=LABELS,
    keys=KEYS,
    values=VALUES,
    min_nodes: int = 0,
    prop_rate: float = 0.4,
    gid: str = "g",
) -> PropertyGraph:
    n = rng.randint(min_nodes, max_nodes)
    nodes = {f"n{i + 1}": rng.choice(labels) for i in range(n)}
    edges = {}
    if n:
        ids = list(nodes)
        for j in range(rng.randint(0, max_edges)):
            edges[f"e{j + 1}"] = (rng.choice(ids), rng.choice(ids), rng.choice(labels))
    props = {}
    for x in list(nodes) + list(edges):
        for k in keys:
            if rng.random() < prop_rate:
                props[(x, k)] = rng.choice(values)
    return PropertyGraph(nodes, edges, props, gid)


def permuted_copy(rng: random.Random, g: PropertyGraph) -> PropertyGraph:
    """Same graph under fresh random ids."""
    ids = sorted(g.element_ids())
    shuffled = ids[:]
    rng.shuffle(shuffled)
    rename = {old: f"x{i + 1}_{shuffled[i]}" for i, old in enumerate(ids)}
    nodes = {rename[x]: lab for x, lab in g.nodes.items()}
    edges = {rename[e]: (rename[s], rename[t], lab) for e, (s, t, lab) in g.edges.items()}
    props = {(rename[x], k): v for (x, k), v in g.props.items()}
    return PropertyGraph(nodes, edges, props, g.gid)


def mutate_prop_values(rng: random.Random, g: PropertyGraph, changes: int) -> PropertyGraph:
    """Overwrite up to ``changes`` property values with different ones."""
    props = dict(g.props)
    keys = sorted(props)
    rng.shuffle(keys)
    for key in keys[:changes]:
        old = props[key]
        props[key] = old + "x"
    return PropertyGraph(dict(g.nodes), dict(g.edges), props, g.gid)


def extend_graph(
    rng: random.Random, g: PropertyGraph, extra_nodes: int, extra_edges: int
) -> PropertyGraph:
    """A host graph containing ``g`` plus extra structure."""
    nodes = dict(g.nodes)
    edges = dict(g.edges)
    props = dict(g.props)
    added = []
    for i in range(extra_nodes):
        nodes[f"z{i + 1}"] = rng.choice(LABELS)
        added.append(f"z{i + 1}")
    ids = list(nodes)
    for j in range(extra_edges if ids else 0):
        edges[f"y{j + 1}"] = (rng.choice(ids), rng.choice(ids), rng.choice(LABELS))
        added.append(f"y{j + 1}")
    for x in added:
        for k in KEYS:
            if rng.random() < 0.4:
                props[(x, k)] = rng.choice(VALUES)
    return PropertyGraph(nodes, edges, props, g.gid)


def random_pair(rng: random.Random, max_nodes=6, max_edges=8):
    """A (pattern, host) pair mixing related and unrelated cases."""
    g1 = random_graph(rng, max_nodes=max_nodes, max_edges=max_edges)
    style = rng.randrange(4)
    if style == 0:
        g2 = random_graph(rng, max_nodes=max_nodes, max_edges=max_edges)
    elif style == 1:
        g2 = permuted_copy(rng, mutate_prop_values(rng, g1, rng.randint(0, 3)))
    elif style == 2:
        g2 = extend_graph(rng, permuted_copy(rng, g1), rng.randint(0, 2), rng.randint(0, 2))
    else:
        g2 = mutate_prop_values(rng, g1, rng.randint(0, 2))
    return g1, g2
