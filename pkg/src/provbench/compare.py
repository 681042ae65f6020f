"""Comparison stage: background subtraction with dummy nodes.

The generalized background graph is embedded into the generalized
foreground graph by a minimum-cost subgraph matching; the matched
nodes and edges are removed (a set difference).  Any removed node that
still anchors a surviving edge is reinstated as a property-less dummy
node, so the extracted target graph stays a well-formed graph.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import BackgroundNotEmbeddableError, DanglingReferenceError
from .generalize import GeneralizedGraph
from .graph import PropertyGraph, canonical_form, emit_datalog, parse_datalog
from .matching import DEFAULT_BUDGET, best_subgraph_matching, count_optimal_embeddings

__all__ = [
    "BenchmarkGraph",
    "subtract",
    "is_empty_result",
    "write_benchmark_dl",
    "read_benchmark_dl",
]


@dataclass(frozen=True)
class BenchmarkGraph:
    """Extracted target structure plus its dummy anchor nodes.

    ``dummy_nodes`` lists vertices retained only because they anchor a
    surviving edge; they keep their label but carry no properties.
    ``residual_mismatches`` and ``optimal_embeddings`` are diagnostics
    from the subtraction (None when unknown, e.g. after reloading).
    """

    graph: PropertyGraph
    dummy_nodes: frozenset[str] = frozenset()
    empty: bool = False
    residual_mismatches: int | None = None
    optimal_embeddings: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "dummy_nodes", frozenset(self.dummy_nodes))
        unknown = self.dummy_nodes - set(self.graph.nodes)
        if unknown:
            raise DanglingReferenceError(f"dummy ids not in graph: {sorted(unknown)}")
        anchored = set()
        for (s, t, _lab) in self.graph.edges.values():
            anchored.add(s)
            anchored.add(t)
        orphaned = self.dummy_nodes - anchored
        if orphaned:
            raise ValueError(f"dummy nodes without incident edges: {sorted(orphaned)}")
        really_empty = not self.graph.nodes and not self.graph.edges
        if self.empty != really_empty:
            raise ValueError("empty flag disagrees with graph content")


def subtract(
    foreground: GeneralizedGraph,
    background: GeneralizedGraph,
    budget: int = DEFAULT_BUDGET,
) -> BenchmarkGraph:
    """Remove the background's image from the foreground.

    Finds a minimum-cost embedding of the background graph into the
    foreground graph and deletes its nodes and edges; matched elements
    are removed even when some of their properties mismatched (the
    mismatch count is reported as a diagnostic).  Raises
    :class:`BackgroundNotEmbeddableError` when no embedding exists,
    which breaks the append-only recording assumption and deserves a
    loud diagnostic rather than a bogus difference.
    """
    fg = foreground.graph
    bg = background.graph
    m = best_subgraph_matching(bg, fg, budget=budget)
    if m is None:
        raise BackgroundNotEmbeddableError(
            "background graph does not embed into the foreground graph"
        )
    n_optima = count_optimal_embeddings(bg, fg, budget=budget)
    matched_nodes = set(m.node_map.values())
    matched_edges = set(m.edge_map.values())

    edges = {e: spec for e, spec in fg.edges.items() if e not in matched_edges}
    keep_nodes = set(fg.nodes) - matched_nodes
    dummies = set()
    for (s, t, _lab) in edges.values():
        for x in (s, t):
            if x in matched_nodes:
                dummies.add(x)
    nodes = {x: fg.nodes[x] for x in keep_nodes | dummies}
    props = {
        (x, k): v
        for (x, k), v in fg.props.items()
        if (x in keep_nodes or x in edges)
    }
    graph = PropertyGraph(nodes, edges, props, fg.gid)
    return BenchmarkGraph(
        graph=graph,
        dummy_nodes=frozenset(dummies),
        empty=not nodes and not edges,
        residual_mismatches=m.cost,
        optimal_embeddings=n_optima,
    )


def is_empty_result(b: BenchmarkGraph) -> bool:
    """True when the benchmark captured nothing (graphs were similar)."""
    return not b.graph.nodes and not b.graph.edges


_DUMMY_LINE = re.compile(r"^%#dummy\s+(\S+)\s*$", re.MULTILINE)


def write_benchmark_dl(bench: BenchmarkGraph, gid: str = "r") -> str:
    """Serialize canonically, with dummy ids as %#dummy comment lines."""
    graph, rename = canonical_form(bench.graph)
    out = emit_datalog(graph, gid)
    for d in sorted(rename[x] for x in bench.dummy_nodes):
        out += f"%#dummy {d}\n"
    return out


def read_benchmark_dl(text: str) -> BenchmarkGraph:
    """Parse a benchmark graph file written by :func:`write_benchmark_dl`."""
    graph = parse_datalog(text)
    dummies = frozenset(_DUMMY_LINE.findall(text))
    return BenchmarkGraph(
        graph=graph,
        dummy_nodes=dummies,
        empty=not graph.nodes and not graph.edges,
    )
