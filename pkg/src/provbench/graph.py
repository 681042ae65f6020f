"""Property-graph model and its Datalog wire format.

A property graph is a directed labeled multigraph whose vertices and
edges carry string labels and optional string key/value properties.
Graphs are exchanged as plain-text Datalog facts::

    n<gid>(<id>,"<label>").
    e<gid>(<id>,<srcId>,<tgtId>,"<label>").
    p<gid>(<nodeId/edgeId>,"<key>","<value>").

where ``gid`` is an alphanumeric graph identifier embedded in the
relation names, element ids match ``[a-z][a-z0-9_]*``, and quoted
strings escape only ``\\"`` and ``\\\\``.  Lines starting with ``%``
are comments.  Facts may appear in any order; parsing is two-pass.

Parallel edges and self-loops are legal.  Vertex ids and edge ids live
in one shared namespace and must be disjoint.  All values are immutable
after construction, so graphs can be shared freely across threads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping

from .errors import (
    ConflictingPropertyError,
    DanglingReferenceError,
    IdClashError,
    MixedGidError,
    ParseError,
)

__all__ = [
    "PropertyGraph",
    "parse_datalog",
    "emit_datalog",
    "canonicalize",
    "canonical_form",
    "shortlex",
]

_ID_RE = re.compile(r"[a-z][a-z0-9_]*\Z")
_GID_RE = re.compile(r"[A-Za-z0-9]+\Z")

DEFAULT_GID = "g"


def shortlex(s: str) -> tuple[int, str]:
    """Sort key ordering strings by length, then lexicographically.

    Under shortlex the generated id sequence n1, n2, ..., n10 sorts in
    numeric order, which plain lexicographic order would not.
    """
    return (len(s), s)


def _valid_id(x: str) -> bool:
    return bool(_ID_RE.match(x))


@dataclass(frozen=True)
class PropertyGraph:
    """Immutable directed labeled multigraph with string properties.

    ``nodes`` maps vertex id to label; ``edges`` maps edge id to a
    ``(src, tgt, label)`` triple; ``props`` maps ``(element id, key)``
    to a value, where the element may be a vertex or an edge.
    Invariants (checked at construction):

    * vertex and edge id sets are disjoint,
    * every edge endpoint is an existing vertex id,
    * every property refers to an existing vertex or edge,
    * ids match ``[a-z][a-z0-9_]*`` and the gid is alphanumeric.
    """

    nodes: Mapping[str, str] = field(default_factory=dict)
    edges: Mapping[str, tuple[str, str, str]] = field(default_factory=dict)
    props: Mapping[tuple[str, str], str] = field(default_factory=dict)
    gid: str = DEFAULT_GID

    def __post_init__(self):
        nodes = dict(self.nodes)
        edges = dict(self.edges)
        props = dict(self.props)
        if not _GID_RE.match(self.gid):
            raise ValueError(f"invalid gid {self.gid!r}")
        for x in nodes:
            if not _valid_id(x):
                raise ValueError(f"invalid vertex id {x!r}")
        clashes = nodes.keys() & edges.keys()
        if clashes:
            raise IdClashError(
                f"ids used as both vertex and edge: {sorted(clashes)}"
            )
        for e, (src, tgt, _lab) in edges.items():
            if not _valid_id(e):
                raise ValueError(f"invalid edge id {e!r}")
            if src not in nodes or tgt not in nodes:
                raise DanglingReferenceError(
                    f"edge {e} references unknown vertex "
                    f"{src if src not in nodes else tgt!r}"
                )
        for (x, _k) in props:
            if x not in nodes and x not in edges:
                raise DanglingReferenceError(
                    f"property on unknown element {x!r}"
                )
        object.__setattr__(self, "nodes", MappingProxyType(nodes))
        object.__setattr__(self, "edges", MappingProxyType(edges))
        object.__setattr__(self, "props", MappingProxyType(props))

    # -- convenience ----------------------------------------------------

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def prop_count(self) -> int:
        return len(self.props)

    def props_of(self, x: str) -> dict[str, str]:
        """Properties of one element as a plain dict."""
        return {k: v for (e, k), v in self.props.items() if e == x}

    def element_ids(self) -> set[str]:
        return set(self.nodes) | set(self.edges)

    def label_of(self, x: str) -> str:
        if x in self.nodes:
            return self.nodes[x]
        return self.edges[x][2]

    def node_label_multiset(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for lab in self.nodes.values():
            out[lab] = out.get(lab, 0) + 1
        return out

    def edge_label_multiset(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for (_s, _t, lab) in self.edges.values():
            out[lab] = out.get(lab, 0) + 1
        return out

    def with_gid(self, gid: str) -> "PropertyGraph":
        return PropertyGraph(dict(self.nodes), dict(self.edges), dict(self.props), gid)

    def __repr__(self):  # the mappings are too noisy for debugging output
        return (
            f"PropertyGraph(gid={self.gid!r}, nodes={self.node_count}, "
            f"edges={self.edge_count}, props={self.prop_count})"
        )


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


class _Scanner:
    """Character scanner with 1-based line/column tracking."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1

    def eof(self) -> bool:
        return self.pos >= len(self.text)

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def advance(self) -> str:
        ch = self.text[self.pos]
        self.pos += 1
        if ch == "\n":
            self.line += 1
            self.col = 1
        else:
            self.col += 1
        return ch

    def error(self, message: str) -> ParseError:
        return ParseError(message, self.line, self.col)

    def skip_ws_and_comments(self):
        while not self.eof():
            ch = self.peek()
            if ch in " \t\r\n":
                self.advance()
            elif ch == "%":
                while not self.eof() and self.peek() != "\n":
                    self.advance()
            else:
                return

    def expect(self, ch: str):
        if self.eof() or self.peek() != ch:
            found = "end of input" if self.eof() else repr(self.peek())
            raise self.error(f"expected {ch!r}, found {found}")
        self.advance()

    def read_bare_token(self) -> str:
        start = self.pos
        while not self.eof() and (self.peek().isalnum() or self.peek() == "_"):
            self.advance()
        if self.pos == start:
            found = "end of input" if self.eof() else repr(self.peek())
            raise self.error(f"expected identifier, found {found}")
        return self.text[start : self.pos]

    def read_qstring(self) -> str:
        self.expect('"')
        out: list[str] = []
        while True:
            if self.eof():
                raise self.error("unterminated string")
            ch = self.advance()
            if ch == '"':
                return "".join(out)
            if ch == "\\":
                if self.eof():
                    raise self.error("unterminated escape")
                esc = self.advance()
                if esc not in ('"', "\\"):
                    raise self.error(f"unsupported escape \\{esc}")
                out.append(esc)
            else:
                out.append(ch)


def _split_relation(scanner: _Scanner, token: str) -> tuple[str, str]:
    kind, gid = token[:1], token[1:]
    if kind not in ("n", "e", "p") or not _GID_RE.match(gid):
        raise scanner.error(f"unknown relation {token!r}")
    return kind, gid


def parse_datalog(text: str) -> PropertyGraph:
    """Parse a Datalog fact document into a property graph.

    Accepts facts in any order (properties may precede the elements
    they refer to), deduplicates identical facts, and rejects every
    malformed document with a positioned :class:`ParseError`.  Exactly
    one gid may appear; it becomes the graph's gid.  An empty document
    yields an empty graph with the default gid.
    """
    scanner = _Scanner(text)
    gid: str | None = None
    nodes: dict[str, str] = {}
    edges: dict[str, tuple[str, str, str]] = {}
    props: dict[tuple[str, str], str] = {}

    def check_id(x: str) -> str:
        if not _valid_id(x):
            raise scanner.error(f"invalid element id {x!r}")
        return x

    while True:
        scanner.skip_ws_and_comments()
        if scanner.eof():
            break
        rel = scanner.read_bare_token()
        kind, fact_gid = _split_relation(scanner, rel)
        if gid is None:
            gid = fact_gid
        elif fact_gid != gid:
            raise MixedGidError(
                f"graph id {fact_gid!r} conflicts with {gid!r}",
                scanner.line,
                scanner.col,
            )
        scanner.expect("(")
        scanner.skip_ws_and_comments()
        if kind == "n":
            x = check_id(scanner.read_bare_token())
            _expect_comma(scanner)
            label = scanner.read_qstring()
            _close_fact(scanner)
            if x in edges:
                raise IdClashError(f"id {x!r} used as both vertex and edge")
            if x in nodes and nodes[x] != label:
                raise scanner.error(
                    f"vertex {x!r} redeclared with a different label"
                )
            nodes[x] = label
        elif kind == "e":
            e = check_id(scanner.read_bare_token())
            _expect_comma(scanner)
            src = check_id(scanner.read_bare_token())
            _expect_comma(scanner)
            tgt = check_id(scanner.read_bare_token())
            _expect_comma(scanner)
            label = scanner.read_qstring()
            _close_fact(scanner)
            if e in nodes:
                raise IdClashError(f"id {e!r} used as both vertex and edge")
            decl = (src, tgt, label)
            if e in edges and edges[e] != decl:
                raise scanner.error(f"edge {e!r} redeclared differently")
            edges[e] = decl
        else:
            x = check_id(scanner.read_bare_token())
            _expect_comma(scanner)
            key = scanner.read_qstring()
            _expect_comma(scanner)
            value = scanner.read_qstring()
            _close_fact(scanner)
            if (x, key) in props and props[(x, key)] != value:
                raise ConflictingPropertyError(
                    f"conflicting values for property {key!r} on {x!r}: "
                    f"{props[(x, key)]!r} vs {value!r}"
                )
            props[(x, key)] = value

    return PropertyGraph(nodes, edges, props, gid or DEFAULT_GID)


def _expect_comma(scanner: _Scanner):
    scanner.skip_ws_and_comments()
    scanner.expect(",")
    scanner.skip_ws_and_comments()


def _close_fact(scanner: _Scanner):
    scanner.skip_ws_and_comments()
    scanner.expect(")")
    scanner.skip_ws_and_comments()
    scanner.expect(".")


# ---------------------------------------------------------------------------
# Emission
# ---------------------------------------------------------------------------


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def emit_datalog(graph: PropertyGraph, gid: str | None = None) -> str:
    """Serialize a graph as Datalog facts, one per line.

    Node facts come first, then edge facts, then property facts; each
    group is sorted lexicographically by element id (and key).  The
    output reparses to a graph identical to the input.  An empty graph
    emits the empty string.
    """
    if gid is None:
        gid = graph.gid
    if not _GID_RE.match(gid):
        raise ValueError(f"invalid gid {gid!r}")
    lines = []
    for x in sorted(graph.nodes):
        lines.append(f"n{gid}({x},{_quote(graph.nodes[x])}).")
    for e in sorted(graph.edges):
        src, tgt, lab = graph.edges[e]
        lines.append(f"e{gid}({e},{src},{tgt},{_quote(lab)}).")
    for (x, k) in sorted(graph.props):
        lines.append(f"p{gid}({x},{_quote(k)},{_quote(graph.props[(x, k)])}).")
    if not lines:
        return ""
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Canonical relabeling
# ---------------------------------------------------------------------------
#
# Canonical form must give byte-identical serializations for any two
# graphs that are isomorphic with equal properties.  A one-shot sort by
# (label, degree signature, properties) cannot do that: elements tied
# on all three can still differ in how they connect, and breaking such
# ties by original id leaks the input labeling into the output.  We use
# the standard remedy: iterated color refinement over that same key,
# plus individualization branching when refinement stalls, choosing the
# branch with the least serialization.  Interchangeable ("twin")
# elements are collapsed before branching, which keeps the common case
# of repeated identical substructures linear.


def canonicalize(graph: PropertyGraph) -> PropertyGraph:
    """Relabel element ids to n1..nk / e1..em in a canonical order.

    The output is isomorphic to the input with identical labels and
    properties, canonicalize is idempotent, and two isomorphic graphs
    with equal properties canonicalize to byte-identical emissions.
    Runtime is linear-ish for graphs whose refinement becomes discrete
    and can degrade combinatorially on highly symmetric inputs.
    """
    return canonical_form(graph)[0]


def canonical_form(graph: PropertyGraph) -> tuple[PropertyGraph, dict[str, str]]:
    """Like :func:`canonicalize` but also returns the old-to-new id map."""
    if not graph.nodes:
        return PropertyGraph({}, {}, {}, graph.gid), {}
    node_order = _canonical_node_order(graph)
    return _relabel(graph, node_order)


def _relabel(
    graph: PropertyGraph, node_order: list[str]
) -> tuple[PropertyGraph, dict[str, str]]:
    rename = {x: f"n{i + 1}" for i, x in enumerate(node_order)}
    rank = {x: i for i, x in enumerate(node_order)}
    prop_lists = {x: tuple(sorted(graph.props_of(x).items())) for x in graph.element_ids()}
    edge_order = sorted(
        graph.edges,
        key=lambda e: (
            rank[graph.edges[e][0]],
            rank[graph.edges[e][1]],
            graph.edges[e][2],
            prop_lists[e],
            shortlex(e),
        ),
    )
    for i, e in enumerate(edge_order):
        rename[e] = f"e{i + 1}"
    nodes = {rename[x]: lab for x, lab in graph.nodes.items()}
    edges = {
        rename[e]: (rename[s], rename[t], lab)
        for e, (s, t, lab) in graph.edges.items()
    }
    props = {(rename[x], k): v for (x, k), v in graph.props.items()}
    return PropertyGraph(nodes, edges, props, graph.gid), rename


def _refine(
    graph: PropertyGraph,
    node_color: dict[str, int],
    edge_color: dict[str, int],
) -> tuple[dict[str, int], dict[str, int]]:
    """Iterate color refinement to a fixed point.

    Edge colors absorb endpoint colors; node colors absorb the multiset
    of (direction, edge color) pairs over incident edges.  Signatures
    are dense-ranked each round, so the resulting integers depend only
    on structure, never on ids.
    """
    incident: dict[str, list[tuple[int, str]]] = {x: [] for x in graph.nodes}
    for e, (s, t, _lab) in graph.edges.items():
        incident[s].append((0, e))
        incident[t].append((1, e))
    while True:
        esig = {
            e: (edge_color[e], node_color[s], node_color[t])
            for e, (s, t, _lab) in graph.edges.items()
        }
        edge_color = _dense_rank(esig)
        nsig = {
            x: (node_color[x], tuple(sorted((d, edge_color[e]) for d, e in incident[x])))
            for x in graph.nodes
        }
        new_node_color = _dense_rank(nsig)
        stable = len(set(new_node_color.values())) == len(set(node_color.values()))
        node_color = new_node_color
        if stable:
            return node_color, edge_color


def _dense_rank(sig: dict[str, tuple]) -> dict[str, int]:
    ranks = {s: i for i, s in enumerate(sorted(set(sig.values())))}
    return {x: ranks[s] for x, s in sig.items()}


def _initial_colors(graph: PropertyGraph) -> tuple[dict[str, int], dict[str, int]]:
    nsig = {
        x: (graph.nodes[x], tuple(sorted(graph.props_of(x).items())))
        for x in graph.nodes
    }
    esig = {
        e: (lab, tuple(sorted(graph.props_of(e).items())))
        for e, (_s, _t, lab) in graph.edges.items()
    }
    return _dense_rank(nsig), _dense_rank(esig)


def _canonical_node_order(graph: PropertyGraph) -> list[str]:
    node_color, edge_color = _initial_colors(graph)
    node_color, edge_color = _refine(graph, node_color, edge_color)
    order = _search_order(graph, node_color, edge_color)
    return order


def _search_order(
    graph: PropertyGraph,
    node_color: dict[str, int],
    edge_color: dict[str, int],
) -> list[str]:
    classes: dict[int, list[str]] = {}
    for x, c in node_color.items():
        classes.setdefault(c, []).append(x)
    stuck = [c for c, xs in sorted(classes.items()) if len(xs) > 1]
    if not stuck:
        return sorted(graph.nodes, key=lambda x: node_color[x])
    members = sorted(classes[stuck[0]], key=shortlex)
    groups = _twin_groups(graph, members)
    base = max(node_color.values())
    if len(groups) == 1:
        # The whole class is mutually interchangeable: any relative
        # order yields the same serialization, so fix one outright
        # instead of branching member by member.
        nc = dict(node_color)
        for i, v in enumerate(groups[0]):
            nc[v] = base + 1 + i
        nc2, ec2 = _refine(graph, nc, edge_color)
        return _search_order(graph, nc2, ec2)
    best: tuple[str, list[str]] | None = None
    for group in groups:
        nc = dict(node_color)
        nc[group[0]] = base + 1
        nc2, ec2 = _refine(graph, nc, edge_color)
        order = _search_order(graph, nc2, ec2)
        key = emit_datalog(_relabel(graph, order)[0], "c")
        if best is None or key < best[0]:
            best = (key, order)
    return best[1]


def _twin_groups(graph: PropertyGraph, members: list[str]) -> list[list[str]]:
    """Group members that are pairwise swappable by an automorphism.

    Two same-class vertices u, v are twins when transposing just u and
    v maps the graph onto itself (labels and properties included), i.e.
    the multiset of edges incident to either is invariant under the
    swap.  Twin-ness is transitive (transpositions compose), so the
    groups partition the class; all members of a group yield identical
    canonical serializations.
    """
    prop_lists = {x: tuple(sorted(graph.props_of(x).items())) for x in graph.element_ids()}

    def twins(u: str, v: str) -> bool:
        if prop_lists[u] != prop_lists[v]:
            return False
        swap = {u: v, v: u}
        touched = sorted(
            (s, t, lab, prop_lists[e])
            for e, (s, t, lab) in graph.edges.items()
            if s in swap or t in swap
        )
        swapped = sorted(
            (swap.get(s, s), swap.get(t, t), lab, pl) for (s, t, lab, pl) in touched
        )
        return touched == swapped

    groups: list[list[str]] = []
    for m in members:
        for group in groups:
            if twins(group[0], m):
                group.append(m)
                break
        else:
            groups.append([m])
    return groups
