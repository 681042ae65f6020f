"""Recorder output adapters.

Translates the formats emitted by capture tools into property graphs:
Graphviz DOT (as produced by SPADE-style exporters), W3C PROV-JSON (as
produced by CamFlow-style exporters), a plain generic JSON graph for
everything else, and the native Datalog format.

External element ids are sanitized into the id alphabet
``[a-z][a-z0-9_]*`` deterministically; colliding sanitizations get
numeric suffixes in first-seen order.  DOT edges have no ids of their
own, so they are assigned e1, e2, ... in document order (node names
that would collide are the ones renamed).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Mapping

from .errors import (
    DanglingReferenceError,
    ParseError,
    UnresolvedEndpointError,
    UnsupportedConstructError,
)
from .graph import PropertyGraph, parse_datalog

__all__ = [
    "FormatProfile",
    "FORMATS",
    "parse_dot",
    "parse_prov_json",
    "parse_generic_json",
    "to_generic_json",
    "load_document",
    "detect_format",
    "load_path",
]

FORMATS = ("dot", "prov-json", "generic-json", "datalog")

#: PROV relation key -> (source field, target field).
DEFAULT_RELATION_ENDPOINTS: Mapping[str, tuple[str, str]] = MappingProxyType({
    "used": ("prov:activity", "prov:entity"),
    "wasGeneratedBy": ("prov:entity", "prov:activity"),
    "wasInformedBy": ("prov:informed", "prov:informant"),
    "wasDerivedFrom": ("prov:generatedEntity", "prov:usedEntity"),
    "wasAssociatedWith": ("prov:activity", "prov:agent"),
    "actedOnBehalfOf": ("prov:delegate", "prov:responsible"),
    "relation": ("cf:sender", "cf:receiver"),
})

_REQUIRED_RELATIONS = frozenset(DEFAULT_RELATION_ENDPOINTS)


@dataclass(frozen=True)
class FormatProfile:
    """How to interpret one recorder's output format.

    ``label_attr`` names the DOT attribute treated as the element
    label; ``relation_endpoints`` maps PROV relation keys to their
    endpoint field names; ``strict`` makes undeclared PROV endpoints an
    error instead of synthesizing an external placeholder node.
    """

    tag: str = "datalog"
    label_attr: str = "label"
    relation_endpoints: Mapping[str, tuple[str, str]] = field(
        default_factory=lambda: DEFAULT_RELATION_ENDPOINTS
    )
    strict: bool = False

    def __post_init__(self):
        if self.tag not in FORMATS:
            raise ValueError(f"unknown format tag {self.tag!r}")
        missing = _REQUIRED_RELATIONS - set(self.relation_endpoints)
        if missing:
            raise ValueError(f"relation endpoint table lacks {sorted(missing)}")
        object.__setattr__(
            self, "relation_endpoints", MappingProxyType(dict(self.relation_endpoints))
        )


class _IdAllocator:
    """Deterministic mapping from external ids to valid element ids."""

    def __init__(self, reserved=()):
        self._taken = set(reserved)
        self._map: dict[str, str] = {}

    @staticmethod
    def _sanitize(external: str) -> str:
        out = re.sub(r"[^a-z0-9_]", "_", external.lower())
        if not out or not out[0].isalpha():
            out = "x" + out
        return out

    def _claim(self, external: str) -> str:
        base = self._sanitize(external)
        candidate, i = base, 1
        while candidate in self._taken:
            i += 1
            candidate = f"{base}_{i}"
        self._taken.add(candidate)
        return candidate

    def allocate(self, external: str) -> str:
        if external in self._map:
            return self._map[external]
        candidate = self._claim(external)
        self._map[external] = candidate
        return candidate

    def fresh(self, external: str) -> str:
        """Claim an id without memoizing: edge ids never alias node ids."""
        return self._claim(external)

    def lookup(self, external: str) -> str | None:
        return self._map.get(external)


def _stringify(value) -> str:
    """Canonical string form for JSON scalars and structures.

    Strings pass through; numbers and booleans use their JSON spelling
    (shortest decimal, lowercase true/false); structures flatten to
    compact key-sorted JSON text.
    """
    if isinstance(value, str):
        return value
    return json.dumps(value, separators=(",", ":"), sort_keys=True)


# ---------------------------------------------------------------------------
# DOT
# ---------------------------------------------------------------------------

_DOT_KEYWORDS = {"strict", "graph", "digraph", "subgraph", "node", "edge"}
_DOT_BARE = re.compile(r"[A-Za-z0-9_.\-]+")


class _DotLexer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1
        self.tokens: list[tuple[str, str, int, int]] = []
        self._lex()
        self.idx = 0

    def _advance(self, n: int):
        for _ in range(n):
            if self.text[self.pos] == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
            self.pos += 1

    def _lex(self):
        text = self.text
        while self.pos < len(text):
            ch = text[self.pos]
            if ch in " \t\r\n":
                self._advance(1)
            elif text.startswith("//", self.pos) or ch == "#":
                while self.pos < len(text) and text[self.pos] != "\n":
                    self._advance(1)
            elif text.startswith("/*", self.pos):
                end = text.find("*/", self.pos + 2)
                if end < 0:
                    raise ParseError("unterminated comment", self.line, self.col)
                self._advance(end + 2 - self.pos)
            elif text.startswith("->", self.pos):
                self._push("arrow", "->", 2)
            elif text.startswith("--", self.pos):
                self._push("undirected", "--", 2)
            elif ch in "{}[]=;,:":
                self._push(ch, ch, 1)
            elif ch == '"':
                self._lex_quoted()
            else:
                m = _DOT_BARE.match(text, self.pos)
                if not m:
                    raise ParseError(f"unexpected character {ch!r}", self.line, self.col)
                self._push("id", m.group(0), len(m.group(0)))

    def _push(self, kind: str, value: str, length: int):
        self.tokens.append((kind, value, self.line, self.col))
        self._advance(length)

    def _lex_quoted(self):
        line, col = self.line, self.col
        self._advance(1)
        out = []
        while True:
            if self.pos >= len(self.text):
                raise ParseError("unterminated string", line, col)
            ch = self.text[self.pos]
            self._advance(1)
            if ch == '"':
                break
            if ch == "\\" and self.pos < len(self.text):
                nxt = self.text[self.pos]
                if nxt in ('"', "\\"):
                    self._advance(1)
                    out.append(nxt)
                    continue
                # Graphviz leaves other backslash sequences alone.
            out.append(ch)
        # Quoted strings act like ids but never like keywords.
        self.tokens.append(("qid", "".join(out), line, col))

    # -- token stream ---------------------------------------------------

    def peek(self):
        if self.idx < len(self.tokens):
            return self.tokens[self.idx]
        return ("eof", "", self.line, self.col)

    def next(self):
        tok = self.peek()
        self.idx += 1
        return tok

    def error(self, message: str, tok=None) -> ParseError:
        tok = tok or self.peek()
        return ParseError(message, tok[2], tok[3])


def parse_dot(text: str, profile: FormatProfile | None = None) -> PropertyGraph:
    """Parse a restricted DOT digraph.

    Supported statements: node statements with attribute lists, edge
    chains ``a -> b -> c`` with attribute lists, and (ignored) graph or
    default-attribute statements.  Subgraphs, ports and undirected
    graphs raise :class:`UnsupportedConstructError`.  The attribute
    named by ``profile.label_attr`` becomes the element label (empty
    string when absent); remaining attributes become properties.  Edges
    get synthetic ids e1, e2, ... in document order.
    """
    profile = profile or FormatProfile(tag="dot")
    lx = _DotLexer(text)

    tok = lx.next()
    if tok[0] == "id" and tok[1].lower() == "strict":
        tok = lx.next()
    if tok[0] != "id" or tok[1].lower() not in ("digraph", "graph"):
        raise lx.error("expected 'digraph'", tok)
    if tok[1].lower() == "graph":
        raise UnsupportedConstructError("undirected graphs are unsupported", tok[2], tok[3])
    if lx.peek()[0] == "qid" or (
        lx.peek()[0] == "id" and lx.peek()[1].lower() not in _DOT_KEYWORDS
    ):
        lx.next()  # graph name
    opening = lx.next()
    if opening[0] != "{":
        raise lx.error("expected '{'", opening)

    node_attrs: dict[str, dict[str, str]] = {}
    node_order: list[str] = []
    edge_stmts: list[tuple[str, str, dict[str, str]]] = []

    def note_node(ext: str):
        if ext not in node_attrs:
            node_attrs[ext] = {}
            node_order.append(ext)

    while True:
        tok = lx.peek()
        if tok[0] == "}":
            lx.next()
            break
        if tok[0] == "eof":
            raise lx.error("unexpected end of input")
        if tok[0] == ";":
            lx.next()
            continue
        if tok[0] == "{":
            raise UnsupportedConstructError("subgraphs are unsupported", tok[2], tok[3])
        if tok[0] not in ("id", "qid"):
            raise lx.error(f"unexpected token {tok[1]!r}", tok)
        if tok[0] == "id":  # quoted names are never keywords
            word = tok[1].lower()
            if word == "subgraph":
                raise UnsupportedConstructError("subgraphs are unsupported", tok[2], tok[3])
            if word in ("graph", "node", "edge"):
                lx.next()
                _parse_attr_lists(lx)  # defaults are ignored
                continue
        name_tok = lx.next()
        nxt = lx.peek()
        if nxt[0] == "=":  # top-level graph attribute, ignored
            lx.next()
            value = lx.next()
            if value[0] not in ("id", "qid"):
                raise lx.error("expected attribute value", value)
            continue
        if nxt[0] == ":":
            raise UnsupportedConstructError("ports are unsupported", nxt[2], nxt[3])
        if nxt[0] == "undirected":
            raise UnsupportedConstructError("undirected edges are unsupported", nxt[2], nxt[3])
        if nxt[0] == "arrow":
            chain = [name_tok[1]]
            while lx.peek()[0] == "arrow":
                lx.next()
                hop = lx.next()
                if hop[0] not in ("id", "qid"):
                    raise lx.error("expected node id after '->'", hop)
                if lx.peek()[0] == ":":
                    raise UnsupportedConstructError("ports are unsupported")
                chain.append(hop[1])
            attrs = _parse_attr_lists(lx)
            for a, b in zip(chain, chain[1:]):
                note_node(a)
                note_node(b)
                edge_stmts.append((a, b, attrs))
        else:
            attrs = _parse_attr_lists(lx)
            note_node(name_tok[1])
            node_attrs[name_tok[1]].update(attrs)

    trailing = lx.peek()
    if trailing[0] != "eof":
        raise lx.error("text after closing '}'", trailing)

    edge_ids = [f"e{i + 1}" for i in range(len(edge_stmts))]
    allocator = _IdAllocator(reserved=edge_ids)
    nodes: dict[str, str] = {}
    props: dict[tuple[str, str], str] = {}
    for ext in node_order:
        attrs = dict(node_attrs[ext])
        x = allocator.allocate(ext)
        nodes[x] = attrs.pop(profile.label_attr, "")
        for k, v in attrs.items():
            props[(x, k)] = v
    edges: dict[str, tuple[str, str, str]] = {}
    for eid, (a, b, attrs) in zip(edge_ids, edge_stmts):
        attrs = dict(attrs)
        label = attrs.pop(profile.label_attr, "")
        edges[eid] = (allocator.lookup(a), allocator.lookup(b), label)
        for k, v in attrs.items():
            props[(eid, k)] = v
    return PropertyGraph(nodes, edges, props)


def _parse_attr_lists(lx: _DotLexer) -> dict[str, str]:
    attrs: dict[str, str] = {}
    while lx.peek()[0] == "[":
        lx.next()
        while True:
            tok = lx.peek()
            if tok[0] == "]":
                lx.next()
                break
            if tok[0] in (",", ";"):
                lx.next()
                continue
            if tok[0] not in ("id", "qid"):
                raise lx.error("expected attribute name", tok)
            name = lx.next()[1]
            eq = lx.next()
            if eq[0] != "=":
                raise lx.error("expected '=' in attribute", eq)
            value = lx.next()
            if value[0] not in ("id", "qid"):
                raise lx.error("expected attribute value", value)
            attrs[name] = value[1]
    return attrs


# ---------------------------------------------------------------------------
# PROV-JSON
# ---------------------------------------------------------------------------

_PROV_NODE_CATEGORIES = ("entity", "activity", "agent")


def parse_prov_json(text: str, profile: FormatProfile | None = None) -> PropertyGraph:
    """Parse a W3C PROV-JSON document.

    Records under entity/activity/agent become vertices labeled with
    their category; every other top-level key except ``prefix`` is
    treated as a relation whose records become edges labeled with that
    key.  Endpoints are resolved through the profile's relation
    endpoint table; unknown relation keys fall back to the first two
    string-valued fields in field-name order.  Undeclared endpoints are
    synthesized as empty-labeled vertices carrying ``external="true"``
    unless the profile is strict, in which case they are an error.
    """
    profile = profile or FormatProfile(tag="prov-json")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ParseError("PROV-JSON document must be a JSON object")

    allocator = _IdAllocator()
    nodes: dict[str, str] = {}
    props: dict[tuple[str, str], str] = {}
    edges: dict[str, tuple[str, str, str]] = {}

    for category in _PROV_NODE_CATEGORIES:
        records = data.get(category)
        if records is None:
            continue
        if not isinstance(records, dict):
            raise ParseError(f"{category!r} must map ids to records")
        for ext, record in records.items():
            if not isinstance(record, dict):
                raise ParseError(f"record {ext!r} must be an object")
            if allocator.lookup(ext) is not None:
                raise ParseError(f"duplicate node id {ext!r}")
            x = allocator.allocate(ext)
            nodes[x] = category
            for k, v in record.items():
                props[(x, k)] = _stringify(v)

    def resolve(ext: str, relation: str) -> str:
        found = allocator.lookup(ext)
        if found is not None and found in nodes:
            return found
        if profile.strict:
            raise UnresolvedEndpointError(
                f"relation {relation!r} references undeclared node {ext!r}"
            )
        x = allocator.allocate(ext)
        nodes[x] = ""
        props[(x, "external")] = "true"
        return x

    for key, records in data.items():
        if key in _PROV_NODE_CATEGORIES or key == "prefix":
            continue
        if not isinstance(records, dict):
            raise ParseError(f"relation {key!r} must map ids to records")
        endpoint_fields = profile.relation_endpoints.get(key)
        for ext, record in records.items():
            if not isinstance(record, dict):
                raise ParseError(f"record {ext!r} must be an object")
            if endpoint_fields is not None:
                sf, tf = endpoint_fields
                if sf not in record or tf not in record:
                    raise UnresolvedEndpointError(
                        f"relation {key!r} record {ext!r} lacks {sf!r} or {tf!r}"
                    )
            else:
                candidates = sorted(
                    k for k, v in record.items() if isinstance(v, str)
                )
                if len(candidates) < 2:
                    raise UnresolvedEndpointError(
                        f"cannot infer endpoints of unknown relation {key!r} "
                        f"record {ext!r}"
                    )
                sf, tf = candidates[0], candidates[1]
            src = resolve(str(record[sf]), key)
            tgt = resolve(str(record[tf]), key)
            eid = allocator.fresh(ext)
            edges[eid] = (src, tgt, key)
            for k, v in record.items():
                if k in (sf, tf):
                    continue
                props[(eid, k)] = _stringify(v)

    return PropertyGraph(nodes, edges, props)


# ---------------------------------------------------------------------------
# Generic JSON
# ---------------------------------------------------------------------------


def parse_generic_json(text: str) -> PropertyGraph:
    """Parse the generic JSON graph interchange format.

    The document is an object with ``nodes`` (id, label, properties)
    and ``edges`` (id, from, to, label, properties) arrays; the
    structure maps directly onto a property graph.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ParseError("generic graph document must be a JSON object")
    raw_nodes = data.get("nodes", [])
    raw_edges = data.get("edges", [])
    if not isinstance(raw_nodes, list) or not isinstance(raw_edges, list):
        raise ParseError("'nodes' and 'edges' must be arrays")

    allocator = _IdAllocator()
    nodes: dict[str, str] = {}
    edges: dict[str, tuple[str, str, str]] = {}
    props: dict[tuple[str, str], str] = {}

    for record in raw_nodes:
        if not isinstance(record, dict) or "id" not in record:
            raise ParseError("node records need an 'id'")
        ext = str(record["id"])
        if allocator.lookup(ext) is not None:
            raise ParseError(f"duplicate node id {ext!r}")
        x = allocator.allocate(ext)
        nodes[x] = _stringify(record.get("label", ""))
        for k, v in (record.get("properties") or {}).items():
            props[(x, k)] = _stringify(v)
    node_exts = {ext: allocator.lookup(ext) for ext in (str(r["id"]) for r in raw_nodes)}
    seen_edge_exts = set()
    for record in raw_edges:
        if not isinstance(record, dict) or "id" not in record:
            raise ParseError("edge records need an 'id'")
        for endpoint in ("from", "to"):
            if endpoint not in record:
                raise ParseError(f"edge {record['id']!r} lacks {endpoint!r}")
            if str(record[endpoint]) not in node_exts:
                raise DanglingReferenceError(
                    f"edge {record['id']!r} references unknown node "
                    f"{record[endpoint]!r}"
                )
        ext = str(record["id"])
        if ext in seen_edge_exts:
            raise ParseError(f"duplicate edge id {ext!r}")
        seen_edge_exts.add(ext)
        eid = allocator.fresh(ext)
        edges[eid] = (
            node_exts[str(record["from"])],
            node_exts[str(record["to"])],
            _stringify(record.get("label", "")),
        )
        for k, v in (record.get("properties") or {}).items():
            props[(eid, k)] = _stringify(v)

    return PropertyGraph(nodes, edges, props)


def to_generic_json(graph: PropertyGraph) -> str:
    """Serialize a graph to the generic JSON format (sorted, indented)."""
    doc = {
        "nodes": [
            {"id": x, "label": graph.nodes[x], "properties": graph.props_of(x)}
            for x in sorted(graph.nodes)
        ],
        "edges": [
            {
                "id": e,
                "from": graph.edges[e][0],
                "to": graph.edges[e][1],
                "label": graph.edges[e][2],
                "properties": graph.props_of(e),
            }
            for e in sorted(graph.edges)
        ],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# Dispatch
# ---------------------------------------------------------------------------


def load_document(text: str, profile: FormatProfile) -> PropertyGraph:
    """Parse ``text`` according to the profile's format tag."""
    if profile.tag == "datalog":
        return parse_datalog(text)
    if profile.tag == "dot":
        return parse_dot(text, profile)
    if profile.tag == "prov-json":
        return parse_prov_json(text, profile)
    return parse_generic_json(text)


def detect_format(path: str | Path) -> str | None:
    """Format tag implied by a file name, or None."""
    name = str(path)
    if name.endswith(".gj.json"):
        return "generic-json"
    if name.endswith(".json"):
        return "prov-json"
    if name.endswith(".dot"):
        return "dot"
    if name.endswith(".dl"):
        return "datalog"
    return None


def load_path(path: str | Path, profile: FormatProfile | None = None) -> PropertyGraph:
    """Read and parse one file, inferring the format from its extension
    unless a profile overrides it."""
    path = Path(path)
    if profile is None:
        tag = detect_format(path)
        if tag is None:
            raise ParseError(f"cannot infer format of {path.name!r}")
        profile = FormatProfile(tag=tag)
    return load_document(path.read_text(encoding="utf-8"), profile)
