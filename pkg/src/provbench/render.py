"""DOT and HTML rendering of benchmark results.

Node styling is driven by a configurable table mapping label
substrings to (shape, fill color); by default labels containing
"process" or "activity" render as blue rectangles and everything else
as yellow ovals.  Dummy nodes always render as gray ovals.  Output
ordering is deterministic (shortlex over element ids).
"""

from __future__ import annotations

import html
import re
from typing import Iterable, Mapping

from .graph import PropertyGraph, shortlex

__all__ = ["DEFAULT_STYLE_TABLE", "graph_to_dot", "emit_dot", "emit_html"]

#: label substring (lowercase) -> (shape, fillcolor)
DEFAULT_STYLE_TABLE: Mapping[str, tuple[str, str]] = {
    "process": ("rectangle", "blue"),
    "activity": ("rectangle", "blue"),
}
_FALLBACK_STYLE = ("oval", "yellow")
_DUMMY_STYLE = ("oval", "gray")

_BARE_ATTR = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def _quote(value: str) -> str:
    return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _attr_name(name: str) -> str:
    return name if _BARE_ATTR.match(name) else _quote(name)


def _style_for(label: str, style_table: Mapping[str, tuple[str, str]]):
    lowered = label.lower()
    for needle in sorted(style_table):
        if needle in lowered:
            return style_table[needle]
    return _FALLBACK_STYLE


def graph_to_dot(
    graph: PropertyGraph,
    dummies: Iterable[str] = (),
    name: str = "g",
    style_table: Mapping[str, tuple[str, str]] | None = None,
) -> str:
    """Render a property graph as a DOT digraph.

    Properties are emitted as attributes, so reparsing the output
    recovers the same node and edge counts and labels.
    """
    if style_table is None:
        style_table = DEFAULT_STYLE_TABLE
    dummies = set(dummies)
    if not graph.nodes and not graph.edges:
        return f"digraph {name} {{ }}\n"
    lines = [f"digraph {name} {{"]
    for x in sorted(graph.nodes, key=shortlex):
        shape, color = (
            _DUMMY_STYLE if x in dummies else _style_for(graph.nodes[x], style_table)
        )
        attrs = [f"label={_quote(graph.nodes[x])}"]
        for k, v in sorted(graph.props_of(x).items()):
            attrs.append(f"{_attr_name(k)}={_quote(v)}")
        attrs.append(f"shape={_quote(shape)}")
        attrs.append("style=filled")
        attrs.append(f"fillcolor={_quote(color)}")
        lines.append(f"  {x} [{', '.join(attrs)}];")
    for e in sorted(graph.edges, key=shortlex):
        src, tgt, lab = graph.edges[e]
        attrs = [f"label={_quote(lab)}"]
        for k, v in sorted(graph.props_of(e).items()):
            attrs.append(f"{_attr_name(k)}={_quote(v)}")
        lines.append(f"  {src} -> {tgt} [{', '.join(attrs)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def emit_dot(result) -> str:
    """DOT text for a benchmark result's extracted target graph."""
    if result.benchmark is None:
        raise ValueError(f"result for {result.spec!r} has no benchmark graph")
    bench = result.benchmark
    if bench.empty:
        return "digraph g { }\n// empty\n"
    return graph_to_dot(bench.graph, bench.dummy_nodes, name="g")


_PAGE_STYLE = """
body { font-family: sans-serif; margin: 2em; }
section { border-top: 1px solid #ccc; padding: 0.5em 0; }
pre { background: #f6f6f6; padding: 0.6em; overflow-x: auto; }
.status-ok { color: #06662c; }
.status-empty { color: #8a6d00; }
.status-error { color: #a11; }
"""


def emit_html(results) -> str:
    """One static page summarizing a batch of benchmark results.

    Per-spec sections (sorted by name) show the status, element
    counts, stage timings, and the DOT text of the generalized
    background, generalized foreground, and benchmark graphs.  No
    external assets.
    """
    parts = [
        "<!DOCTYPE html>",
        '<html><head><meta charset="utf-8"><title>provbench results</title>',
        f"<style>{_PAGE_STYLE}</style></head><body>",
        "<h1>provbench results</h1>",
        f"<p>{len(results)} benchmarks</p>",
    ]
    for result in sorted(results, key=lambda r: r.spec):
        parts.append(f'<section id="{html.escape(result.spec, quote=True)}">')
        parts.append(
            f"<h2>{html.escape(result.spec)} "
            f'<span class="status-{html.escape(result.status)}">'
            f"[{html.escape(result.status)}]</span></h2>"
        )
        if result.status == "error":
            parts.append(f"<p>{html.escape(result.reason)}</p>")
        else:
            bench = result.benchmark
            parts.append(
                "<p>benchmark: "
                f"{bench.graph.node_count} nodes "
                f"({len(bench.dummy_nodes)} dummy), "
                f"{bench.graph.edge_count} edges; "
                f"foreground {result.foreground.graph.node_count} nodes / "
                f"{result.foreground.graph.edge_count} edges; "
                f"background {result.background.graph.node_count} nodes / "
                f"{result.background.graph.edge_count} edges</p>"
            )
            t = result.durations
            parts.append(
                f"<p>timings (s): record {t[0]:.3f}, transform {t[1]:.3f}, "
                f"generalize {t[2]:.3f}, compare {t[3]:.3f}</p>"
            )
            parts.append("<h3>generalized background</h3>")
            parts.append(f"<pre>{html.escape(graph_to_dot(result.background.graph))}</pre>")
            parts.append("<h3>generalized foreground</h3>")
            parts.append(f"<pre>{html.escape(graph_to_dot(result.foreground.graph))}</pre>")
            parts.append("<h3>benchmark graph</h3>")
            parts.append(f"<pre>{html.escape(emit_dot(result))}</pre>")
        parts.append("</section>")
    parts.append("</body></html>")
    return "\n".join(parts) + "\n"
