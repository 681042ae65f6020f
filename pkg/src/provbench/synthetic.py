"""Deterministic synthetic recorder.

Stands in for live capture tools: each template declares a background
shape (process startup plus any prerequisite calls), a target delta
(the structure the recorder should emit for the target activity, with
anchor nodes naming where it attaches to the background), and the
property keys that behave transiently.  A trial renders the background
or foreground graph with fresh seeded values for every transient key,
so repeated trials are similar but not identical, exactly what the
generalization stage expects to clean up.

The shapes are illustrative; they do not claim to replicate any real
tool's output.  The expected benchmark result of every template is
available as ground truth for end-to-end checks.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass
from pathlib import Path

from .compare import BenchmarkGraph
from .errors import ParseError, RecorderFailureError
from .graph import PropertyGraph, emit_datalog
from .ingest import to_generic_json
from .render import graph_to_dot

__all__ = [
    "GraphSketch",
    "SyntheticTemplate",
    "TEMPLATES",
    "trial_seed",
    "render_trial",
    "template_to_json",
    "template_from_json",
    "load_template_dir",
]

#: Formats the synthetic recorder can emit losslessly.
SYNTHETIC_FORMATS = ("datalog", "dot", "generic-json")


@dataclass(frozen=True)
class GraphSketch:
    """Static graph fragment: nodes, edges, properties."""

    nodes: tuple[tuple[str, str], ...] = ()
    edges: tuple[tuple[str, str, str, str], ...] = ()
    props: tuple[tuple[str, str, str], ...] = ()

    def node_ids(self) -> set[str]:
        return {x for x, _lab in self.nodes}

    @property
    def is_empty(self) -> bool:
        return not self.nodes and not self.edges


@dataclass(frozen=True)
class SyntheticTemplate:
    """Background shape plus target delta with anchors.

    Anchors are the background nodes referenced by delta edges; they
    are exactly the nodes expected to survive subtraction as dummies.
    """

    name: str
    background: GraphSketch
    delta: GraphSketch = GraphSketch()
    anchors: tuple[str, ...] = ()
    transient_keys: tuple[str, ...] = ("timestamp", "boot_id")

    def __post_init__(self):
        bg_ids = self.background.node_ids()
        delta_ids = self.delta.node_ids()
        if bg_ids & delta_ids:
            raise ValueError(f"{self.name}: delta reuses background ids")
        if not set(self.anchors) <= bg_ids:
            raise ValueError(f"{self.name}: anchors must exist in the background")
        referenced = set()
        for (_e, s, t, _lab) in self.delta.edges:
            for x in (s, t):
                if x in bg_ids:
                    referenced.add(x)
                elif x not in delta_ids:
                    raise ValueError(f"{self.name}: delta edge references unknown {x!r}")
        if referenced != set(self.anchors):
            raise ValueError(
                f"{self.name}: declared anchors {sorted(self.anchors)} do not "
                f"match referenced background nodes {sorted(referenced)}"
            )

    # -- graph builders --------------------------------------------------

    def background_graph(self) -> PropertyGraph:
        return _materialize([self.background])

    def foreground_graph(self) -> PropertyGraph:
        return _materialize([self.background, self.delta])

    def role_graph(self, role: str) -> PropertyGraph:
        if role == "fg":
            return self.foreground_graph()
        if role == "bg":
            return self.background_graph()
        raise ValueError(f"unknown role {role!r}")

    def expected_benchmark(self) -> BenchmarkGraph:
        """Ground truth: the delta with anchors as property-less dummies."""
        bg_labels = dict(self.background.nodes)
        nodes = {x: lab for x, lab in self.delta.nodes}
        for a in self.anchors:
            nodes[a] = bg_labels[a]
        edges = {e: (s, t, lab) for (e, s, t, lab) in self.delta.edges}
        props = {(x, k): v for (x, k, v) in self.delta.props}
        graph = PropertyGraph(nodes, edges, props)
        return BenchmarkGraph(
            graph=graph,
            dummy_nodes=frozenset(self.anchors),
            empty=self.delta.is_empty,
        )


def _materialize(sketches) -> PropertyGraph:
    nodes: dict[str, str] = {}
    edges: dict[str, tuple[str, str, str]] = {}
    props: dict[tuple[str, str], str] = {}
    for sk in sketches:
        nodes.update(dict(sk.nodes))
        for (e, s, t, lab) in sk.edges:
            edges[e] = (s, t, lab)
        for (x, k, v) in sk.props:
            props[(x, k)] = v
    return PropertyGraph(nodes, edges, props)


# ---------------------------------------------------------------------------
# Trial rendering
# ---------------------------------------------------------------------------


def trial_seed(base_seed: int, spec_name: str, role: str, index: int) -> int:
    """Stable per-trial seed, independent of process hash randomization."""
    digest = hashlib.sha256(
        f"{base_seed}:{spec_name}:{role}:{index}".encode()
    ).digest()
    return int.from_bytes(digest[:8], "big")


def trial_graph(template: SyntheticTemplate, role: str, seed: int) -> PropertyGraph:
    """One trial: the role's graph plus seeded transient property values."""
    g = template.role_graph(role)
    rng = random.Random(seed)
    props = dict(g.props)
    for x in sorted(g.nodes) + sorted(g.edges):
        for k in template.transient_keys:
            props[(x, k)] = str(rng.randrange(10**9))
    return PropertyGraph(dict(g.nodes), dict(g.edges), props, g.gid)


def render_trial(
    template: SyntheticTemplate, role: str, seed: int, fmt: str = "datalog"
) -> str:
    """Serialize one trial in a lossless recorder output format."""
    g = trial_graph(template, role, seed)
    if fmt == "datalog":
        return emit_datalog(g, "g")
    if fmt == "dot":
        return graph_to_dot(g)
    if fmt == "generic-json":
        return to_generic_json(g)
    raise RecorderFailureError(
        f"synthetic recorder cannot emit {fmt!r} (lossless formats: "
        f"{', '.join(SYNTHETIC_FORMATS)})"
    )


# ---------------------------------------------------------------------------
# Template library
# ---------------------------------------------------------------------------


def _startup(*extra_nodes, extra_edges=(), extra_props=()):
    """Process startup boilerplate every benchmark program shares."""
    nodes = (
        ("proc", "Process"),
        ("ld", "File"),
        ("libc", "File"),
    ) + tuple(extra_nodes)
    edges = (
        ("b1", "proc", "ld", "Loaded"),
        ("b2", "proc", "libc", "Loaded"),
    ) + tuple(extra_edges)
    props = (
        ("proc", "Name", "bench"),
        ("proc", "uid", "1000"),
        ("ld", "Name", "ld.so"),
        ("libc", "Name", "libc.so"),
    ) + tuple(extra_props)
    return GraphSketch(nodes, edges, props)


def _opened_file_startup():
    return _startup(
        ("f1", "File"),
        extra_edges=(("b3", "proc", "f1", "Used"),),
        extra_props=(("f1", "Name", "test.txt"), ("b3", "operation", "open")),
    )


def _build_templates() -> dict[str, SyntheticTemplate]:
    t: list[SyntheticTemplate] = []

    t.append(SyntheticTemplate(
        name="creat",
        background=_startup(),
        delta=GraphSketch(
            nodes=(("f1", "File"),),
            edges=(("d1", "proc", "f1", "Created"),),
            props=(("f1", "Name", "test.txt"), ("d1", "mode", "0644")),
        ),
        anchors=("proc",),
    ))
    t.append(SyntheticTemplate(
        name="open",
        background=_startup(),
        delta=GraphSketch(
            nodes=(("f1", "File"),),
            edges=(("d1", "proc", "f1", "Used"),),
            props=(("f1", "Name", "test.txt"), ("d1", "flags", "O_RDWR")),
        ),
        anchors=("proc",),
    ))
    t.append(SyntheticTemplate(
        name="close",
        background=_opened_file_startup(),
        delta=GraphSketch(
            edges=(("d1", "proc", "f1", "Closed"),),
            props=(("d1", "operation", "close"),),
        ),
        anchors=("proc", "f1"),
    ))
    t.append(SyntheticTemplate(
        name="read",
        background=_opened_file_startup(),
        delta=GraphSketch(
            edges=(("d1", "f1", "proc", "WasReadBy"),),
            props=(("d1", "bytes", "128"),),
        ),
        anchors=("proc", "f1"),
    ))
    t.append(SyntheticTemplate(
        name="write",
        background=_opened_file_startup(),
        delta=GraphSketch(
            nodes=(("f2", "File"),),
            edges=(
                ("d1", "f2", "proc", "WasGeneratedBy"),
                ("d2", "f2", "f1", "WasDerivedFrom"),
            ),
            props=(("f2", "Name", "test.txt"), ("f2", "version", "1")),
        ),
        anchors=("proc", "f1"),
    ))
    t.append(SyntheticTemplate(
        name="rename",
        background=_opened_file_startup(),
        delta=GraphSketch(
            nodes=(("f2", "File"),),
            edges=(
                ("d1", "f2", "f1", "WasDerivedFrom"),
                ("d2", "f2", "proc", "WasGeneratedBy"),
                ("d3", "proc", "f1", "Used"),
            ),
            props=(("f2", "Name", "renamed.txt"), ("d3", "operation", "rename")),
        ),
        anchors=("proc", "f1"),
    ))
    t.append(SyntheticTemplate(
        name="unlink",
        background=_opened_file_startup(),
        delta=GraphSketch(
            edges=(("d1", "proc", "f1", "Deleted"),),
            props=(("d1", "operation", "unlink"),),
        ),
        anchors=("proc", "f1"),
    ))
    t.append(SyntheticTemplate(
        name="dup",
        background=_opened_file_startup(),
        delta=GraphSketch(
            nodes=(("act", "Activity"), ("fd2", "Artifact")),
            edges=(
                ("d1", "act", "proc", "WasInformedBy"),
                ("d2", "act", "fd2", "Generated"),
            ),
            props=(("act", "Name", "dup"), ("fd2", "subtype", "fd")),
        ),
        anchors=("proc",),
    ))
    t.append(SyntheticTemplate(
        name="fork",
        background=_startup(),
        delta=GraphSketch(
            nodes=(("child", "Process"),),
            edges=(("d1", "child", "proc", "WasTriggeredBy"),),
            props=(("child", "Name", "bench"),),
        ),
        anchors=("proc",),
    ))
    t.append(SyntheticTemplate(
        name="execve",
        background=_startup(),
        delta=GraphSketch(
            nodes=(("newprog", "Process"), ("exe", "File")),
            edges=(
                ("d1", "newprog", "proc", "WasTriggeredBy"),
                ("d2", "newprog", "exe", "Used"),
            ),
            props=(("newprog", "Name", "target"), ("exe", "Name", "target.bin")),
        ),
        anchors=("proc",),
    ))
    # A process always exits; the implicit call adds nothing beyond the
    # background, so the expected benchmark is empty.
    t.append(SyntheticTemplate(
        name="exit",
        background=_startup(),
        delta=GraphSketch(),
        anchors=(),
    ))
    t.append(SyntheticTemplate(
        name="chmod",
        background=_opened_file_startup(),
        delta=GraphSketch(
            edges=(("d1", "proc", "f1", "ModifiedPermissions"),),
            props=(("d1", "mode", "0600"),),
        ),
        anchors=("proc", "f1"),
    ))
    t.append(SyntheticTemplate(
        name="setuid",
        background=_startup(),
        delta=GraphSketch(
            nodes=(("proc2", "Process"),),
            edges=(("d1", "proc2", "proc", "WasTriggeredBy"),),
            props=(("proc2", "Name", "bench"), ("proc2", "uid", "0")),
        ),
        anchors=("proc",),
    ))
    t.append(SyntheticTemplate(
        name="pipe",
        background=_startup(),
        delta=GraphSketch(
            nodes=(("pip", "Artifact"),),
            edges=(
                ("d1", "pip", "proc", "WasGeneratedBy"),
                ("d2", "proc", "pip", "Used"),
            ),
            props=(("pip", "subtype", "pipe"),),
        ),
        anchors=("proc",),
    ))

    for k in range(1, 9):
        t.append(_scale_template(k))

    return {tpl.name: tpl for tpl in t}


def _scale_template(k: int) -> SyntheticTemplate:
    """Repeat a create+unlink unit k times.

    Each unit is self-contained (its own activity and file node), so
    the benchmark graph scales by exactly the unit's node and edge
    counts and needs no dummy anchors.
    """
    nodes = []
    edges = []
    props = []
    for i in range(1, k + 1):
        act, fil = f"act{i}", f"file{i}"
        nodes += [(act, "Activity"), (fil, "File")]
        edges += [
            (f"dc{i}", act, fil, "Created"),
            (f"du{i}", act, fil, "Unlinked"),
        ]
        props += [(act, "Name", "creat+unlink"), (fil, "Name", f"tmp{i}.txt")]
    return SyntheticTemplate(
        name=f"scale{k}",
        background=_startup(),
        delta=GraphSketch(tuple(nodes), tuple(edges), tuple(props)),
        anchors=(),
    )


TEMPLATES: dict[str, SyntheticTemplate] = _build_templates()


# ---------------------------------------------------------------------------
# JSON template files
# ---------------------------------------------------------------------------


def _sketch_to_json(sk: GraphSketch) -> dict:
    return {
        "nodes": [list(n) for n in sk.nodes],
        "edges": [list(e) for e in sk.edges],
        "props": [list(p) for p in sk.props],
    }


def _sketch_from_json(doc) -> GraphSketch:
    try:
        return GraphSketch(
            nodes=tuple((str(a), str(b)) for a, b in doc.get("nodes", [])),
            edges=tuple((str(a), str(b), str(c), str(d)) for a, b, c, d in doc.get("edges", [])),
            props=tuple((str(a), str(b), str(c)) for a, b, c in doc.get("props", [])),
        )
    except (TypeError, ValueError) as exc:
        raise ParseError(f"malformed template sketch: {exc}") from None


def template_to_json(template: SyntheticTemplate) -> str:
    doc = {
        "name": template.name,
        "background": _sketch_to_json(template.background),
        "delta": _sketch_to_json(template.delta),
        "anchors": list(template.anchors),
        "transient_keys": list(template.transient_keys),
    }
    return json.dumps(doc, indent=2) + "\n"


def template_from_json(text: str) -> SyntheticTemplate:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid template JSON: {exc}") from None
    if not isinstance(doc, dict) or "name" not in doc:
        raise ParseError("template document needs a 'name'")
    try:
        return SyntheticTemplate(
            name=str(doc["name"]),
            background=_sketch_from_json(doc.get("background", {})),
            delta=_sketch_from_json(doc.get("delta", {})),
            anchors=tuple(str(a) for a in doc.get("anchors", [])),
            transient_keys=tuple(str(k) for k in doc.get("transient_keys", ["timestamp", "boot_id"])),
        )
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def load_template_dir(path: str | Path) -> dict[str, SyntheticTemplate]:
    """Read ``*.json`` template files; later files win on name clashes."""
    out: dict[str, SyntheticTemplate] = {}
    for file in sorted(Path(path).glob("*.json")):
        tpl = template_from_json(file.read_text(encoding="utf-8"))
        out[tpl.name] = tpl
    return out
