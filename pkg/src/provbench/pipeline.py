"""End-to-end benchmark orchestration.

One benchmark run records foreground and background trials (from the
synthetic recorder or a directory of pre-recorded files), transforms
them into property graphs, generalizes each side, and subtracts the
background from the foreground.  Stage failures are captured as an
error status naming the failing stage; later stages never run on
poisoned data.  Every run stamps four stage durations and can append a
one-line timing record to a log file.
"""

from __future__ import annotations

import configparser
import dataclasses
import time
from dataclasses import dataclass
from pathlib import Path

from .compare import BenchmarkGraph, read_benchmark_dl, subtract, write_benchmark_dl
from .errors import (
    CorruptBaselineError,
    MissingTrialFilesError,
    ProvBenchError,
    RecorderFailureError,
)
from .generalize import GeneralizedGraph, generalize_trials
from .graph import PropertyGraph, canonicalize, emit_datalog
from .ingest import FormatProfile, detect_format, load_document
from .matching import DEFAULT_BUDGET, check_similar
from .render import emit_dot, emit_html
from .synthetic import TEMPLATES, render_trial, trial_seed

__all__ = [
    "RecorderProfile",
    "BenchmarkSpec",
    "BenchmarkResult",
    "RawDocument",
    "RegressionVerdict",
    "BUILTIN_PROFILES",
    "make_spec",
    "record_trials",
    "run_benchmark",
    "regression_check",
    "append_timing",
    "load_profiles",
    "write_result_files",
    "write_html_index",
    "DEFAULT_TIME_LOG",
]

DEFAULT_TIME_LOG = "provbench-time.log"

_KNOWN_EXTENSIONS = (".dl", ".dot", ".gj.json", ".json")


@dataclass(frozen=True)
class RecorderProfile:
    """One recorder configuration.

    ``kind`` selects the synthetic recorder or a directory of
    pre-recorded trial files; ``staging`` is that directory.  At least
    two trials are required because generalization consumes a pair.
    ``filter_graphs`` drops unusable documents (unparseable or empty)
    at recording time.
    """

    name: str
    kind: str = "synthetic"
    format: FormatProfile = FormatProfile()
    trials: int = 2
    filter_graphs: bool = False
    staging: Path | None = None
    force_format: bool = False  # ignore file extensions, trust the profile

    def __post_init__(self):
        if self.kind not in ("synthetic", "directory"):
            raise ValueError(f"unknown recorder kind {self.kind!r}")
        if self.trials < 2:
            raise ValueError("generalization needs at least 2 trials")
        if self.staging is not None:
            object.__setattr__(self, "staging", Path(self.staging))


@dataclass(frozen=True)
class BenchmarkSpec:
    """Names one benchmark and its foreground/background sources."""

    name: str
    foreground: str
    background: str
    notes: str = ""

    def __post_init__(self):
        if self.foreground == self.background:
            raise ValueError("foreground and background must be distinct sources")


def make_spec(name: str) -> BenchmarkSpec:
    return BenchmarkSpec(name=name, foreground=f"{name}/fg", background=f"{name}/bg")


@dataclass(frozen=True)
class RawDocument:
    """One recorded trial document, still in its recorder format."""

    text: str
    format: str
    source: str


@dataclass(frozen=True)
class BenchmarkResult:
    """Outcome of one benchmark run.

    ``durations`` holds the four stage times (recording,
    transformation, generalization, comparison) in seconds.  ``status``
    is ok, empty, or error; empty exactly when the benchmark graph has
    no elements.
    """

    spec: str
    recorder: str
    foreground: GeneralizedGraph | None
    background: GeneralizedGraph | None
    benchmark: BenchmarkGraph | None
    durations: tuple[float, float, float, float]
    status: str
    reason: str = ""

    def __post_init__(self):
        if self.status not in ("ok", "empty", "error"):
            raise ValueError(f"unknown status {self.status!r}")
        if any(d < 0 for d in self.durations):
            raise ValueError("durations must be nonnegative")
        if self.status == "error":
            if not self.reason:
                raise ValueError("error results need a reason")
        else:
            if self.benchmark is None:
                raise ValueError("non-error results need a benchmark graph")
            if self.status == "empty" and not self.benchmark.empty:
                raise ValueError("status=empty requires an empty benchmark graph")
            if self.status == "ok" and self.benchmark.empty:
                raise ValueError("empty benchmark graph requires status=empty")


# ---------------------------------------------------------------------------
# Recording
# ---------------------------------------------------------------------------


def record_trials(
    profile: RecorderProfile,
    spec: BenchmarkSpec,
    role: str,
    seed: int = 0,
    templates=None,
) -> list[RawDocument]:
    """Produce exactly ``profile.trials`` raw trial documents.

    The synthetic recorder renders the benchmark's template with a
    per-trial seed; the directory recorder reads files named
    ``<spec>.<role>.<i>.<ext>`` from the staging directory.  With
    ``filter_graphs`` set, unusable documents are replaced (synthetic)
    or rejected loudly (directory).
    """
    if role not in ("fg", "bg"):
        raise ValueError(f"unknown role {role!r}")
    if profile.kind == "synthetic":
        return _record_synthetic(profile, spec, role, seed, templates)
    return _record_directory(profile, spec, role)


def _usable(doc: RawDocument, profile: RecorderProfile) -> bool:
    try:
        graph = load_document(doc.text, _doc_profile(profile, doc.format))
    except ProvBenchError:
        return False
    return graph.node_count > 0


def _record_synthetic(profile, spec, role, seed, templates) -> list[RawDocument]:
    registry = TEMPLATES if templates is None else templates
    template = registry.get(spec.name)
    if template is None:
        raise RecorderFailureError(f"no synthetic template named {spec.name!r}")
    fmt = profile.format.tag
    docs: list[RawDocument] = []
    index = 0
    attempts = 0
    while len(docs) < profile.trials:
        index += 1
        attempts += 1
        if attempts > profile.trials * 5:
            raise RecorderFailureError(
                f"synthetic recorder could not produce {profile.trials} usable "
                f"documents for {spec.name!r}"
            )
        text = render_trial(template, role, trial_seed(seed, spec.name, role, index), fmt)
        doc = RawDocument(text=text, format=fmt, source=f"{spec.name}.{role}.{index}")
        if profile.filter_graphs and not _usable(doc, profile):
            continue
        docs.append(doc)
    return docs


def _record_directory(profile, spec, role) -> list[RawDocument]:
    if profile.staging is None:
        raise RecorderFailureError(f"profile {profile.name!r} has no staging directory")
    docs = []
    for i in range(1, profile.trials + 1):
        stem = f"{spec.name}.{role}.{i}"
        found = None
        for ext in _KNOWN_EXTENSIONS:
            candidate = profile.staging / (stem + ext)
            if candidate.exists():
                found = candidate
                break
        if found is None:
            raise MissingTrialFilesError(
                f"missing trial file {stem}.* in {profile.staging}"
            )
        if profile.force_format:
            fmt = profile.format.tag
        else:
            fmt = detect_format(found) or profile.format.tag
        doc = RawDocument(
            text=found.read_text(encoding="utf-8"), format=fmt, source=found.name
        )
        if profile.filter_graphs and not _usable(doc, profile):
            raise RecorderFailureError(f"unusable trial file {found.name}")
        docs.append(doc)
    return docs


def _doc_profile(profile: RecorderProfile, fmt: str) -> FormatProfile:
    if profile.format.tag == fmt:
        return profile.format
    return dataclasses.replace(profile.format, tag=fmt)


# ---------------------------------------------------------------------------
# Running
# ---------------------------------------------------------------------------


def run_benchmark(
    profile: RecorderProfile,
    spec: BenchmarkSpec,
    seed: int = 0,
    budget: int = DEFAULT_BUDGET,
    min_class_size: int = 2,
    templates=None,
) -> BenchmarkResult:
    """Record, transform, generalize, and compare one benchmark.

    Deterministic for the synthetic recorder given a fixed seed.  Any
    stage error is converted into an error result naming the stage;
    malformed recorder output never escapes as an exception.
    """
    durations = [0.0, 0.0, 0.0, 0.0]

    def fail(stage: str, exc: Exception) -> BenchmarkResult:
        return BenchmarkResult(
            spec=spec.name,
            recorder=profile.name,
            foreground=None,
            background=None,
            benchmark=None,
            durations=tuple(durations),
            status="error",
            reason=f"{stage}: {exc}",
        )

    start = time.perf_counter()
    try:
        fg_docs = record_trials(profile, spec, "fg", seed, templates)
        bg_docs = record_trials(profile, spec, "bg", seed, templates)
    except ProvBenchError as exc:
        return fail("recording", exc)
    durations[0] = time.perf_counter() - start

    start = time.perf_counter()
    try:
        fg_graphs = [load_document(d.text, _doc_profile(profile, d.format)) for d in fg_docs]
        bg_graphs = [load_document(d.text, _doc_profile(profile, d.format)) for d in bg_docs]
    except ProvBenchError as exc:
        return fail("transformation", exc)
    durations[1] = time.perf_counter() - start

    start = time.perf_counter()
    try:
        fg_gen = generalize_trials(fg_graphs, min_class_size=min_class_size, budget=budget)
        bg_gen = generalize_trials(bg_graphs, min_class_size=min_class_size, budget=budget)
    except ProvBenchError as exc:
        return fail("generalization", exc)
    durations[2] = time.perf_counter() - start

    start = time.perf_counter()
    try:
        bench = subtract(fg_gen, bg_gen, budget=budget)
    except ProvBenchError as exc:
        return fail("comparison", exc)
    durations[3] = time.perf_counter() - start

    return BenchmarkResult(
        spec=spec.name,
        recorder=profile.name,
        foreground=fg_gen,
        background=bg_gen,
        benchmark=bench,
        durations=tuple(durations),
        status="empty" if bench.empty else "ok",
    )


# ---------------------------------------------------------------------------
# Regression checking
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RegressionVerdict:
    """Comparison of a fresh result against a stored baseline.

    ``node_delta`` and ``edge_delta`` are signed (new minus baseline);
    ``property_delta`` counts mismatched property slots under the best
    matching (for shape changes, the absolute property-count change).
    """

    kind: str  # unchanged | changed | new
    summary: str = ""
    node_delta: int = 0
    edge_delta: int = 0
    property_delta: int = 0


def regression_check(
    baseline_dir: str | Path,
    result: BenchmarkResult,
    update: bool = False,
    budget: int = DEFAULT_BUDGET,
) -> RegressionVerdict:
    """Compare a result's benchmark graph against its stored baseline.

    Unchanged means similar with zero property mismatches (in both
    directions) and matching dummy sets.  With ``update`` set, changed
    or new baselines are (re)written in canonical form.
    """
    if result.benchmark is None:
        raise ValueError(f"result for {result.spec!r} has no benchmark graph")
    baseline_dir = Path(baseline_dir)
    path = baseline_dir / f"{result.spec}.dl"
    new = result.benchmark

    def persist():
        baseline_dir.mkdir(parents=True, exist_ok=True)
        path.write_text(write_benchmark_dl(new, gid="r"), encoding="utf-8")

    if not path.exists():
        if update:
            persist()
        return RegressionVerdict(kind="new", summary=f"no baseline at {path.name}")

    try:
        baseline = read_benchmark_dl(path.read_text(encoding="utf-8"))
    except (ProvBenchError, ValueError, OSError) as exc:
        raise CorruptBaselineError(f"cannot read baseline {path}: {exc}") from None

    old_g, new_g = baseline.graph, new.graph
    node_delta = new_g.node_count - old_g.node_count
    edge_delta = new_g.edge_count - old_g.edge_count
    matching = check_similar(old_g, new_g, budget=budget)
    if matching is None:
        verdict = RegressionVerdict(
            kind="changed",
            summary="shape changed",
            node_delta=node_delta,
            edge_delta=edge_delta,
            property_delta=abs(new_g.prop_count - old_g.prop_count),
        )
    else:
        prop_delta = max(
            matching.cost, matching.cost + new_g.prop_count - old_g.prop_count
        )
        dummies_match = {
            matching.node_map[d] for d in baseline.dummy_nodes
        } == set(new.dummy_nodes)
        if prop_delta == 0 and dummies_match:
            return RegressionVerdict(kind="unchanged")
        bits = []
        if prop_delta:
            bits.append(f"{prop_delta} property slot(s) differ")
        if not dummies_match:
            bits.append("dummy nodes differ")
        verdict = RegressionVerdict(
            kind="changed",
            summary="; ".join(bits),
            node_delta=node_delta,
            edge_delta=edge_delta,
            property_delta=prop_delta,
        )
    if update:
        persist()
    return verdict


# ---------------------------------------------------------------------------
# Timing log
# ---------------------------------------------------------------------------


def append_timing(log_path: str | Path, result: BenchmarkResult) -> None:
    """Append one timing line: recorder,spec,then the four stage times.

    Times are seconds with three decimals.  The single write keeps
    concurrent appends line-atomic on POSIX.  Raises OSError when the
    log is unwritable; callers must not let that fail the run.
    """
    t = result.durations
    line = (
        f"{result.recorder},{result.spec},"
        f"{t[0]:.3f},{t[1]:.3f},{t[2]:.3f},{t[3]:.3f}\n"
    )
    with open(log_path, "a", encoding="utf-8") as fh:
        fh.write(line)


# ---------------------------------------------------------------------------
# Profiles
# ---------------------------------------------------------------------------

_FORMAT_ALIASES = {
    "dot": "dot",
    "graphviz": "dot",
    "prov-json": "prov-json",
    "provjson": "prov-json",
    "generic-json": "generic-json",
    "genericjson": "generic-json",
    "datalog": "datalog",
}


def _builtin_profiles() -> dict[str, RecorderProfile]:
    return {
        "synthetic": RecorderProfile(name="synthetic"),
        "synthetic-dot": RecorderProfile(
            name="synthetic-dot", format=FormatProfile(tag="dot")
        ),
        "synthetic-json": RecorderProfile(
            name="synthetic-json", format=FormatProfile(tag="generic-json")
        ),
    }


BUILTIN_PROFILES = _builtin_profiles()


def load_profiles(path: str | Path) -> dict[str, RecorderProfile]:
    """Read recorder profiles from an INI file.

    Each section is one profile: ``stage1tool`` is ``synthetic`` or
    ``directory <path>``, ``stage2handler`` names the input format,
    ``filtergraphs`` and ``trials`` are optional, as are ``labelattr``
    and ``strict`` for format handling.
    """
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise FileNotFoundError(f"profile file {path} not found")
    profiles: dict[str, RecorderProfile] = {}
    for section in parser.sections():
        cfg = parser[section]
        stage1 = cfg.get("stage1tool", "synthetic").strip()
        staging = None
        if stage1.startswith("directory"):
            kind = "directory"
            rest = stage1[len("directory"):].strip()
            staging = Path(rest) if rest else None
            if cfg.get("staging"):
                staging = Path(cfg["staging"])
        elif stage1 == "synthetic":
            kind = "synthetic"
        else:
            raise ValueError(f"profile {section!r}: unknown stage1tool {stage1!r}")
        handler = cfg.get("stage2handler", "datalog").strip().lower()
        tag = _FORMAT_ALIASES.get(handler)
        if tag is None:
            raise ValueError(f"profile {section!r}: unknown stage2handler {handler!r}")
        fmt = FormatProfile(
            tag=tag,
            label_attr=cfg.get("labelattr", "label"),
            strict=cfg.getboolean("strict", fallback=False),
        )
        profiles[section] = RecorderProfile(
            name=section,
            kind=kind,
            format=fmt,
            trials=cfg.getint("trials", fallback=2),
            filter_graphs=cfg.getboolean("filtergraphs", fallback=False),
            staging=staging,
        )
    return profiles


# ---------------------------------------------------------------------------
# Output files
# ---------------------------------------------------------------------------


def write_result_files(result: BenchmarkResult, out_dir: str | Path, result_type: str) -> list[Path]:
    """Write one result's files under ``out/<spec>/``.

    Result types gate the outputs: ``rb`` writes the benchmark graph
    (Datalog and DOT), ``rg`` adds the generalized foreground and
    background graphs, ``rh`` additionally feeds the shared HTML index
    (written by the caller across all results).  Error results produce
    no files.  Graphs are canonicalized first, so outputs are
    byte-stable across runs.
    """
    if result_type not in ("rb", "rg", "rh"):
        raise ValueError(f"unknown result type {result_type!r}")
    if result.benchmark is None:
        return []
    spec_dir = Path(out_dir) / result.spec
    spec_dir.mkdir(parents=True, exist_ok=True)
    written = []
    bench_dl = spec_dir / "benchmark.dl"
    bench_dl.write_text(write_benchmark_dl(result.benchmark, gid="r"), encoding="utf-8")
    written.append(bench_dl)
    bench_dot = spec_dir / "benchmark.dot"
    bench_dot.write_text(emit_dot(result), encoding="utf-8")
    written.append(bench_dot)
    if result_type in ("rg", "rh"):
        fg = spec_dir / "fg.dl"
        fg.write_text(
            emit_datalog(canonicalize(result.foreground.graph), "fg"), encoding="utf-8"
        )
        written.append(fg)
        bg = spec_dir / "bg.dl"
        bg.write_text(
            emit_datalog(canonicalize(result.background.graph), "bg"), encoding="utf-8"
        )
        written.append(bg)
    return written


def write_html_index(results, out_dir: str | Path) -> Path:
    """Write the shared HTML page for a batch of results."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "index.html"
    path.write_text(emit_html(results), encoding="utf-8")
    return path
