"""Command-line interface.

Subcommands:

* ``run``      execute benchmarks and write result files,
* ``regress``  run benchmarks and compare against stored baselines,
* ``solve``    direct access to the graph matcher.

Exit codes for ``run``: 0 when every benchmark is ok or empty, 2 when
any errored, 3 on usage errors.  ``regress`` additionally exits 1 when
any benchmark changed against its baseline.  ``solve`` exits 0 when a
matching exists and 1 when it does not.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path

from .errors import ProvBenchError
from .ingest import FORMATS, FormatProfile, load_path
from .matching import DEFAULT_BUDGET, best_subgraph_matching, check_similar
from .pipeline import (
    BUILTIN_PROFILES,
    DEFAULT_TIME_LOG,
    append_timing,
    load_profiles,
    make_spec,
    regression_check,
    run_benchmark,
    write_html_index,
    write_result_files,
)
from .synthetic import TEMPLATES, load_template_dir

__all__ = ["main"]

log = logging.getLogger("provbench.cli")


class _Parser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit code 3."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(3, f"{self.prog}: error: {message}\n")


class _UsageError(Exception):
    pass


def _build_parser() -> _Parser:
    parser = _Parser(prog="provbench", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run benchmarks and write results")
    _add_run_arguments(run)

    regress = sub.add_parser("regress", help="run benchmarks against baselines")
    _add_run_arguments(regress)
    regress.add_argument("--baseline", required=True, help="baseline directory")
    regress.add_argument(
        "--update", action="store_true", help="persist changed or new baselines"
    )

    solve = sub.add_parser("solve", help="match one graph against another")
    solve.add_argument("--pattern", required=True, help="pattern graph file")
    solve.add_argument("--host", required=True, help="host graph file")
    solve.add_argument(
        "--mode", choices=("subgraph", "similar"), default="subgraph"
    )
    solve.add_argument("--format", choices=FORMATS, help="force the input format")
    solve.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    solve.add_argument("--verbose", action="store_true")
    return parser


def _add_run_arguments(p: argparse.ArgumentParser):
    p.add_argument("--profile", default="synthetic", help="recorder profile name")
    p.add_argument("--config", help="INI file with recorder profiles")
    p.add_argument("--spec", default="all", help="benchmark name or 'all'")
    p.add_argument("--trials", type=int, help="override the profile's trial count")
    p.add_argument("--result-type", choices=("rb", "rg", "rh"), default="rb")
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--seed", type=int, default=0, help="base seed for synthetic trials")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument(
        "--format",
        choices=FORMATS,
        help="force the input format instead of inferring from extensions",
    )
    p.add_argument("--recordings", help="directory of pre-recorded trials")
    p.add_argument("--templates", help="directory of extra synthetic templates")
    p.add_argument("--time-log", default=DEFAULT_TIME_LOG, help="timing log path")
    p.add_argument("--no-time-log", action="store_true", help="skip the timing log")
    p.add_argument("--verbose", action="store_true")


def _resolve_profile(args):
    if args.config:
        profiles = load_profiles(args.config)
    else:
        profiles = dict(BUILTIN_PROFILES)
        default_ini = Path("provbench.ini")
        if default_ini.exists():
            profiles.update(load_profiles(default_ini))
    profile = profiles.get(args.profile)
    if profile is None:
        raise _UsageError(
            f"unknown profile {args.profile!r} (available: {', '.join(sorted(profiles))})"
        )
    overrides = {}
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.recordings is not None:
        overrides["kind"] = "directory"
        overrides["staging"] = Path(args.recordings)
    if getattr(args, "format", None):
        overrides["format"] = dataclasses.replace(profile.format, tag=args.format)
        overrides["force_format"] = True
    if overrides:
        profile = dataclasses.replace(profile, **overrides)
    return profile


def _resolve_templates(args):
    if not args.templates:
        return None
    merged = dict(TEMPLATES)
    merged.update(load_template_dir(args.templates))
    return merged


def _resolve_spec_names(args, profile, templates) -> list[str]:
    if args.spec != "all":
        return [args.spec]
    if profile.kind == "synthetic":
        registry = templates if templates is not None else TEMPLATES
        return sorted(registry)
    if profile.staging is None:
        raise _UsageError("directory profiles need --recordings or a staging path")
    names = set()
    for path in profile.staging.iterdir():
        parts = path.name.split(".")
        if len(parts) >= 4 and parts[1] in ("fg", "bg"):
            names.add(parts[0])
    if not names:
        raise _UsageError(f"no trial files found in {profile.staging}")
    return sorted(names)


def _describe(result) -> str:
    if result.status == "error":
        return f"{result.spec}: error ({result.reason})"
    if result.status == "empty":
        return f"{result.spec}: empty"
    b = result.benchmark
    return (
        f"{result.spec}: ok ({b.graph.node_count} nodes, "
        f"{len(b.dummy_nodes)} dummy, {b.graph.edge_count} edges)"
    )


def _run_specs(args, out):
    profile = _resolve_profile(args)
    templates = _resolve_templates(args)
    names = _resolve_spec_names(args, profile, templates)
    results = []
    for name in names:
        try:
            spec = make_spec(name)
        except ValueError as exc:
            raise _UsageError(str(exc))
        result = run_benchmark(
            profile,
            spec,
            seed=args.seed,
            budget=args.budget,
            templates=templates,
        )
        results.append(result)
        if not args.no_time_log:
            try:
                append_timing(args.time_log, result)
            except OSError as exc:
                print(f"warning: cannot append timing log: {exc}", file=sys.stderr)
        print(_describe(result), file=out)
    return profile, results


def _cmd_run(args, out) -> int:
    _profile, results = _run_specs(args, out)
    for result in results:
        write_result_files(result, args.out, args.result_type)
    if args.result_type == "rh":
        write_html_index(results, args.out)
    return 2 if any(r.status == "error" for r in results) else 0


def _cmd_regress(args, out) -> int:
    _profile, results = _run_specs(args, out)
    any_changed = False
    for result in results:
        if result.status == "error":
            continue
        verdict = regression_check(
            args.baseline, result, update=args.update, budget=args.budget
        )
        line = f"{result.spec}: {verdict.kind}"
        if verdict.kind == "changed":
            any_changed = True
            line += (
                f" ({verdict.summary}; nodes {verdict.node_delta:+d}, "
                f"edges {verdict.edge_delta:+d}, properties {verdict.property_delta})"
            )
        print(line, file=out)
    if any(r.status == "error" for r in results):
        return 2
    return 1 if any_changed else 0


def _cmd_solve(args, out) -> int:
    profile = FormatProfile(tag=args.format) if args.format else None
    pattern = load_path(args.pattern, profile)
    host = load_path(args.host, profile)
    if args.mode == "similar":
        matching = check_similar(pattern, host, budget=args.budget)
    else:
        matching = best_subgraph_matching(pattern, host, budget=args.budget)
    if matching is None:
        print("no matching", file=out)
        return 1
    print(f"cost {matching.cost}", file=out)
    for x in sorted(matching.node_map):
        print(f"n {x} -> {matching.node_map[x]}", file=out)
    for e in sorted(matching.edge_map):
        print(f"e {e} -> {matching.edge_map[e]}", file=out)
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if getattr(args, "verbose", False):
        logging.basicConfig(level=logging.DEBUG)
    out = sys.stdout
    try:
        if args.command == "run":
            return _cmd_run(args, out)
        if args.command == "regress":
            return _cmd_regress(args, out)
        return _cmd_solve(args, out)
    except _UsageError as exc:
        print(f"provbench: error: {exc}", file=sys.stderr)
        return 3
    except FileNotFoundError as exc:
        print(f"provbench: error: {exc}", file=sys.stderr)
        return 3
    except ProvBenchError as exc:
        print(f"provbench: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
