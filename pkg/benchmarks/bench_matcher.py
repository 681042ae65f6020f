#!/usr/bin/env python3
"""Compare the pure Python search kernel against the compiled one.

Builds three instance families (similarity of permuted trial pairs,
background-into-foreground embedding, and scale-style repeated deltas),
solves each with both kernels, and prints median wall times per solve.

Usage: python benchmarks/bench_matcher.py [--repeat N]
"""

from __future__ import annotations

import argparse
import random
import statistics
import time

from provbench.graph import PropertyGraph
from provbench.matching import _pysearch
from provbench.matching.encode import encode_problem

try:
    from provbench.matching import _speedups
except ImportError:
    _speedups = None

MODE_COST, MODE_LEX = 0, 1
BUDGET = 10**9


def _chain_pair(n: int, seed: int):
    """Two similar chain graphs with branch edges and transient props."""
    rng = random.Random(seed)
    nodes = {f"n{i}": ("Process" if i % 3 == 0 else "File") for i in range(1, n + 1)}
    edges = {}
    for i in range(1, n):
        edges[f"e{i}"] = (f"n{i}", f"n{i + 1}", "Used" if i % 2 else "Loaded")
    for j in range(n // 3):
        a, b = rng.randint(1, n), rng.randint(1, n)
        edges[f"x{j}"] = (f"n{a}", f"n{b}", "Extra")
    props = {}
    for x in list(nodes) + list(edges):
        props[(x, "Name")] = f"static-{x}"
        props[(x, "timestamp")] = str(rng.randrange(10**9))
    g1 = PropertyGraph(nodes, edges, props)
    props2 = {
        k: (v if k[1] != "timestamp" else str(rng.randrange(10**9)))
        for k, v in props.items()
    }
    ids = sorted(nodes) + sorted(edges)
    shuffled = ids[:]
    rng.shuffle(shuffled)
    rename = dict(zip(ids, (f"m{i}" for i in range(len(ids)))))
    g2 = PropertyGraph(
        {rename[x]: lab for x, lab in nodes.items()},
        {rename[e]: (rename[s], rename[t], lab) for e, (s, t, lab) in edges.items()},
        {(rename[x], k): v for (x, k), v in props2.items()},
    )
    return g1, g2


def _embed_pair(n_bg: int, n_extra: int, seed: int):
    """Background tree embedded in an extended foreground."""
    rng = random.Random(seed)
    nodes = {f"n{i}": rng.choice(("Process", "File", "Artifact")) for i in range(1, n_bg + 1)}
    edges = {}
    for i in range(2, n_bg + 1):
        parent = rng.randint(1, i - 1)
        edges[f"e{i}"] = (f"n{parent}", f"n{i}", rng.choice(("Used", "Loaded")))
    props = {(x, "Name"): f"bg-{x}" for x in nodes}
    bg = PropertyGraph(nodes, edges, props)
    fnodes = dict(nodes)
    fedges = dict(edges)
    fprops = dict(props)
    for j in range(n_extra):
        fnodes[f"t{j}"] = rng.choice(("Process", "File", "Artifact"))
        anchor = rng.choice(sorted(fnodes))
        fedges[f"d{j}"] = (anchor, f"t{j}", "Created")
        fprops[(f"t{j}", "Name")] = f"delta-{j}"
    fg = PropertyGraph(fnodes, fedges, fprops)
    return bg, fg


def _scale_pair(k: int, seed: int):
    """Startup background vs foreground with k create+unlink units."""
    rng = random.Random(seed)
    nodes = {"proc": "Process", "ld": "File", "libc": "File"}
    edges = {"b1": ("proc", "ld", "Loaded"), "b2": ("proc", "libc", "Loaded")}
    props = {("proc", "Name"): "bench", ("ld", "Name"): "ld.so", ("libc", "Name"): "libc.so"}
    bg = PropertyGraph(nodes, edges, props)
    fnodes, fedges, fprops = dict(nodes), dict(edges), dict(props)
    for i in range(1, k + 1):
        fnodes[f"act{i}"] = "Activity"
        fnodes[f"file{i}"] = "File"
        fedges[f"dc{i}"] = (f"act{i}", f"file{i}", "Created")
        fedges[f"du{i}"] = (f"act{i}", f"file{i}", "Unlinked")
        fprops[(f"file{i}", "Name")] = f"tmp{i}.txt"
        fprops[(f"act{i}", "timestamp")] = str(rng.randrange(10**9))
    fg = PropertyGraph(fnodes, fedges, fprops)
    return bg, fg


def _instances():
    out = []
    for n in (20, 40, 60):
        out.append((f"similarity chain n={n}", encode_problem(*_chain_pair(n, n), exact=True)))
    for n_bg, extra in ((12, 12), (16, 24)):
        bg, fg = _embed_pair(n_bg, extra, n_bg * 7)
        out.append((f"embedding bg={n_bg} fg={n_bg + extra}", encode_problem(bg, fg, exact=False)))
    for k in (8, 16):
        bg, fg = _scale_pair(k, k)
        out.append((f"scale chain k={k}", encode_problem(bg, fg, exact=False)))
    return out


def _solve(kernel, inst) -> float:
    start = time.perf_counter()
    status, cost, _, _, _ = kernel.run(inst, MODE_COST, BUDGET, -1)
    assert status == 0, "benchmark instances must be solvable"
    status, _, _, _, _ = kernel.run(inst, MODE_LEX, BUDGET, cost)
    assert status == 0
    return time.perf_counter() - start


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5, help="timed repetitions")
    args = parser.parse_args()

    kernels = [("pure", _pysearch)]
    if _speedups is not None:
        kernels.append(("compiled", _speedups))
    else:
        print("note: compiled kernel not built; showing pure timings only\n")

    width = max(len(name) for name, _ in _instances()) + 2
    header = f"{'instance':<{width}}" + "".join(f"{name:>12}" for name, _ in kernels)
    if len(kernels) == 2:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for name, inst in _instances():
        medians = []
        for _kname, kernel in kernels:
            times = [_solve(kernel, inst) for _ in range(args.repeat)]
            medians.append(statistics.median(times))
        row = f"{name:<{width}}" + "".join(f"{m * 1000:>10.2f}ms" for m in medians)
        if len(medians) == 2 and medians[1] > 0:
            row += f"{medians[0] / medians[1]:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
