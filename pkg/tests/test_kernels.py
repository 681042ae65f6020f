"""Parity between the pure Python kernel and its compiled twin."""

import random

import pytest

from provbench.matching import _pysearch
from provbench.matching.encode import encode_problem

from _gen import random_pair

try:
    from provbench.matching import _speedups
except ImportError:
    _speedups = None

needs_speedups = pytest.mark.skipif(_speedups is None, reason="compiled kernel not built")

MODE_COST, MODE_LEX, MODE_COUNT = 0, 1, 2
ST_OK = 0


@needs_speedups
@pytest.mark.parametrize("exact", [False, True])
def test_kernels_agree_on_random_instances(exact):
    rng = random.Random(2024 + exact)
    for i in range(150):
        pattern, host = random_pair(rng, max_nodes=6, max_edges=7)
        inst = encode_problem(pattern, host, exact)
        a = _pysearch.run(inst, MODE_COST, 10**7, -1)
        b = _speedups.run(inst, MODE_COST, 10**7, -1)
        assert a == b, f"cost pass diverged on instance {i}"
        if a[0] != ST_OK:
            continue
        cost = a[1]
        a = _pysearch.run(inst, MODE_LEX, 10**7, cost)
        b = _speedups.run(inst, MODE_LEX, 10**7, cost)
        assert a == b, f"reconstruction pass diverged on instance {i}"
        a = _pysearch.run(inst, MODE_COUNT, 10**7, cost)
        b = _speedups.run(inst, MODE_COUNT, 10**7, cost)
        assert a == b, f"count pass diverged on instance {i}"


@needs_speedups
def test_kernels_agree_on_budget_behavior():
    rng = random.Random(77)
    pattern, host = random_pair(rng, max_nodes=6, max_edges=6)
    while pattern.node_count < 3:
        pattern, host = random_pair(rng, max_nodes=6, max_edges=6)
    inst = encode_problem(pattern, host, False)
    for budget in (1, 2, 5):
        a = _pysearch.run(inst, MODE_COST, budget, -1)
        b = _speedups.run(inst, MODE_COST, budget, -1)
        assert a == b


@needs_speedups
def test_kernels_agree_on_empty_pattern():
    from provbench.graph import PropertyGraph

    rng = random.Random(3)
    _, host = random_pair(rng)
    inst = encode_problem(PropertyGraph(), host, False)
    for mode in (MODE_COST, MODE_LEX, MODE_COUNT):
        assert _pysearch.run(inst, mode, 100, 0) == _speedups.run(inst, mode, 100, 0)


@needs_speedups
def test_kernels_agree_on_larger_structured_instances():
    import pathlib
    import sys

    sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "benchmarks"))
    try:
        from bench_matcher import _chain_pair, _embed_pair, _scale_pair
    finally:
        sys.path.pop(0)

    instances = [
        encode_problem(*_chain_pair(30, 1), exact=True),
        encode_problem(*_embed_pair(10, 15, 2), exact=False),
        encode_problem(*_scale_pair(8, 3), exact=False),
    ]
    for inst in instances:
        a = _pysearch.run(inst, MODE_COST, 10**8, -1)
        b = _speedups.run(inst, MODE_COST, 10**8, -1)
        assert a == b
        assert a[0] == ST_OK
        cost = a[1]
        a = _pysearch.run(inst, MODE_LEX, 10**8, cost)
        b = _speedups.run(inst, MODE_LEX, 10**8, cost)
        assert a == b
