"""Acceptance criteria.

Each test prints one PASS/FAIL line (run pytest with -s to see them all
on success).  Tolerances are exact unless a runtime bound is stated.
"""

import random
import re
import subprocess
import sys
import time
from contextlib import contextmanager

from provbench.compare import subtract
from provbench.generalize import GeneralizedGraph, generalize_pair
from provbench.graph import PropertyGraph, canonicalize, emit_datalog, parse_datalog
from provbench.matching import (
    KERNEL_NAME,
    MODE_EXACT,
    MODE_SUBGRAPH,
    MatchProblem,
    Matching,
    best_subgraph_matching,
    brute_force_matching,
    check_similar,
)
from provbench.pipeline import (
    BUILTIN_PROFILES,
    append_timing,
    make_spec,
    regression_check,
    run_benchmark,
)
from provbench.synthetic import TEMPLATES

from _gen import random_graph, random_pair


@contextmanager
def criterion(num, name):
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {num} {name}: FAIL [{KERNEL_NAME} kernel]")
        raise
    print(f"ACCEPTANCE {num} {name}: PASS [{KERNEL_NAME} kernel]")


L2_G1 = parse_datalog('ng1(n1,"File"). pg1(n1,"Userid","1"). pg1(n1,"Name","text").')
L2_G2 = parse_datalog(
    'ng2(n1,"File"). ng2(n2,"Process"). pg2(n1,"Userid","1"). '
    'eg2(e1,n1,n2,"Used"). pg2(n1,"Name","text").'
)


def test_criterion_1_oracle_equivalence():
    with criterion(1, "oracle equivalence"):
        start = time.perf_counter()
        rng = random.Random(20190620)
        for i in range(200):
            pattern, host = random_pair(rng, max_nodes=6, max_edges=8)
            oracle = brute_force_matching(MatchProblem(pattern, host, MODE_SUBGRAPH))
            engine = best_subgraph_matching(pattern, host)
            assert (oracle is None) == (engine is None), f"pair {i} embeddability"
            if oracle is not None:
                assert oracle.cost == engine.cost, f"pair {i} cost"
            oracle = brute_force_matching(MatchProblem(pattern, host, MODE_EXACT))
            engine = check_similar(pattern, host)
            assert (oracle is None) == (engine is None), f"pair {i} similarity"
            if oracle is not None:
                assert oracle.cost == engine.cost, f"pair {i} similarity cost"
        assert time.perf_counter() - start < 60.0


def test_criterion_2_sample_pair_subtraction():
    with criterion(2, "sample-pair subtraction"):
        out = subtract(GeneralizedGraph(L2_G2), GeneralizedGraph(L2_G1))
        assert out.residual_mismatches == 0
        assert not out.empty
        assert set(out.graph.nodes.values()) == {"Process", "File"}
        assert out.graph.edge_count == 1
        (edge,) = out.graph.edges.values()
        assert edge[2] == "Used"
        assert len(out.dummy_nodes) == 1
        (dummy,) = out.dummy_nodes
        assert out.graph.nodes[dummy] == "File"
        assert out.graph.props_of(dummy) == {}


def test_criterion_3_generalization_soundness():
    with criterion(3, "generalization soundness"):
        rng = random.Random(7011)
        for i in range(100):
            n = rng.randint(1, 5)
            nodes = {f"n{j}": f"L{j}" for j in range(1, n + 1)}
            ids = sorted(nodes)
            edges = {
                f"e{j}": (rng.choice(ids), rng.choice(ids), f"E{j}")
                for j in range(1, rng.randint(0, 5) + 1)
            }
            elements = sorted(nodes) + sorted(edges)
            slots = [(x, f"k{t}") for x in elements for t in range(4)]
            rng.shuffle(slots)
            p = rng.randint(0, min(20, len(slots)))
            chosen = slots[:p]
            props = {slot: f"v{rng.randrange(100)}" for slot in chosen}
            g1 = PropertyGraph(nodes, edges, props)
            k = rng.randint(0, p)
            mutated = dict(props)
            for slot in rng.sample(chosen, k):
                mutated[slot] = mutated[slot] + "x"
            g2 = PropertyGraph(nodes, edges, mutated)
            m = check_similar(g1, g2)
            out = generalize_pair(g1, g2, m)
            assert out.graph.prop_count == p - k, f"instance {i}"
            assert out.graph.nodes == g1.nodes and out.graph.edges == g1.edges


def test_criterion_4_self_subtraction_empty():
    with criterion(4, "self-subtraction emptiness"):
        rng = random.Random(404)
        for i in range(50):
            g = random_graph(rng)
            generalized = GeneralizedGraph(g)
            out = subtract(generalized, generalized)
            assert out.empty, f"instance {i}"


def _expected_matches(result, template):
    expected = template.expected_benchmark()
    got = result.benchmark
    if expected.empty:
        assert got.empty
        return
    m = check_similar(expected.graph, got.graph)
    assert m is not None and m.cost == 0
    assert expected.graph.prop_count == got.graph.prop_count
    assert {m.node_map[d] for d in expected.dummy_nodes} == set(got.dummy_nodes)


def test_criterion_5_end_to_end_synthetic_suite():
    with criterion(5, "end-to-end synthetic suite"):
        start = time.perf_counter()
        profile = BUILTIN_PROFILES["synthetic"]
        for name, template in sorted(TEMPLATES.items()):
            result = run_benchmark(profile, make_spec(name), seed=11)
            assert result.status in ("ok", "empty"), f"{name}: {result.reason}"
            _expected_matches(result, template)
        assert time.perf_counter() - start < 120.0


def test_criterion_6_scalability_shape():
    with criterion(6, "scalability shape"):
        profile = BUILTIN_PROFILES["synthetic"]
        counts = {}
        durations = {}
        for k in (1, 2, 4, 8):
            result = run_benchmark(profile, make_spec(f"scale{k}"), seed=5)
            assert result.status == "ok"
            counts[k] = (
                result.benchmark.graph.node_count,
                result.benchmark.graph.edge_count,
            )
            durations[k] = result.durations
        base_nodes, base_edges = counts[1]
        for k in (1, 2, 4, 8):
            assert counts[k] == (k * base_nodes, k * base_edges)
        assert sum(durations[8][1:]) < 120.0  # pipeline time, recording excluded


def test_criterion_7_datalog_round_trip_and_stability():
    with criterion(7, "datalog round trip"):
        rng = random.Random(777)
        for i in range(200):
            g = random_graph(rng)
            back = parse_datalog(emit_datalog(g, "g"))
            assert back.nodes == g.nodes, f"graph {i}"
            assert back.edges == g.edges, f"graph {i}"
            assert back.props == g.props, f"graph {i}"
            assert emit_datalog(canonicalize(g), "g") == emit_datalog(canonicalize(g), "g")
        # byte stability across interpreter runs (fresh hash seeds)
        sample = emit_datalog(random_graph(random.Random(42), min_nodes=3), "g")
        script = (
            "import sys; from provbench.graph import *; "
            "g = parse_datalog(sys.stdin.read()); "
            "sys.stdout.write(emit_datalog(canonicalize(g), 'g'))"
        )
        outputs = {
            subprocess.run(
                [sys.executable, "-c", script],
                input=sample,
                capture_output=True,
                text=True,
                check=True,
            ).stdout
            for _ in range(3)
        }
        assert len(outputs) == 1


def test_criterion_8_regression_mode(tmp_path):
    with criterion(8, "regression mode"):
        result = run_benchmark(BUILTIN_PROFILES["synthetic"], make_spec("creat"), seed=8)
        assert regression_check(tmp_path, result).kind == "new"
        assert regression_check(tmp_path, result, update=True).kind == "new"
        assert regression_check(tmp_path, result).kind == "unchanged"
        baseline = tmp_path / "creat.dl"
        edited = baseline.read_text().replace('"0644"', '"0600"')
        assert edited != baseline.read_text()
        baseline.write_text(edited)
        verdict = regression_check(tmp_path, result)
        assert verdict.kind == "changed"
        assert verdict.property_delta == 1


def test_criterion_9_timing_log_format(tmp_path):
    with criterion(9, "timing log format"):
        log = tmp_path / "time.log"
        pattern = re.compile(
            r"^[^,]+,[^,]+,\d+\.\d{3},\d+\.\d{3},\d+\.\d{3},\d+\.\d{3}$"
        )
        profile = BUILTIN_PROFILES["synthetic"]
        for i, name in enumerate(("creat", "open")):
            result = run_benchmark(profile, make_spec(name), seed=9)
            append_timing(log, result)
            lines = log.read_text().splitlines()
            assert len(lines) == i + 1  # exactly one line per run
            assert all(pattern.match(line) for line in lines)
            fields = lines[-1].split(",")
            assert len(fields) == 6
            assert all(float(f) >= 0 for f in fields[2:])
