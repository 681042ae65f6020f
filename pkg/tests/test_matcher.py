"""Similarity, subgraph embedding, cost model, and oracle agreement."""

import random

import pytest

from provbench.errors import (
    BudgetExceededError,
    InvalidMatchingError,
    OracleTooLargeError,
)
from provbench.graph import PropertyGraph, parse_datalog
from provbench.matching import (
    MODE_EXACT,
    MODE_SUBGRAPH,
    Matching,
    MatchProblem,
    best_subgraph_matching,
    brute_force_matching,
    check_similar,
    count_optimal_embeddings,
    matching_cost,
)

from _gen import mutate_prop_values, permuted_copy, random_graph, random_pair

G1 = parse_datalog('ng1(n1,"File"). pg1(n1,"Userid","1"). pg1(n1,"Name","text").')
G2 = parse_datalog(
    'ng2(n1,"File"). ng2(n2,"Process"). pg2(n1,"Userid","1"). '
    'eg2(e1,n1,n2,"Used"). pg2(n1,"Name","text").'
)


# -- similarity -------------------------------------------------------------


def test_similar_rejects_different_node_counts():
    assert check_similar(G1, G2) is None


def test_similar_permuted_with_one_property_edit_costs_one():
    rng = random.Random(0)
    edited = permuted_copy(rng, mutate_prop_values(rng, G2, 1))
    m = check_similar(G2, edited)
    assert m is not None
    assert m.cost == 1


def test_similar_identity_is_lexicographically_least():
    m = check_similar(G2, G2)
    assert m is not None
    assert m.cost == 0
    assert m.node_map == {"n1": "n1", "n2": "n2"}
    assert m.edge_map == {"e1": "e1"}


def test_similarity_presence_symmetric_and_costs_differ_by_prop_counts():
    rng = random.Random(7)
    checked = 0
    for _ in range(80):
        g, h = random_pair(rng, max_nodes=5, max_edges=5)
        try:
            m1 = check_similar(g, h)
            m2 = check_similar(h, g)
        except BudgetExceededError:
            continue
        assert (m1 is None) == (m2 is None)
        if m1 is not None:
            # Both directions maximize the same matched-property count,
            # so the one-sided costs differ exactly by the difference
            # in total property counts.
            assert m1.cost - m2.cost == g.prop_count - h.prop_count
            checked += 1
    assert checked >= 10


# -- subgraph embedding -----------------------------------------------------


def test_embed_sample_node_into_larger_graph_costs_zero():
    m = best_subgraph_matching(G1, G2)
    assert m is not None
    assert m.node_map == {"n1": "n1"}
    assert m.cost == 0


def test_empty_pattern_embeds_everywhere():
    empty = PropertyGraph()
    m = best_subgraph_matching(empty, G2)
    assert m == Matching({}, {}, 0)


def test_embedding_prefers_property_matching_candidate():
    # Two candidate images for the chain; only one also matches the
    # node property, so the optimum has cost 0, never 1.
    pattern = parse_datalog('ng(a,"P"). ng(b,"F"). eg(e1,a,b,"u"). pg(b,"k","akey").')
    host = parse_datalog(
        'nh(p,"P"). nh(f1,"F"). nh(f2,"F"). eh(x1,p,f1,"u"). eh(x2,p,f2,"u"). '
        'ph(f1,"k","bkey"). ph(f2,"k","akey").'
    )
    m = best_subgraph_matching(pattern, host)
    assert m.cost == 0
    assert m.node_map["b"] == "f2"


def test_missing_structure_yields_absent():
    pattern = parse_datalog('ng(a,"P"). ng(b,"F"). eg(e1,a,b,"u").')
    host = parse_datalog('nh(p,"P"). nh(f,"F"). eh(x1,f,p,"u").')  # reversed edge
    assert best_subgraph_matching(pattern, host) is None


def test_self_loop_requires_self_loop():
    pattern = parse_datalog('ng(a,"A"). eg(e1,a,a,"l").')
    host_no = parse_datalog('nh(x,"A"). nh(y,"A"). eh(f1,x,y,"l"). eh(f2,y,x,"l").')
    host_yes = parse_datalog('nh(x,"A"). eh(f1,x,x,"l").')
    assert best_subgraph_matching(pattern, host_no) is None
    assert best_subgraph_matching(pattern, host_yes) is not None


def test_parallel_edges_need_enough_capacity():
    pattern = parse_datalog('ng(a,"A"). ng(b,"B"). eg(e1,a,b,"l"). eg(e2,a,b,"l").')
    host_one = parse_datalog('nh(x,"A"). nh(y,"B"). eh(f1,x,y,"l").')
    host_two = parse_datalog('nh(x,"A"). nh(y,"B"). eh(f1,x,y,"l"). eh(f2,x,y,"l").')
    assert best_subgraph_matching(pattern, host_one) is None
    m = best_subgraph_matching(pattern, host_two)
    assert m is not None and m.cost == 0


# -- cost model -------------------------------------------------------------


def test_matching_cost_identity_zero():
    m = Matching({"n1": "n1", "n2": "n2"}, {"e1": "e1"}, 0)
    assert matching_cost(m, G2, G2) == 0


def test_matching_cost_value_difference_counts_one():
    host = parse_datalog(
        'ng2(n1,"File"). ng2(n2,"Process"). pg2(n1,"Userid","2"). '
        'eg2(e1,n1,n2,"Used"). pg2(n1,"Name","text").'
    )
    m = Matching({"n1": "n1"}, {}, 0)
    assert matching_cost(m, G1, host) == 1


def test_matching_cost_absent_properties_sum():
    host = parse_datalog('ng2(n1,"File"). ng2(n2,"Process"). eg2(e1,n1,n2,"Used").')
    m = Matching({"n1": "n1"}, {}, 0)
    assert matching_cost(m, G1, host) == 2


def test_matching_cost_validates_structure():
    with pytest.raises(InvalidMatchingError):
        matching_cost(Matching({"n1": "n2"}, {}, 0), G1, G2)  # label broken
    with pytest.raises(InvalidMatchingError):
        matching_cost(Matching({}, {}, 0), G1, G2)  # not total
    with pytest.raises(InvalidMatchingError):
        matching_cost(
            Matching({"n1": "n1", "n2": "n1"}, {"e1": "e1"}, 0), G2, G2
        )  # not injective


# -- oracle -----------------------------------------------------------------


def test_oracle_identity_and_sample_graphs():
    m = brute_force_matching(MatchProblem(G2, G2, MODE_EXACT))
    assert m is not None and m.cost == 0
    assert m.node_map == {"n1": "n1", "n2": "n2"}
    m = brute_force_matching(MatchProblem(G1, G2, MODE_SUBGRAPH))
    assert m is not None and m.cost == 0


def test_oracle_guard():
    big = random_graph(random.Random(1), max_nodes=9, min_nodes=9, max_edges=0)
    with pytest.raises(OracleTooLargeError):
        brute_force_matching(MatchProblem(big, big, MODE_SUBGRAPH))


def test_solver_agrees_with_oracle_on_random_instances():
    rng = random.Random(42)
    for i in range(120):
        pattern, host = random_pair(rng, max_nodes=5, max_edges=6)
        expected = brute_force_matching(MatchProblem(pattern, host, MODE_SUBGRAPH))
        got = best_subgraph_matching(pattern, host)
        assert (expected is None) == (got is None), f"instance {i}"
        if expected is not None:
            assert expected.cost == got.cost, f"instance {i}"
            assert expected.node_map == got.node_map, f"instance {i}"
            assert expected.edge_map == got.edge_map, f"instance {i}"
        expected = brute_force_matching(MatchProblem(pattern, host, MODE_EXACT))
        got = check_similar(pattern, host)
        assert (expected is None) == (got is None), f"instance {i}"
        if expected is not None:
            assert expected.cost == got.cost, f"instance {i}"
            assert expected.node_map == got.node_map, f"instance {i}"
            assert expected.edge_map == got.edge_map, f"instance {i}"


def test_determinism_repeated_solves():
    rng = random.Random(5)
    for _ in range(20):
        pattern, host = random_pair(rng)
        first = best_subgraph_matching(pattern, host)
        second = best_subgraph_matching(pattern, host)
        assert first == second


def test_monotonicity_adding_pattern_property():
    rng = random.Random(9)
    tried = 0
    for _ in range(60):
        pattern, host = random_pair(rng, max_nodes=4, max_edges=4)
        if pattern.node_count == 0:
            continue
        base = best_subgraph_matching(pattern, host)
        if base is None:
            continue
        x = sorted(pattern.nodes)[rng.randrange(pattern.node_count)]
        key = f"extra{rng.randrange(3)}"
        if (x, key) in pattern.props:
            continue
        richer = PropertyGraph(
            dict(pattern.nodes),
            dict(pattern.edges),
            {**pattern.props, (x, key): "q"},
            pattern.gid,
        )
        m = best_subgraph_matching(richer, host)
        assert m is not None
        assert m.cost >= base.cost
        tried += 1
    assert tried >= 10


def test_budget_exceeded_raises():
    g = random_graph(random.Random(3), max_nodes=6, min_nodes=6, max_edges=6)
    with pytest.raises(BudgetExceededError):
        check_similar(g, permuted_copy(random.Random(4), g), budget=2)


def _planted_instance(rng, n_host, n_pattern, k_mismatch, unique_labels):
    """Host plus an embedded pattern with k planted property mismatches.

    With unique labels the planted embedding is the only one, so the
    optimal cost is exactly k; with few labels it is an upper bound.
    """
    labels = (
        [f"L{i}" for i in range(n_host)] if unique_labels else ["A", "B"]
    )
    nodes = {f"h{i}": labels[i % len(labels)] for i in range(n_host)}
    ids = sorted(nodes)
    edges = {}
    for j in range(n_host * 2):
        edges[f"f{j}"] = (rng.choice(ids), rng.choice(ids), f"E{j % 5}")
    props = {}
    for x in list(nodes) + list(edges):
        props[(x, "k")] = f"val-{x}"
    host = PropertyGraph(nodes, edges, props)

    chosen = rng.sample(ids, n_pattern)
    keep = set(chosen)
    pnodes = {x: nodes[x] for x in chosen}
    pedges = {
        e: spec for e, spec in edges.items() if spec[0] in keep and spec[1] in keep
    }
    pprops = {
        (x, k): v for (x, k), v in props.items() if x in keep or x in pedges
    }
    slots = sorted(pprops)
    rng.shuffle(slots)
    for slot in slots[:k_mismatch]:
        pprops[slot] = pprops[slot] + "-planted"  # value absent from host
    pattern = PropertyGraph(pnodes, pedges, pprops)
    return pattern, host, min(k_mismatch, len(slots))


def test_planted_embeddings_beyond_oracle_sizes():
    rng = random.Random(31)
    for trial in range(15):
        pattern, host, k = _planted_instance(
            rng, n_host=30, n_pattern=18, k_mismatch=rng.randint(0, 6),
            unique_labels=True,
        )
        m = best_subgraph_matching(pattern, host)
        assert m is not None
        assert m.cost == k, f"trial {trial}"
    for trial in range(10):
        pattern, host, k = _planted_instance(
            rng, n_host=24, n_pattern=10, k_mismatch=rng.randint(0, 4),
            unique_labels=False,
        )
        m = best_subgraph_matching(pattern, host)
        assert m is not None
        assert m.cost <= k, f"trial {trial}"  # planted embedding bounds it


def test_solve_problem_dispatch():
    from provbench.matching import solve_problem

    assert solve_problem(MatchProblem(G1, G2, MODE_SUBGRAPH)) == best_subgraph_matching(G1, G2)
    assert solve_problem(MatchProblem(G2, G2, MODE_EXACT)) == check_similar(G2, G2)
    assert solve_problem(MatchProblem(G1, G2, MODE_EXACT)) is None


def test_count_optimal_embeddings():
    pattern = parse_datalog('ng(a,"F").')
    host = parse_datalog('nh(x,"F"). nh(y,"F"). nh(z,"P").')
    assert count_optimal_embeddings(pattern, host) == 2
    assert count_optimal_embeddings(pattern, parse_datalog('nh(z,"P").')) == 0
    empty = PropertyGraph()
    assert count_optimal_embeddings(empty, host) == 1
