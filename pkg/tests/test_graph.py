"""Datalog format and canonical relabeling."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from provbench.errors import (
    ConflictingPropertyError,
    DanglingReferenceError,
    IdClashError,
    MixedGidError,
    ParseError,
)
from provbench.graph import PropertyGraph, canonicalize, emit_datalog, parse_datalog
from provbench.matching import MODE_EXACT, MatchProblem, brute_force_matching

from _gen import permuted_copy, random_graph

# Sample graph pair used throughout: one File node with two properties,
# and the same node joined to a Process by a Used edge.
G1_TEXT = """
ng1(n1,"File").
pg1(n1,"Userid","1").
pg1(n1,"Name","text").
"""
G2_TEXT = """
ng2(n1,"File").
ng2(n2,"Process").
pg2(n1,"Userid","1").
eg2(e1,n1,n2,"Used").
pg2(n1,"Name","text").
"""


def test_parse_single_node_graph():
    g = parse_datalog(G1_TEXT)
    assert g.gid == "g1"
    assert g.nodes == {"n1": "File"}
    assert g.edges == {}
    assert g.props == {("n1", "Userid"): "1", ("n1", "Name"): "text"}


def test_parse_two_node_graph_with_edge():
    g = parse_datalog(G2_TEXT)
    assert g.gid == "g2"
    assert g.nodes == {"n1": "File", "n2": "Process"}
    assert g.edges == {"e1": ("n1", "n2", "Used")}
    assert g.props == {("n1", "Userid"): "1", ("n1", "Name"): "text"}


def test_parse_empty_document_gives_empty_default_graph():
    g = parse_datalog("")
    assert g.gid == "g"
    assert g.node_count == 0 and g.edge_count == 0 and g.prop_count == 0


def test_parse_comments_and_fact_order_independence():
    text = '% a comment\npg9(n1,"k","v").\n% props may precede nodes\nng9(n1,"L").'
    g = parse_datalog(text)
    assert g.props == {("n1", "k"): "v"}


def test_parse_deduplicates_identical_facts():
    g = parse_datalog('ng1(n1,"File"). ng1(n1,"File"). pg1(n1,"k","v"). pg1(n1,"k","v").')
    assert g.node_count == 1 and g.prop_count == 1


def test_emit_is_sorted_and_exact():
    g = parse_datalog(G1_TEXT)
    assert emit_datalog(g, "g1") == 'ng1(n1,"File").\npg1(n1,"Name","text").\npg1(n1,"Userid","1").\n'


def test_emit_empty_graph_is_empty_string():
    assert emit_datalog(PropertyGraph(), "g") == ""


def test_emit_orders_nodes_edges_props():
    g = parse_datalog(G2_TEXT)
    out = emit_datalog(g, "g2")
    assert out.splitlines() == [
        'ng2(n1,"File").',
        'ng2(n2,"Process").',
        'eg2(e1,n1,n2,"Used").',
        'pg2(n1,"Name","text").',
        'pg2(n1,"Userid","1").',
    ]


def test_quoting_round_trip():
    g = PropertyGraph(
        {"n1": 'La"bel\\'}, {}, {("n1", 'ke"y'): "va\\lue"}, "g"
    )
    text = emit_datalog(g, "g")
    assert parse_datalog(text).props == g.props


def test_unicode_values_round_trip():
    g = PropertyGraph({"n1": "Pfad"}, {}, {("n1", "Name"): "/tmp/Grüße θ.txt"}, "g")
    assert parse_datalog(emit_datalog(g)) == g


@pytest.mark.parametrize(
    "text,err",
    [
        ('ng1(n1,"A"). ng2(n2,"B").', MixedGidError),
        ('eg1(e1,n1,n2,"L").', DanglingReferenceError),
        ('pg1(n1,"k","v").', DanglingReferenceError),
        ('ng1(x,"A"). eg1(x,n1,n1,"L"). ng1(n1,"B").', IdClashError),
        ('ng1(n1,"A"). pg1(n1,"k","v"). pg1(n1,"k","w").', ConflictingPropertyError),
        ('ng1(n1,"A")', ParseError),
        ('ng1(N1,"A").', ParseError),
        ('zg1(n1,"A").', ParseError),
        ('ng1(n1,"A\\q").', ParseError),
        ('ng1(n1,"A).', ParseError),
        ('ng1(n1,).', ParseError),
    ],
)
def test_parse_rejections(text, err):
    with pytest.raises(err):
        parse_datalog(text)


def test_parse_error_carries_position():
    with pytest.raises(ParseError) as exc:
        parse_datalog('ng1(n1,"A").\nng1(n2,"B"')
    assert exc.value.line == 2


def test_self_loops_and_parallel_edges_are_legal():
    text = 'ng(a,"A"). eg(e1,a,a,"L"). eg(e2,a,a,"L").'
    g = parse_datalog(text)
    assert g.edge_count == 2
    assert parse_datalog(emit_datalog(g)) == g


@settings(max_examples=150, deadline=None)
@given(st.randoms(use_true_random=False))
def test_round_trip_identity(rng):
    g = random_graph(rng)
    assert parse_datalog(emit_datalog(g, "g")) == g


@settings(max_examples=100, deadline=None)
@given(st.randoms(use_true_random=False))
def test_canonicalize_idempotent(rng):
    g = random_graph(rng)
    c1 = canonicalize(g)
    c2 = canonicalize(c1)
    assert emit_datalog(c1, "g") == emit_datalog(c2, "g")
    assert c1 == c2


def test_canonicalize_single_node_rename():
    g = parse_datalog('ngx(x9,"File"). pgx(x9,"Userid","1").')
    c = canonicalize(g)
    assert set(c.nodes) == {"n1"}
    assert c.props == {("n1", "Userid"): "1"}
    assert c.gid == "gx"


def test_canonicalize_permuted_ids_byte_identical():
    rng = random.Random(4)
    for _ in range(60):
        g = random_graph(rng)
        h = permuted_copy(rng, g)
        assert emit_datalog(canonicalize(g), "g") == emit_datalog(canonicalize(h), "g")


def test_canonical_equality_matches_brute_force_isomorphism():
    # Byte-identical canonical emissions must coincide exactly with the
    # existence of a property-preserving isomorphism (cost-0 witness
    # from the exhaustive oracle) on small graphs.
    rng = random.Random(11)
    pairs = []
    for _ in range(40):
        g = random_graph(rng, max_nodes=4, max_edges=4)
        pairs.append((g, permuted_copy(rng, g)))
        pairs.append((g, random_graph(rng, max_nodes=4, max_edges=4)))
    for g, h in pairs:
        same_bytes = emit_datalog(canonicalize(g), "g") == emit_datalog(canonicalize(h), "g")
        witness = brute_force_matching(MatchProblem(g, h, MODE_EXACT))
        iso = witness is not None and witness.cost == 0 and matching_is_two_way_tight(g, h, witness)
        assert same_bytes == iso


def matching_is_two_way_tight(g, h, m):
    # cost 0 says every pattern property matches; equal property counts
    # then make the bijection property-preserving in both directions.
    return g.prop_count == h.prop_count


def test_canonicalize_symmetric_twins():
    # Two interchangeable leaf nodes force the individualization path.
    text = 'ng(p,"P"). ng(a,"F"). ng(b,"F"). eg(e1,p,a,"w"). eg(e2,p,b,"w").'
    g = parse_datalog(text)
    h = permuted_copy(random.Random(1), g)
    assert emit_datalog(canonicalize(g), "g") == emit_datalog(canonicalize(h), "g")


def _directed_cycle(ids):
    nodes = {x: "N" for x in ids}
    edges = {f"e{i + 1}": (ids[i], ids[(i + 1) % len(ids)], "w") for i in range(len(ids))}
    return PropertyGraph(nodes, edges, {})


def test_canonicalize_many_interchangeable_nodes_stays_cheap():
    # 1500 identical isolated nodes: the twin batch path must relabel
    # them without recursing per node.
    g = PropertyGraph({f"x{i}": "N" for i in range(1500)}, {}, {})
    h = permuted_copy(random.Random(2), g)
    assert emit_datalog(canonicalize(g), "g") == emit_datalog(canonicalize(h), "g")


def test_canonicalize_regular_graphs_where_refinement_stalls():
    # A 6-cycle and two 3-cycles are refinement-indistinguishable
    # (every node looks alike), so only individualization branching can
    # tell them apart; non-twin members of one class must all be tried.
    c6 = _directed_cycle(["a", "b", "c", "d", "e", "f"])
    c6_perm = permuted_copy(random.Random(3), c6)
    two_c3 = PropertyGraph(
        {x: "N" for x in "abcdef"},
        {
            "e1": ("a", "b", "w"), "e2": ("b", "c", "w"), "e3": ("c", "a", "w"),
            "e4": ("d", "e", "w"), "e5": ("e", "f", "w"), "e6": ("f", "d", "w"),
        },
        {},
    )
    assert emit_datalog(canonicalize(c6), "g") == emit_datalog(canonicalize(c6_perm), "g")
    assert emit_datalog(canonicalize(c6), "g") != emit_datalog(canonicalize(two_c3), "g")


def test_invalid_construction_raises():
    with pytest.raises(DanglingReferenceError):
        PropertyGraph({"a": "A"}, {"e1": ("a", "b", "L")}, {})
    with pytest.raises(IdClashError):
        PropertyGraph({"a": "A"}, {"a": ("a", "a", "L")}, {})
    with pytest.raises(ValueError):
        PropertyGraph({"BAD": "A"}, {}, {})
    with pytest.raises(DanglingReferenceError):
        PropertyGraph({"a": "A"}, {}, {("b", "k"): "v"})
