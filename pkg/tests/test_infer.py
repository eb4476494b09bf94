import itertools
import random
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from bkb.cpt import NetworkCPTs, NodeCPT, build_node_cpts
from bkb.infer import (
    IncompleteAssignment, InvalidQuery, Query, UnrolledNetwork, ZeroEvidence, joint_probability, parse_query,
    query, query_enum, query_ve, unroll,
)
from bkb.influence import influence_clauses
from bkb.network import build_two_slice
from bkb.parser import parse_atom, split_atoms
from bkb.selftest import random_queries

from conftest import fixture_kb, golden


@pytest.fixture(scope="module")
def aids_two_slice(aids_kb):
    space = influence_clauses(aids_kb)
    net, gen = build_two_slice(space, split_atoms("aids(p1),aids(p2),aids(p3)"))
    return net, build_node_cpts(aids_kb, net, gen)


def all_assignments(un):
    for combo in itertools.product(*(un.domains[n] for n in un.nodes)):
        yield dict(zip(un.nodes, combo))


def test_unroll_shape(aids_two_slice):
    net, cpts = aids_two_slice
    un = unroll(net, cpts, 1)
    assert {str(a) for a, _ in un.slice(0)} == {"aids(p1)", "aids(p2)", "aids(p3)"}
    assert len(un.slice(1)) == 5
    un3 = unroll(net, cpts, 3)
    assert len(un3.nodes) == 3 + 3 * 5
    per_slice = [Counter((c[0], p[0], c[1] - p[1]) for c, p in un3.edges() if c[1] == t) for t in (1, 2, 3)]
    assert per_slice[0] == per_slice[1] == per_slice[2]
    # stationarity: the same CPT object drives every later slice
    for t in (2, 3):
        for a, _ in un3.slice(t):
            assert un3.cpts[(a, t)] is un3.cpts[(a, 1)]


def test_no_state_inputs_gives_copies():
    kb = fixture_kb("diamond")
    space = influence_clauses(kb)
    net, gen = build_two_slice(space, [parse_atom("d")])
    cpts = build_node_cpts(kb, net, gen)
    un = unroll(net, cpts, 2)
    assert un.slice(0) == [] and len(un.slice(1)) == len(un.slice(2)) == 4
    assert all(c[1] == p[1] for c, p in un.edges())


@pytest.mark.parametrize("T", [1, 2])
def test_normalization(aids_two_slice, T):
    un = unroll(*aids_two_slice, T)
    assert sum(joint_probability(un, a) for a in all_assignments(un)) == pytest.approx(1, abs=1e-9)


def test_joint_single_node():
    a = parse_atom("a")
    un = UnrolledNetwork(1, [(a, 1)], {(a, 1): []}, {(a, 1): NodeCPT(a, [], {(): {"yes": 0.7, "no": 0.3}}, "prior")},
                         {(a, 1): ("yes", "no")})
    assert joint_probability(un, {(a, 1): "yes"}) == 0.7
    with pytest.raises(IncompleteAssignment):
        joint_probability(un, {})


def test_two_node_chain_hand_product():
    a, b = parse_atom("a"), parse_atom("b")
    un = UnrolledNetwork(1, [(a, 1), (b, 1)], {(a, 1): [], (b, 1): [(a, 1)]},
                         {(a, 1): NodeCPT(a, [], {(): {"yes": 0.3, "no": 0.7}}, "prior"),
                          (b, 1): NodeCPT(b, [a], {("yes",): {"yes": 0.9, "no": 0.1}, ("no",): {"yes": 0.2, "no": 0.8}}, "posterior")},
                         {(a, 1): ("yes", "no"), (b, 1): ("yes", "no")})
    assert joint_probability(un, {(a, 1): "yes", (b, 1): "yes"}) == pytest.approx(0.27)
    q = parse_query("P(a@1 = yes | b@1 = yes)")
    assert query_ve(un, q) == pytest.approx(0.27 / (0.27 + 0.14), abs=1e-15)


def test_trivial_queries(aids_two_slice):
    un = unroll(*aids_two_slice, 1)
    assert query(un, parse_query("P(aids(p1)@0 = yes)")) == pytest.approx(0.7, abs=1e-12)
    assert query(un, parse_query("P(aids(p1)@1 = no | aids(p1)@1 = no)")) == pytest.approx(1.0, abs=1e-12)
    assert query(un, parse_query("P(aids(p1)@1 = yes | aids(p1)@1 = no)")) == 0.0


def test_golden_query(aids_two_slice):
    g = golden("aids")
    q = parse_query("P(aids(p1)@1 = yes | aids(p3)@0 = yes)")
    assert abs(query_ve(unroll(*aids_two_slice, 1), q) - g["query_T1"]) <= 1e-12
    assert abs(query_ve(unroll(*aids_two_slice, 2), q) - g["query_T2"]) <= 1e-12


def test_zero_evidence():
    kb = fixture_kb("aids")
    space = influence_clauses(kb)
    net, gen = build_two_slice(space, split_atoms("aids(p1),aids(p2),aids(p3)"))
    cpts = build_node_cpts(kb, net, gen)
    # make contact(p2,p1) certain so that its absence is impossible
    c = parse_atom("contact(p2,p1)")
    cpts.attached[c] = NodeCPT(c, [], {(): {"yes": 1.0, "no": 0.0}}, "prior")
    un = unroll(net, cpts, 1)
    with pytest.raises(ZeroEvidence):
        query_ve(un, parse_query("P(aids(p1)@1 = yes | contact(p2,p1)@1 = no)"))
    with pytest.raises(ZeroEvidence):
        query_enum(un, parse_query("P(aids(p1)@1 = yes | contact(p2,p1)@1 = no)"))


@pytest.mark.parametrize("text", [
    "P(aids(p1)@5 = yes)", "P(aids(p1)@1 = maybe)", "P(nosuch@1 = yes)", "P(contact(p1,p2)@0 = yes)",
    "P(aids(X)@1 = yes)", "aids(p1)@1 = yes", "P(aids(p1)@1 = yes",
])
def test_invalid_queries(aids_two_slice, text):
    un = unroll(*aids_two_slice, 1)
    with pytest.raises(InvalidQuery):
        query(un, parse_query(text))


def test_query_text_round_trip():
    q = parse_query("P(aids(p1)@1 = yes, aids(p2)@2 = no | contact(p1,p2)@1 = yes)")
    assert parse_query(str(q)) == q and q.max_slice == 2


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([1, 2]))
def test_ve_matches_enumeration(aids_two_slice, seed, T):
    un = unroll(*aids_two_slice, T)
    for q in random_queries(un, random.Random(seed), 3):
        try:
            exact = query_enum(un, q)
        except ZeroEvidence:
            with pytest.raises(ZeroEvidence):
                query_ve(un, q)
            continue
        assert abs(query_ve(un, q) - exact) <= 1e-12


def test_feedback_ve_matches_enumeration():
    kb = fixture_kb("feedback")
    space = influence_clauses(kb)
    net, gen = build_two_slice(space, [parse_atom("a"), parse_atom("b")])
    un = unroll(net, build_node_cpts(kb, net, gen), 4)
    q = Query(((parse_atom("a"), 4, "yes"),), ((parse_atom("b"), 1, "no"),))
    assert abs(query_ve(un, q) - query_enum(un, q)) <= 1e-12
