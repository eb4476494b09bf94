import itertools
import random
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from bkb.cpt import build_node_cpts
from bkb.generators import generate_random_kb
from bkb.infer import unroll
from bkb.influence import influence_clauses, influenced_by
from bkb.network import (
    StateInput, UnknownVariable, build_influence_network, build_two_slice, complete_two_slice, dumps,
)
from bkb.parser import parse_atom, parse_kb, split_atoms

from conftest import fixture_kb, golden

AIDS_TOP = "aids(p1),aids(p2),aids(p3)"


@pytest.fixture(scope="module")
def aids_space(aids_kb):
    return influence_clauses(aids_kb)


def edge_triples(net):
    return Counter((str(c), str(p), k) for c, p, k in net.edges)


def test_two_slice_golden(aids_space):
    g = golden("aids")
    net, gen = build_two_slice(aids_space, split_atoms(AIDS_TOP))
    assert len(net.variables) == g["two_slice_counts"]["variables"]
    assert len(net.state_inputs) == g["two_slice_counts"]["state_inputs"]
    assert net.is_acyclic()
    assert edge_triples(net) == Counter(tuple(e) for e in g["two_slice_edges"])
    assert {(ic.k, str(ic.head), tuple(map(str, ic.body))) for ic in gen} == {
        (k, h, tuple(b)) for k, h, b in g["generalized"]}


def test_plain_network_has_self_loops(aids_space):
    net = build_influence_network(aids_space, split_atoms(AIDS_TOP))
    loops = {str(c) for c, p, k in net.edges if c == p and k == 3}
    assert loops == set(golden("aids")["plain_self_loops"])
    assert not net.is_acyclic()
    assert len(net.variables) == 5


def test_single_prior_node(aids_space):
    net = build_influence_network(aids_space, [parse_atom("contact(p1,p2)")])
    assert net.nodes == [parse_atom("contact(p1,p2)")] and net.edges == []
    assert net.priors == {parse_atom("contact(p1,p2)"): [5]}


def test_unknown_top(aids_space):
    with pytest.raises(UnknownVariable):
        build_two_slice(aids_space, [parse_atom("aids(p9)")])


def test_feedback_cut_at_reentry():
    space = influence_clauses(fixture_kb("feedback"))
    net, _ = build_two_slice(space, [parse_atom("a")])
    assert [(str(c), str(p), k) for c, p, k in net.edges] == [tuple(e) for e in golden("feedback")["two_slice_top_a_edges"]]
    assert len(net.state_inputs) == 1


def test_diamond_degenerates():
    space = influence_clauses(fixture_kb("diamond"))
    top = [parse_atom("d")]
    plain = build_influence_network(space, top)
    two, gen = build_two_slice(space, top)
    assert plain.nodes == two.nodes and plain.edges == two.edges and not two.state_inputs
    assert gen == space.clauses or sorted(map(str, gen)) == sorted(map(str, space.clauses))


def test_empty_network():
    net, gen = complete_two_slice(influence_clauses(fixture_kb("empty")))
    assert net.nodes == [] and gen == []
    assert "rankdir=BT" in net.to_dot()


def test_complete_two_slice(aids_space):
    net, _ = complete_two_slice(aids_space)
    assert len(net.variables) == 5 and len(net.state_inputs) == 3 and net.is_acyclic()


def test_path_complete_network(path_kb):
    space = influence_clauses(path_kb)
    net, _ = complete_two_slice(space)
    assert net.is_acyclic() and not net.state_inputs
    assert len(net.variables) == golden("path")["variable_count"]


def test_dot_and_json_exports(aids_space):
    net, _ = build_two_slice(aids_space, split_atoms(AIDS_TOP))
    dot = net.to_dot()
    assert dot.count("shape=ellipse, style=dashed") == 3
    assert dot.count("style=dashed]") == 7  # 3 state input nodes, 4 edges leaving them
    assert '"aids(p1)@t-1" -> "aids(p2)" [label="4", style=dashed]' in dot
    assert dumps(net.to_json()) == dumps(net.to_json())


def test_cut_soundness(aids_kb, aids_space):
    """Contracting slice indices of the unrolled network gives back the plain edges."""
    top = split_atoms(AIDS_TOP)
    plain = build_influence_network(aids_space, top)
    two, gen = build_two_slice(aids_space, top)
    contracted = Counter((c, p.atom if isinstance(p, StateInput) else p, k) for c, p, k in two.edges)
    assert contracted == Counter(plain.edges)
    un = unroll(two, build_node_cpts(aids_kb, two, gen), 3)
    for t in range(1, 4):
        pairs = {(c[0], p[0]) for c, p in un.edges() if c[1] == t}
        assert pairs == {(c, p) for c, p, _ in plain.edges}


def _offsets(net):
    return Counter((c, p.atom if isinstance(p, StateInput) else p, int(isinstance(p, StateInput))) for c, p, _ in net.edges)


def _shift_isomorphic(a, b) -> bool:
    atoms = sorted({x for x, _, _ in a} | {y for _, y, _ in a}, key=str)
    for shift in itertools.product((-1, 0, 1), repeat=len(atoms)):
        d = dict(zip(atoms, shift))
        if Counter({(c, p, o + d[c] - d[p]): n for (c, p, o), n in a.items()}) == b:
            return True
    return False


def test_rotations_isomorphic_up_to_slice_shift(aids_space):
    top = split_atoms(AIDS_TOP)
    base = _offsets(build_two_slice(aids_space, top)[0])
    for r in range(1, len(top)):
        rotated = _offsets(build_two_slice(aids_space, top[r:] + top[:r])[0])
        assert _shift_isomorphic(rotated, base)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_random_structural_properties(seed):
    kb = parse_kb(generate_random_kb(seed))
    space = influence_clauses(kb)
    heads = list(space.by_head)
    if not heads:
        return
    rng = random.Random(seed)
    top = rng.sample(heads, rng.randint(1, len(heads)))
    plain = build_influence_network(space, top)
    # node closure
    closure = set(top) | {b for h in top for b in space.variables if influenced_by(space, h, b)}
    assert set(plain.nodes) == closure
    # edge fidelity
    expected = Counter((ic.head, b, ic.k) for ic in space.clauses if ic.head in closure for b in ic.body)
    assert Counter(plain.edges) == expected
    # ancestry equals influence
    for x, y in itertools.product(plain.nodes, repeat=2):
        assert (x != y and plain.reaches(y, x)) == (x != y and influenced_by(space, x, y))
    two, gen = build_two_slice(space, top)
    assert two.is_acyclic()
    if not any(influenced_by(space, h, h) for h in closure):
        assert two.nodes == plain.nodes and two.edges == plain.edges and not two.state_inputs
    for ic in gen:
        for b in ic.body:
            if isinstance(b, StateInput):
                assert b.atom in two
