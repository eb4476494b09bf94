"""Randomized oracle-equivalence suites behind ``bkb selftest``."""

from __future__ import annotations

import random
from importlib import resources

from .cpt import build_node_cpts
from .generators import generate_random_ground, generate_random_kb
from .infer import Query, query_enum, query_ve, unroll
from .influence import influence_clauses, influence_clauses_bruteforce
from .network import build_two_slice
from .parser import parse_kb
from .wfs import tabled_model, well_founded_model


def fixture_text(name: str) -> str:
    return resources.files("bkb.fixtures").joinpath(name).read_text(encoding="utf-8")


def wfs_agreement(seed: int, count: int) -> tuple[int, int]:
    """(agreeing, total) over ``count`` random ground programs."""
    good = 0
    for s in range(seed, seed + count):
        kb = parse_kb(generate_random_ground(s))
        oracle = well_founded_model(kb)
        atoms = oracle.true_set | oracle.false_set | oracle.undefined_set
        tabled = tabled_model(kb, atoms)
        good += (tabled.true_set, tabled.false_set, tabled.undefined_set) == (
            oracle.true_set, oracle.false_set, oracle.undefined_set)
    return good, count


def influence_agreement(seed: int, count: int) -> tuple[int, int]:
    """(agreeing, total): tabled influence clauses against direct grounding."""
    good = 0
    for s in range(seed, seed + count):
        kb = parse_kb(generate_random_kb(s))
        good += influence_clauses(kb).clauses == influence_clauses_bruteforce(kb, well_founded_model(kb))
    return good, count


def random_queries(un, rng: random.Random, count: int) -> list[Query]:
    out = []
    nodes = un.nodes
    for _ in range(count):
        target, *ev = rng.sample(nodes, rng.randint(1, 3))
        pick = lambda n: (n[0], n[1], rng.choice(un.domains[n]))
        out.append(Query((pick(target),), tuple(pick(n) for n in ev)))
    return out


def inference_agreement(seed: int, count: int, horizons=(1, 2)) -> tuple[float, int]:
    """Largest |VE - enumeration| over random AIDS queries, and how many were answered."""
    kb = parse_kb(fixture_text("aids.bkb"))
    space = influence_clauses(kb)
    net, generalized = build_two_slice(space, [a for a in space.variables if a.pred == "aids"])
    cpts = build_node_cpts(kb, net, generalized)
    rng = random.Random(seed)
    worst, answered = 0.0, 0
    for T in horizons:
        un = unroll(net, cpts, T)
        for q in random_queries(un, rng, count):
            try:
                exact = query_enum(un, q)
            except ValueError:
                continue
            worst = max(worst, abs(query_ve(un, q) - exact))
            answered += 1
    return worst, answered


def run_all(seed: int = 0, count: int = 200) -> list[tuple[str, bool, str]]:
    good, total = wfs_agreement(seed, count)
    out = [("wfs tabled vs alternating fixpoint", good == total, f"{good}/{total} programs agree")]
    good, total = influence_agreement(seed, count)
    out.append(("influence clauses vs direct grounding", good == total, f"{good}/{total} knowledge bases agree"))
    worst, answered = inference_agreement(seed, max(1, count // 10))
    out.append(("variable elimination vs enumeration", worst <= 1e-12, f"max deviation {worst:.3g} over {answered} queries"))
    return out


__all__ = ["run_all", "wfs_agreement", "influence_agreement", "inference_agreement", "fixture_text"]
