#!/usr/bin/env python3
"""Write the JSON goldens that sit beside each fixture.

Every artifact carries a provenance tag:

* ``PAPER``   transcribed by hand from the published worked examples;
* ``TRIVIAL`` follows from the fixture text at a glance;
* ``DERIVED`` computed here by an independent oracle (alternating fixpoint
  over the ground program, direct grounding of influence clauses, full
  enumeration of the unrolled joint, exact fractions in make_aids_cpts.py).

The PAPER entries are literals, never produced by the code under test.
"""

import argparse
import json
from pathlib import Path

from bkb import load_kb, well_founded_model
from bkb.cpt import POSTERIOR_AVERAGE, build_node_cpts
from bkb.infer import parse_query, query_enum, unroll
from bkb.influence import influence_clauses, influence_clauses_bruteforce
from bkb.network import build_two_slice

FIXTURES = Path(__file__).resolve().parents[1] / "src" / "bkb" / "fixtures"


def art(tag, note, value):
    return {"tag": tag, "note": note, "value": value}


def oracle_space(kb):
    wfm = well_founded_model(kb)
    pb = kb.pb_predicates
    variables = sorted((a for a in wfm.true_set if a.key in pb), key=kb.atom_key)
    clauses = influence_clauses_bruteforce(kb, wfm)
    return wfm, variables, clauses


def enum_query(kb, text, horizon, fallback="peer-average"):
    q = parse_query(text)
    space = influence_clauses(kb)
    net, gen = build_two_slice(space, q.atoms())
    return query_enum(unroll(net, build_node_cpts(kb, net, gen, fallback), horizon), q)


def aids():
    kb = load_kb(FIXTURES / "aids.bkb")
    q = "P(aids(p1)@1 = yes | aids(p3)@0 = yes)"
    return {
        "variables": art("PAPER", "space of random variables of the AIDS program", [
            "aids(p1)", "aids(p2)", "aids(p3)", "contact(p1,p2)", "contact(p2,p1)"]),
        "influence_clauses": art("PAPER", "influence clauses of the AIDS program", [
            [1, "aids(p1)", []], [2, "aids(p3)", []],
            [3, "aids(p1)", ["aids(p1)"]], [3, "aids(p2)", ["aids(p2)"]], [3, "aids(p3)", ["aids(p3)"]],
            [4, "aids(p2)", ["aids(p1)", "contact(p2,p1)"]], [4, "aids(p1)", ["aids(p2)", "contact(p1,p2)"]],
            [5, "contact(p1,p2)", []], [6, "contact(p2,p1)", []]]),
        "two_slice_top": art("PAPER", "query/evidence atoms of the two-slice example", ["aids(p1)", "aids(p2)", "aids(p3)"]),
        "two_slice_counts": art("PAPER", "variable and state input node counts of the two-slice network",
                                {"variables": 5, "state_inputs": 3}),
        "two_slice_edges": art("PAPER", "edge multiset (child, parent, k) of the two-slice network", [
            ["aids(p1)", "aids(p1)@t-1", 3], ["aids(p1)", "aids(p2)", 4], ["aids(p1)", "contact(p1,p2)", 4],
            ["aids(p2)", "aids(p2)@t-1", 3], ["aids(p2)", "aids(p1)@t-1", 4], ["aids(p2)", "contact(p2,p1)", 4],
            ["aids(p3)", "aids(p3)@t-1", 3]]),
        "generalized": art("PAPER", "generalized influence clauses", [
            [1, "aids(p1)", []], [2, "aids(p3)", []],
            [3, "aids(p1)", ["aids(p1)@t-1"]], [3, "aids(p2)", ["aids(p2)@t-1"]], [3, "aids(p3)", ["aids(p3)@t-1"]],
            [4, "aids(p2)", ["aids(p1)@t-1", "contact(p2,p1)"]], [4, "aids(p1)", ["aids(p2)", "contact(p1,p2)"]],
            [5, "contact(p1,p2)", []], [6, "contact(p2,p1)", []]]),
        "plain_self_loops": art("PAPER", "plain network keeps a 3-labelled self-loop on every aids node",
                                ["aids(p1)", "aids(p2)", "aids(p3)"]),
        "peer_average_prior": art("PAPER", "P(aids(p2)=yes) at slice 0 by averaging peer priors", 0.72),
        "posterior_average_prior": art("PAPER", "P(aids(p2)=yes) at slice 0 by averaging posterior rows "
                                       "(row values DERIVED by scripts/make_aids_cpts.py)", 0.7),
        "root_marginal": art("TRIVIAL", "P(aids(p1)@0 = yes) is the clause-1 prior", 0.7),
        "query_T1": art("DERIVED", f"{q} at horizon 1, full enumeration", enum_query(kb, q, 1)),
        "query_T2": art("DERIVED", f"{q} at horizon 2, full enumeration", enum_query(kb, q, 2)),
        "query_T1_posterior_average": art("DERIVED", f"{q} at horizon 1 with posterior-average fallback",
                                          enum_query(kb, q, 1, POSTERIOR_AVERAGE)),
    }


def generic(name, extra=None):
    kb = load_kb(FIXTURES / name)
    wfm, variables, clauses = oracle_space(kb)
    out = {
        "variables": art("DERIVED", "PB atoms true under the alternating fixpoint", [str(a) for a in variables]),
        "influence_clauses": art("DERIVED", "influence clauses by direct grounding",
                                 [[ic.k, str(ic.head), [str(b) for b in ic.body]] for ic in clauses]),
        "undefined": art("DERIVED", "atoms undefined under the alternating fixpoint", sorted(map(str, wfm.undefined_set))),
    }
    out.update(extra or {})
    return out


def path():
    kb = load_kb(FIXTURES / "path.bkb")
    wfm, variables, clauses = oracle_space(kb)
    return {
        "variable_count": art("DERIVED", "PB atoms true under the alternating fixpoint", len(variables)),
        "influence_clause_count": art("DERIVED", "influence clauses by direct grounding", len(clauses)),
        "path_s_g": art("PAPER", "path(s,g) is derivable", "path(s,g)" in {str(a) for a in variables}),
        "query": art("TRIVIAL", "P(path(s,g)@1 = yes) with uniform 0.5 CPTs and a single contributing clause", 0.5),
    }


GOLDENS = {
    "aids.json": aids,
    "diamond.json": lambda: generic("diamond.bkb", {
        "state_inputs": art("TRIVIAL", "acyclic: no state inputs", 0)}),
    "feedback.json": lambda: generic("feedback.bkb", {
        "two_slice_top_a_edges": art("TRIVIAL", "top = a: a <- b <- a@t-1", [["a", "b", 3], ["b", "a@t-1", 4]])}),
    "units.json": lambda: generic("units.bkb"),
    "empty.json": lambda: {"variables": art("TRIVIAL", "no clauses", []),
                           "influence_clauses": art("TRIVIAL", "no clauses", [])},
    "broken.json": lambda: {"diagnostics": art("TRIVIAL", "clause 2 leaves its head variable untyped",
                                               ["pb 2: untyped-head-var: head variable X has no member constraint"])},
    "path.json": path,
}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("names", nargs="*", help="golden files to write (default all)")
    args = ap.parse_args(argv)
    for name in args.names or GOLDENS:
        data = {"fixture": name.replace(".json", ".bkb"), "artifacts": GOLDENS[name]()}
        (FIXTURES / name).write_text(json.dumps(data, indent=2) + "\n")
        print(f"wrote {name}")


if __name__ == "__main__":
    main()
