"""Program generators for fixtures, scaling probes and differential tests.

Everything here returns ``.bkb`` source text and is deterministic in its
arguments.
"""

from __future__ import annotations

import itertools
import random

_BINARY = "values {yes, no} positive yes"


def _cpt(k: int, arity: int, p_yes) -> str:
    """CPT block over ``arity`` binary parents; ``p_yes(row)`` gives P(yes)."""
    rows = []
    for combo in itertools.product(("yes", "no"), repeat=arity):
        p = round(p_yes(combo), 6)
        rows.append(f"({', '.join(combo)}) -> yes: {p!r}, no: {round(1.0 - p, 6)!r}")
    if len(rows) == 1:
        return f"cpt {k}: {{ {rows[0]} }}"
    return f"cpt {k}: {{\n  " + " ;\n  ".join(rows) + "\n}"


def _members(var: str, consts) -> str:
    return f"member({var}, [{', '.join(consts)}])"


def generate_chain(n: int) -> str:
    """AIDS-style program over persons p1..pn with one seed infection.

    Contacts run ``contact(p(i+1), p(i))`` so that, read through the contact
    clause ``aids(X) <- aids(Y), contact(X, Y)``, the infection of p1 reaches
    every later person.
    """
    if n < 2:
        raise ValueError("a chain needs at least two persons")
    people = [f"p{i}" for i in range(1, n + 1)]
    lines = [
        f"% contact chain over {n} persons",
        "combine noisy_or.",
        f"domain aids/1 {_BINARY}.",
        f"domain contact/2 {_BINARY}.",
        "pb 1: aids(p1).",
        f"pb 2: aids(X) <- aids(X), true, {_members('X', people)}.",
        f"pb 3: aids(X) <- aids(Y), contact(X, Y), true, {_members('X', people)}, {_members('Y', people)}.",
    ]
    k = 4
    for i in range(1, n):
        lines.append(f"pb {k}: contact(p{i + 1}, p{i}).")
        k += 1
    lines += [_cpt(1, 0, lambda r: 0.7), _cpt(2, 1, lambda r: 0.8 if r[0] == "yes" else 0.4)]
    lines.append(_cpt(3, 2, lambda r: 0.9 if r == ("yes", "yes") else 0.1 if r == ("no", "yes") else 0.0))
    lines += [_cpt(j, 0, lambda r: 0.6) for j in range(4, k)]
    return "\n".join(lines) + "\n"


def generate_path(n: int = 100) -> str:
    """The path program over the chain s, b1, ..., b(n-1), g with uniform CPTs.

    Edge facts are clauses 1..n; ``path(X,Y) <- e(X,Y)`` and the
    left-recursive ``path(X,Y) <- path(X,Z), e(Z,Y)`` follow as n+1 and n+2.
    """
    if n < 1:
        raise ValueError("the path program needs at least one edge")
    nodes = ["s"] + [f"b{i}" for i in range(1, n)] + ["g"]
    lines = [
        f"% path program, {n} edges from s to g, uniform CPTs",
        "combine noisy_or.",
        f"domain e/2 {_BINARY}.",
        f"domain path/2 {_BINARY}.",
    ]
    for i in range(n):
        lines.append(f"pb {i + 1}: e({nodes[i]}, {nodes[i + 1]}).")
    typed = f"{_members('X', nodes)}, {_members('Y', nodes)}"
    lines.append(f"pb {n + 1}: path(X, Y) <- e(X, Y), true, {typed}.")
    lines.append(f"pb {n + 2}: path(X, Y) <- path(X, Z), e(Z, Y), true, {typed}.")
    half = lambda r: 0.5
    lines += [_cpt(i + 1, 0, half) for i in range(n)]
    lines += [_cpt(n + 1, 1, half), _cpt(n + 2, 2, half)]
    return "\n".join(lines) + "\n"


def generate_random_ground(seed: int, atoms: int = 12, rules: int = 20) -> str:
    """A random propositional CB-only program; negation allowed.

    Atom and rule counts are drawn up to the given bounds.
    """
    rng = random.Random(seed)
    n_atoms = rng.randint(1, max(1, min(atoms, 12)))
    n_rules = rng.randint(1, max(1, min(rules, 20)))
    names = [f"q{i}" for i in range(n_atoms)]
    lines = [f"% random ground program, seed {seed}"]
    for _ in range(n_rules):
        head = rng.choice(names)
        size = rng.choice((0, 1, 1, 2, 2, 3))
        body = []
        for _ in range(size):
            a = rng.choice(names)
            body.append(f"not {a}" if rng.random() < 0.4 else a)
        lines.append(f"cb: {head} <- {', '.join(body)}." if body else f"cb: {head}.")
    return "\n".join(lines) + "\n"


def generate_random_kb(seed: int, max_constants: int = 4) -> str:
    """A small valid BKB over at most ``max_constants`` constants.

    PB predicates ``a/1``, ``b/1`` and ``r/2`` with typed rules, some of them
    recursive; CB predicates ``q/1`` and ``s/1`` with negation, used as
    context.
    """
    rng = random.Random(seed)
    consts = [f"c{i}" for i in range(rng.randint(1, max_constants))]
    pick = lambda: rng.sample(consts, rng.randint(1, len(consts)))
    lines = [f"% random BKB, seed {seed}", "combine noisy_or."]
    for pred, n in (("a", 1), ("b", 1), ("r", 2)):
        lines.append(f"domain {pred}/{n} {_BINARY}.")
    pb: list[tuple[str, int]] = []  # (text after 'pb k: ', number of influences)

    for _ in range(rng.randint(1, 4)):
        pred = rng.choice(("a", "b"))
        pb.append((f"{pred}({rng.choice(consts)}).", 0))
    for _ in range(rng.randint(0, 3)):
        pb.append((f"r({rng.choice(consts)}, {rng.choice(consts)}).", 0))

    contexts = ["", "q(X)", "not q(X)", "s(X)", "not s(X)"]
    templates = [
        ("a(X) <- b(X)", ["X"], 1),
        ("a(X) <- a(X)", ["X"], 1),
        ("b(X) <- a(Y), r(X, Y)", ["X", "Y"], 2),
        ("a(X) <- a(Y), r(Y, X)", ["X", "Y"], 2),
        ("b(X) <- b(X), a(X)", ["X"], 2),
    ]
    for _ in range(rng.randint(1, 4)):
        head, typed, n_inf = rng.choice(templates)
        ctx = rng.choice(contexts)
        parts = ["true"] + ([ctx] if ctx else []) + [_members(v, pick()) for v in typed]
        pb.append((f"{head}, {', '.join(parts)}.", n_inf))

    for k, (text, _) in enumerate(pb, start=1):
        lines.append(f"pb {k}: {text}")
    for _ in range(rng.randint(0, 4)):
        c = rng.choice(consts)
        kind = rng.randrange(4)
        if kind == 0:
            lines.append(f"cb: q({c}).")
        elif kind == 1:
            lines.append(f"cb: s({c}) <- not q({c}).")
        elif kind == 2:
            lines.append(f"cb: q({c}) <- not s({c}).")
        else:
            lines.append(f"cb: s({c}) <- s({c}).")
    for k, (_, n_inf) in enumerate(pb, start=1):
        probs = {}
        lines.append(_cpt(k, n_inf, lambda r: probs.setdefault(r, round(rng.uniform(0.05, 0.95), 3))))
    return "\n".join(lines) + "\n"
