"""Unrolling two-slice networks over a finite horizon and exact queries."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .cpt import NetworkCPTs, NodeCPT
from .network import InfluenceNetwork, StateInput
from .parser import ParseError, _Parser
from .terms import Atom


class InvalidQuery(ValueError):
    pass


class ZeroEvidence(ValueError):
    pass


class IncompleteAssignment(ValueError):
    pass


@dataclass
class UnrolledNetwork:
    horizon: int
    nodes: list = field(default_factory=list)  # (atom, slice) in topological order
    parents: dict = field(default_factory=dict)  # copy -> [parent copies]
    cpts: dict = field(default_factory=dict)  # copy -> NodeCPT (rows keyed like parents)
    domains: dict = field(default_factory=dict)  # copy -> value tuple

    def edges(self) -> list:
        return [(c, p) for c in self.nodes for p in self.parents[c]]

    def slice(self, t: int) -> list:
        return [n for n in self.nodes if n[1] == t]


def unroll(two_slice: InfluenceNetwork, cpts: NetworkCPTs, horizon: int) -> UnrolledNetwork:
    """Stationary DBN over slices ``0..horizon``.

    Slice 0 holds the state variables with their slice-0 priors. Every later
    slice repeats the two-slice network, state input parents pointing at the
    previous slice.
    """
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    order = two_slice.topological_order()
    un = UnrolledNetwork(horizon)
    for sv in two_slice.state_variables:
        copy = (sv, 0)
        un.nodes.append(copy)
        un.parents[copy] = []
        un.cpts[copy] = cpts.initial[sv]
        un.domains[copy] = cpts.domains[sv]
    for t in range(1, horizon + 1):
        for node in order:
            if isinstance(node, StateInput):
                continue
            copy = (node, t)
            cpt = cpts.attached[node]
            un.nodes.append(copy)
            un.parents[copy] = [(p.atom, t - 1) if isinstance(p, StateInput) else (p, t) for p in cpt.parents]
            un.cpts[copy] = cpt
            un.domains[copy] = cpts.domains[node]
    return un


def joint_probability(un: UnrolledNetwork, assignment: dict) -> float:
    """Product over node copies of P(copy | parents) under ``assignment``."""
    missing = [n for n in un.nodes if n not in assignment]
    if missing:
        raise IncompleteAssignment(f"no value for {_copy_str(missing[0])}")
    p = 1.0
    for n in un.nodes:
        row = un.cpts[n].table[tuple(assignment[q] for q in un.parents[n])]
        p *= row[assignment[n]]
        if p == 0.0:
            break
    return p


# ---------------------------------------------------------------------------
# queries

@dataclass(frozen=True)
class Query:
    targets: tuple  # ((atom, slice, value), ...)
    evidence: tuple = ()

    @property
    def max_slice(self) -> int:
        return max(t for _, t, _ in self.targets + self.evidence)

    def atoms(self) -> list[Atom]:
        return list(dict.fromkeys(a for a, _, _ in self.targets + self.evidence))

    def __str__(self) -> str:
        fmt = lambda items: ", ".join(f"{a}@{t} = {v}" for a, t, v in items)
        if self.evidence:
            return f"P({fmt(self.targets)} | {fmt(self.evidence)})"
        return f"P({fmt(self.targets)})"


def parse_query(text: str) -> Query:
    """Parse ``P(atom@slice = value, ... | atom@slice = value, ...)``."""
    p = _Parser(text)

    def assignments():
        out = []
        while True:
            atom = p.atom()
            if not atom.is_ground():
                p.error("query atoms must be ground")
            p.expect("@")
            t = p.integer()
            p.expect("=")
            out.append((atom, t, p.name("a value")))
            if not p.at(","):
                return tuple(out)
            p.advance()

    try:
        if p.tok.text != "P":
            p.error("a query starts with 'P('")
        p.advance()
        p.expect("(")
        targets = assignments()
        evidence = ()
        if p.at("|"):
            p.advance()
            evidence = assignments()
        p.expect(")")
        if p.tok.kind != "eof":
            p.error("trailing input after query")
    except ParseError as exc:
        raise InvalidQuery(str(exc)) from exc
    return Query(targets, evidence)


def _copy_str(copy) -> str:
    return f"{copy[0]}@{copy[1]}"


def _check(un: UnrolledNetwork, q: Query) -> list:
    out = []
    for atom, t, v in q.targets + q.evidence:
        copy = (atom, t)
        if t > un.horizon:
            raise InvalidQuery(f"{_copy_str(copy)} lies beyond the horizon {un.horizon}")
        if copy not in un.domains:
            raise InvalidQuery(f"{_copy_str(copy)} is not a node of the unrolled network")
        if v not in un.domains[copy]:
            raise InvalidQuery(f"{v} is not a value of {atom}")
        out.append((copy, v))
    return out


def query(un: UnrolledNetwork, q: Query, method: str = "ve") -> float:
    """P(targets | evidence), exactly."""
    if method == "ve":
        return query_ve(un, q)
    if method == "enum":
        return query_enum(un, q)
    raise ValueError(f"unknown inference method {method}")


def query_enum(un: UnrolledNetwork, q: Query) -> float:
    """Sum the joint over every full assignment (exponential; for checking)."""
    items = _check(un, q)
    targets, evidence = items[:len(q.targets)], items[len(q.targets):]
    num = den = 0.0
    nodes = un.nodes
    for combo in itertools.product(*(un.domains[n] for n in nodes)):
        a = dict(zip(nodes, combo))
        if any(a[c] != v for c, v in evidence):
            continue
        p = joint_probability(un, a)
        den += p
        if all(a[c] == v for c, v in targets):
            num += p
    if den == 0.0:
        raise ZeroEvidence(f"evidence of {q} has probability zero")
    return num / den


class _Factor:
    __slots__ = ("vars", "table")

    def __init__(self, vars_, table):
        self.vars = list(vars_)
        self.table = table

    def multiply(self, other: "_Factor") -> "_Factor":
        vars_ = self.vars + [v for v in other.vars if v not in self.vars]
        letters = {v: chr(ord("a") + i) if i < 26 else chr(ord("A") + i - 26) for i, v in enumerate(vars_)}
        spec = "".join(letters[v] for v in self.vars) + "," + "".join(letters[v] for v in other.vars)
        spec += "->" + "".join(letters[v] for v in vars_)
        return _Factor(vars_, np.einsum(spec, self.table, other.table))

    def sum_out(self, var) -> "_Factor":
        i = self.vars.index(var)
        return _Factor(self.vars[:i] + self.vars[i + 1:], self.table.sum(axis=i))


def _factor(un: UnrolledNetwork, copy, fixed: dict) -> _Factor:
    cpt: NodeCPT = un.cpts[copy]
    scope = [copy] + un.parents[copy]
    doms = [un.domains[v] for v in scope]
    table = np.zeros([len(d) for d in doms])
    for idx in itertools.product(*(range(len(d)) for d in doms)):
        vals = [d[i] for d, i in zip(doms, idx)]
        table[idx] = cpt.table[tuple(vals[1:])][vals[0]]
    # instantiate evidence by slicing
    keep, index = [], []
    for v, d in zip(scope, doms):
        if v in fixed:
            index.append(d.index(fixed[v]))
        else:
            index.append(slice(None))
            keep.append(v)
    return _Factor(keep, table[tuple(index)])


def _min_degree_order(factors: list, hidden: list) -> list:
    nb: dict = {}
    for f in factors:
        for v in f.vars:
            nb.setdefault(v, set()).update(w for w in f.vars if w != v)
    rank = {v: i for i, v in enumerate(hidden)}
    remaining = set(hidden)
    order = []
    while remaining:
        v = min(remaining, key=lambda x: (len(nb.get(x, ())), rank[x]))
        order.append(v)
        remaining.discard(v)
        around = nb.pop(v, set())
        for w in around:
            nb[w] |= around - {w}
            nb[w].discard(v)
    return order


def _posterior_table(un: UnrolledNetwork, query_vars: list, fixed: dict) -> _Factor:
    factors = [_factor(un, n, fixed) for n in un.nodes]
    hidden = [n for n in un.nodes if n not in fixed and n not in query_vars]
    for v in _min_degree_order(factors, hidden):
        touching = [f for f in factors if v in f.vars]
        if not touching:
            continue
        factors = [f for f in factors if v not in f.vars]
        prod = touching[0]
        for f in touching[1:]:
            prod = prod.multiply(f)
        factors.append(prod.sum_out(v))
    result = _Factor([], np.array(1.0))
    for f in factors:
        result = result.multiply(f)
    return result


def query_ve(un: UnrolledNetwork, q: Query) -> float:
    """Variable elimination with a min-degree ordering."""
    items = _check(un, q)
    targets, evidence = items[:len(q.targets)], items[len(q.targets):]
    fixed: dict = {}
    for copy, v in evidence:
        if fixed.setdefault(copy, v) != v:
            raise ZeroEvidence(f"conflicting evidence on {_copy_str(copy)}")
    wanted: dict = {}
    for copy, v in targets:
        if copy in fixed:
            if fixed[copy] != v:
                return _zero_or_raise(un, fixed)
            continue
        if wanted.setdefault(copy, v) != v:
            return _zero_or_raise(un, fixed)
    qvars = list(wanted)
    result = _posterior_table(un, qvars, fixed)
    total = float(result.table.sum())
    if total == 0.0:
        raise ZeroEvidence(f"evidence of {q} has probability zero")
    idx = tuple(un.domains[v].index(wanted[v]) for v in result.vars)
    return float(result.table[idx]) / total


def _zero_or_raise(un: UnrolledNetwork, fixed: dict) -> float:
    if float(_posterior_table(un, [], fixed).table.sum()) == 0.0:
        raise ZeroEvidence("evidence has probability zero")
    return 0.0
