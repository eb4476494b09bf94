"""Knowledge base value type, validation and pretty-printing."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable

from .terms import BUILTINS, Atom, Clause, Var, constants_of, term_str

COMBINATION_RULES = ("noisy_or", "min", "max")
ROW_TOLERANCE = 1e-9


class ValidationError(Exception):
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(map(str, self.diagnostics)))


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    clause: int | None = None

    def __str__(self) -> str:
        where = f"pb {self.clause}: " if self.clause is not None else ""
        return f"{where}{self.code}: {self.message}"


@dataclass(frozen=True)
class DomainDecl:
    pred: str
    arity: int
    values: tuple
    positive: str | None = None


@dataclass(frozen=True)
class RawCPT:
    """Clause-level CPT: parent value tuple -> {head value: probability}."""

    index: int
    rows: dict

    @property
    def parent_slots(self) -> int:
        return len(next(iter(self.rows))) if self.rows else 0


@dataclass(frozen=True)
class KnowledgeBase:
    pb: tuple = ()
    cb: tuple = ()
    cpts: dict = field(default_factory=dict)
    combination: str = "noisy_or"
    domains: dict = field(default_factory=dict)
    constants: tuple = ()

    @property
    def clauses(self) -> tuple:
        return self.pb + self.cb

    def clause(self, k: int) -> Clause:
        return self.pb[k - 1]

    @property
    def pb_head_predicates(self) -> list[tuple[str, int]]:
        """PB head predicate keys in first-definition order."""
        return list(dict.fromkeys(c.head.key for c in self.pb))

    @property
    def pb_predicates(self) -> set[tuple[str, int]]:
        out = {c.head.key for c in self.pb}
        for c in self.pb:
            out.update(a.key for a in c.influences)
        return out

    def domain(self, atom: Atom) -> DomainDecl:
        return self.domains[atom.key]

    @property
    def order(self) -> dict:
        """Interning order of constants and predicate symbols."""
        order = getattr(self, "_order", None)
        if order is None:
            preds = dict.fromkeys(c.head.pred for c in self.clauses)
            for c in self.clauses:
                preds.update(dict.fromkeys(a.pred for a in c.influences))
                preds.update(dict.fromkeys(l.atom.pred for l in c.context))
            order = {s: i for i, s in enumerate(itertools.chain(preds, self.constants))}
            object.__setattr__(self, "_order", order)
        return order

    def atom_key(self, atom: Atom) -> tuple:
        order = self.order
        return (order.get(atom.pred, len(order)), atom.pred, len(atom.args),
                tuple(order.get(a, len(order)) if isinstance(a, str) else -1 for a in atom.args))


def universe_of(clauses: Iterable[Clause]) -> tuple:
    """Every constant in the clauses, DOM lists included, in textual order."""
    atoms: list[Atom] = []
    for c in clauses:
        atoms.append(c.head)
        atoms.extend(c.influences)
        atoms.extend(l.atom for l in c.context)
        atoms.extend(Atom("member", (v, dom)) for v, dom in c.constraints)
    return tuple(constants_of(atoms))


def validate_kb(kb: KnowledgeBase) -> list[Diagnostic]:
    """All invariant violations of ``kb``; empty when it is well formed."""
    diags: list[Diagnostic] = []
    add = lambda code, msg, k=None: diags.append(Diagnostic(code, msg, k))

    pb_preds = kb.pb_predicates
    for k, c in enumerate(kb.pb, start=1):
        if c.index != k:
            add("index", f"clause numbered {c.index} is PB clause #{k} in file order", c.index)
    for c in kb.clauses:
        if c.head.key in BUILTINS:
            add("builtin", f"builtin {c.head.pred}/{len(c.head.args)} cannot be redefined", c.index)
        for lit in c.context:
            if lit.atom.is_builtin and not lit.positive:
                add("negated-builtin", f"'{lit}' negates a builtin", c.index)

    for c in kb.cb:
        used = [c.head, *(l.atom for l in c.context)]
        for a in used:
            if a.key in pb_preds:
                add("pb-in-cb", f"PB predicate {a.pred}/{len(a.args)} occurs in CB clause '{c}'")

    for c in kb.pb:
        k = c.index
        for lit in c.context:
            if lit.atom.key in pb_preds:
                add("pb-in-context", f"PB predicate {lit.atom.pred} used as context", k)
        constrained = {v for v, _ in c.constraints}
        for v in c.head.variables():
            if v not in constrained:
                add("untyped-head-var", f"head variable {v} has no member constraint", k)
        if c.is_unit and not c.head.is_ground():
            add("nonground-unit", f"unit clause '{c}' is not ground", k)
        for v, dom in c.constraints:
            if not isinstance(v, Var):
                add("constraint", f"member constraint on non-variable {term_str(v)}", k)

    for key in sorted(pb_preds):
        if key not in kb.domains:
            add("domain", f"no domain declared for PB predicate {key[0]}/{key[1]}")
    for d in kb.domains.values():
        if len(d.values) < 2:
            add("domain", f"domain of {d.pred}/{d.arity} needs at least two values")
        if d.positive is not None and d.positive not in d.values:
            add("domain", f"positive value {d.positive} not in domain of {d.pred}/{d.arity}")
        if kb.combination == "noisy_or" and (d.pred, d.arity) in pb_preds:
            if len(d.values) != 2 or d.positive is None:
                add("noisy-or", f"noisy_or needs a binary domain with a positive value for {d.pred}/{d.arity}")
    if kb.combination not in COMBINATION_RULES:
        add("combine", f"unknown combination rule {kb.combination}")

    for k in kb.cpts:
        if not 1 <= k <= len(kb.pb):
            add("cpt", f"CPT for nonexistent PB clause {k}", k)
    for c in kb.pb:
        diags.extend(_check_cpt(kb, c))
    return diags


def _check_cpt(kb: KnowledgeBase, c: Clause) -> list[Diagnostic]:
    k = c.index
    cpt = kb.cpts.get(k)
    if cpt is None:
        return [Diagnostic("cpt", "missing CPT block", k)]
    if c.head.key not in kb.domains or any(a.key not in kb.domains for a in c.influences):
        return []
    out = []
    head_vals = kb.domains[c.head.key].values
    parent_doms = [kb.domains[a.key].values for a in c.influences]
    for parents, dist in cpt.rows.items():
        if len(parents) != len(c.influences):
            out.append(Diagnostic("cpt", f"row {parents} has {len(parents)} parent values, expected {len(c.influences)}", k))
            continue
        bad = [v for v, dom in zip(parents, parent_doms) if v not in dom]
        if bad:
            out.append(Diagnostic("cpt", f"row {parents} uses undeclared parent values {bad}", k))
        extra = [v for v in dist if v not in head_vals]
        if extra:
            out.append(Diagnostic("cpt", f"row {parents} gives probabilities for undeclared values {extra}", k))
        if any(p < 0 or p > 1 for p in dist.values()):
            out.append(Diagnostic("cpt", f"row {parents} has a probability outside [0, 1]", k))
        if not math.isclose(sum(dist.values()), 1.0, rel_tol=0, abs_tol=ROW_TOLERANCE):
            out.append(Diagnostic("cpt", f"row {parents} sums to {sum(dist.values())!r}, not 1", k))
    for combo in itertools.product(*parent_doms):
        if combo not in cpt.rows:
            out.append(Diagnostic("cpt", f"missing row for parent values ({', '.join(combo)})", k))
    return out


# ---------------------------------------------------------------------------
# pretty-printing

def _fmt_prob(p: float) -> str:
    return repr(float(p))


def format_clause(c: Clause) -> str:
    if c.is_pb:
        return f"pb {c.index}: {c}"
    return f"cb: {c}"


def format_kb(kb: KnowledgeBase) -> str:
    """Render ``kb`` in the ``.bkb`` syntax; parsing the result gives ``kb`` back."""
    lines = [f"combine {kb.combination}."]
    for d in kb.domains.values():
        pos = f" positive {d.positive}" if d.positive is not None else ""
        lines.append(f"domain {d.pred}/{d.arity} values {{{', '.join(d.values)}}}{pos}.")
    lines.extend(format_clause(c) for c in kb.pb)
    lines.extend(format_clause(c) for c in kb.cb)
    for k in sorted(kb.cpts):
        rows = []
        for parents, dist in kb.cpts[k].rows.items():
            probs = ", ".join(f"{v}: {_fmt_prob(p)}" for v, p in dist.items())
            rows.append(f"  ({', '.join(parents)}) -> {probs}")
        lines.append(f"cpt {k}: {{\n" + " ;\n".join(rows) + "\n}")
    return "\n".join(lines) + "\n"

