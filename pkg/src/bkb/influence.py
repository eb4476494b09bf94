"""Random variables and influence clauses of a knowledge base."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .kb import KnowledgeBase
from .terms import Atom, Var
from .wfs import TabledEngine, WellFoundedModel, context_true, iter_ground_program


@dataclass(frozen=True)
class InfluenceClause:
    """``k. head <- body``. Body slots are atoms or :class:`StateInput` refs."""

    k: int
    head: Atom
    body: tuple = ()

    @property
    def is_unit(self) -> bool:
        return not self.body

    def __str__(self) -> str:
        if not self.body:
            return f"{self.k}. {self.head}."
        return f"{self.k}. {self.head} <- {', '.join(map(str, self.body))}."

    def to_json(self) -> dict:
        return {"k": self.k, "head": str(self.head), "body": [str(b) for b in self.body]}


@dataclass
class RandomVariableSpace:
    variables: list = field(default_factory=list)
    by_head: dict = field(default_factory=dict)
    ordered: list = field(default_factory=list)  # every clause, by (k, head, body)
    engine: TabledEngine | None = field(default=None, repr=False)

    @property
    def clauses(self) -> list[InfluenceClause]:
        return list(self.ordered)

    def parents(self, a: Atom) -> list[Atom]:
        """pa(A): body atoms over every influence clause with head ``a``."""
        out: dict = {}
        for ic in self.by_head.get(a, ()):
            out.update(dict.fromkeys(ic.body))
        return list(out)


def _gs0(kb: KnowledgeBase) -> list[Atom]:
    return [Atom(p, tuple(Var(f"X{i}") for i in range(n))) for p, n in kb.pb_head_predicates]


def random_variable_space(kb: KnowledgeBase, engine: TabledEngine | None = None) -> RandomVariableSpace:
    """S(KB): union of the answer tables of the most general PB head goals."""
    engine = engine or TabledEngine(kb)
    found: dict = {}
    for goal in _gs0(kb):
        found.update(dict.fromkeys(engine.solve(goal).answers))
    return RandomVariableSpace(sorted(found, key=kb.atom_key), engine=engine)


def influence_clauses(kb: KnowledgeBase, engine: TabledEngine | None = None) -> RandomVariableSpace:
    """S(KB) together with every influence clause, grouped by head.

    Each success branch of a most general PB head goal leaves a provenance
    record ``(k, ground influence atoms)`` on its answer; those records are
    the influence clauses.
    """
    engine = engine or TabledEngine(kb)
    space = random_variable_space(kb, engine)
    found: dict = {}
    for goal in _gs0(kb):
        table = engine.solve(goal)
        for head, records in table.provenance.items():
            for k, body in records:
                found[InfluenceClause(k, head, body)] = None
    space.ordered = _ordered(kb, found)
    space.by_head = _group(kb, space.ordered)
    return space


def _ordered(kb: KnowledgeBase, clauses: Iterable[InfluenceClause]) -> list[InfluenceClause]:
    key = lambda ic: (ic.k, kb.atom_key(ic.head), tuple(kb.atom_key(b) for b in ic.body))
    return sorted(clauses, key=key)


def _group(kb: KnowledgeBase, ordered: Iterable[InfluenceClause]) -> dict:
    by_head: dict = {}
    for ic in ordered:
        by_head.setdefault(ic.head, []).append(ic)
    return {h: by_head[h] for h in sorted(by_head, key=kb.atom_key)}


def influence_clauses_bruteforce(kb: KnowledgeBase, wfm: WellFoundedModel) -> list[InfluenceClause]:
    """Influence clauses straight from their definition, for cross-checking.

    Every ground instance of every PB clause whose influence atoms and context
    are true in ``wfm``.
    """
    out = {}
    for g in iter_ground_program(kb):
        if g.is_pb and all(a in wfm.true_set for a in g.influences) and context_true(kb, wfm, g.context):
            out[InfluenceClause(g.index, g.head, g.influences)] = None
    return _ordered(kb, out)


def direct_influence(space: RandomVariableSpace, a: Atom, b: Atom) -> set[int]:
    """Clause indices k through which ``b`` directly influences ``a``."""
    return {ic.k for ic in space.by_head.get(a, ()) if b in ic.body}


def influenced_by(space: RandomVariableSpace, a: Atom, b: Atom) -> bool:
    """Whether ``a`` is (transitively) influenced by ``b``."""
    seen = set()
    todo = list(space.parents(a))
    while todo:
        x = todo.pop()
        if x == b:
            return True
        if x in seen:
            continue
        seen.add(x)
        todo.extend(space.parents(x))
    return False
