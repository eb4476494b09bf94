"""Well-founded model: a ground alternating-fixpoint oracle and a tabled evaluator.

The tabled evaluator is goal directed. Calls are memoized in answer tables
keyed by variant; recursive calls consume answers from an incomplete table
instead of looping, and tables are completed per (approximate) strongly
connected component. Negation is resolved against completed tables; a
negative call on a table that is still being evaluated sits on a loop through
negation, and its truth value is taken from the alternating fixpoint.
"""

from __future__ import annotations

import itertools
import sys
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .kb import KnowledgeBase
from .terms import (
    Atom,
    Clause,
    Literal,
    Var,
    apply,
    apply_atom,
    ground_instances,
    rename_apart,
    unify,
    variant_key,
    walk,
)

TRUE, UNDEFINED, FALSE = "true", "undefined", "false"


class UnknownPredicate(LookupError):
    pass


@dataclass
class WellFoundedModel:
    true_set: set = field(default_factory=set)
    false_set: set = field(default_factory=set)
    undefined_set: set = field(default_factory=set)
    # per-round (under, over) approximations of the alternation
    trace: list = field(default_factory=list, repr=False)

    def truth(self, atom: Atom) -> str:
        if atom in self.true_set:
            return TRUE
        if atom in self.undefined_set:
            return UNDEFINED
        return FALSE


# ---------------------------------------------------------------------------
# grounding

def _builtin_holds(atom: Atom) -> bool:
    if atom.key == ("true", 0):
        return True
    x, dom = atom.args
    return x in dom


def _strip_builtins(c: Clause) -> Clause | None:
    """Drop satisfied builtins from a ground clause; ``None`` if one fails."""
    if any(v not in dom for v, dom in c.constraints):
        return None
    context = []
    for lit in c.context:
        if lit.atom.is_builtin:
            if _builtin_holds(lit.atom) != lit.positive:
                return None
        else:
            context.append(lit)
    return Clause(c.head, c.influences, tuple(context), (), c.index)


def iter_ground_program(kb: KnowledgeBase) -> Iterator[Clause]:
    """Herbrand ground instances of PB and CB whose builtins hold, lazily."""
    for c in kb.clauses:
        for g in ground_instances(c, kb.constants):
            g = _strip_builtins(g)
            if g is not None:
                yield g


def ground_program(kb: KnowledgeBase) -> list[Clause]:
    return list(iter_ground_program(kb))


def relevant_ground_program(kb: KnowledgeBase) -> list[Clause]:
    """Ground instances whose positive body atoms are all possibly derivable.

    Computed bottom-up (semi-naive, negation ignored). The dropped instances
    have a body atom that is false in the well-founded model, so the model of
    the result equals that of :func:`ground_program` on every atom.
    """
    universe = kb.constants
    plans = []
    for c in kb.clauses:
        pos = [*c.influences, *(l.atom for l in c.context if l.positive and not l.atom.is_builtin)]
        plans.append((c, pos))

    facts: dict = {}  # pred key -> set of atoms
    index: dict = {}  # (pred key, position, constant) -> list of atoms
    rules: dict = {}

    def add_fact(a: Atom, new: list):
        bucket = facts.setdefault(a.key, set())
        if a in bucket:
            return
        bucket.add(a)
        for i, t in enumerate(a.args):
            index.setdefault((a.key, i, t), []).append(a)
        new.append(a)

    def candidates(lit: Atom, s: dict):
        for i, t in enumerate(lit.args):
            t = walk(t, s)
            if not isinstance(t, Var):
                return index.get((lit.key, i, t), ())
        return facts.get(lit.key, ())

    def join(pos, j, s, pinned):
        if j == len(pos):
            yield s
            return
        lit = pos[j]
        pool = (pinned,) if j == 0 and pinned is not None else candidates(lit, s)
        for a in list(pool):
            s2 = unify(lit, a, s)
            if s2 is not None:
                yield from join(pos, j + 1, s2, pinned)

    def finish(c: Clause, s: dict, new: list):
        g = apply(s, c)
        for inst in ground_instances(g, universe):
            inst = _strip_builtins(inst)
            if inst is None or inst in rules:
                continue
            rules[inst] = None
            add_fact(inst.head, new)

    delta: list = []
    for c, pos in plans:
        if not pos:
            finish(c, {}, delta)
    while delta:
        new: list = []
        fresh = set(delta)
        for c, pos in plans:
            for i, lit in enumerate(pos):
                for a in [d for d in delta if d.key == lit.key]:
                    s = unify(lit, a, {})
                    if s is None:
                        continue
                    rest = pos[:i] + pos[i + 1:]
                    for s2 in join(rest, 0, s, None):
                        finish(c, s2, new)
        delta = [a for a in new if a not in fresh]
    return list(rules)


# ---------------------------------------------------------------------------
# alternating fixpoint

def _rule_parts(c: Clause):
    pos = list(c.influences)
    neg = []
    for lit in c.context:
        if lit.atom.is_builtin:
            if _builtin_holds(lit.atom) != lit.positive:
                return None
        elif lit.positive:
            pos.append(lit.atom)
        else:
            neg.append(lit.atom)
    if any(v not in dom for v, dom in c.constraints):
        return None
    return c.head, pos, neg


def alternating_fixpoint(ground: Iterable[Clause]) -> WellFoundedModel:
    """Well-founded model of a ground program by alternating least fixpoints.

    ``gamma(J)`` is the least model of the program with every rule having a
    negative literal on an atom of ``J`` removed. The true atoms are the
    limit of ``T <- gamma(gamma(T))`` from the empty set, the possibly-true
    atoms are ``gamma(T)`` at the limit.
    """
    atoms: dict[Atom, int] = {}
    rules = []
    for c in ground:
        parts = _rule_parts(c)
        if parts is None:
            for a in (c.head, *c.influences, *(l.atom for l in c.context if not l.atom.is_builtin)):
                atoms.setdefault(a, len(atoms))
            continue
        head, pos, neg = parts
        ids = [atoms.setdefault(a, len(atoms)) for a in (head, *pos, *neg)]
        rules.append((ids[0], ids[1:1 + len(pos)], ids[1 + len(pos):]))

    n = len(atoms)
    watch: list[list[int]] = [[] for _ in range(n)]
    for r, (_, pos, _) in enumerate(rules):
        for a in set(pos):
            watch[a].append(r)
    need = [len(set(pos)) for _, pos, _ in rules]

    def gamma(blocked: set[int]) -> set[int]:
        count = list(need)
        live = [not any(a in blocked for a in neg) for _, _, neg in rules]
        model: set[int] = set()
        todo = [r for r, (_, pos, _) in enumerate(rules) if live[r] and count[r] == 0]
        while todo:
            h = rules[todo.pop()][0]
            if h in model:
                continue
            model.add(h)
            for r in watch[h]:
                count[r] -= 1
                if count[r] == 0 and live[r]:
                    todo.append(r)
        return model

    under: set[int] = set()
    trace = []
    while True:
        over = gamma(under)
        nxt = gamma(over)
        trace.append((under, over))
        if nxt == under:
            break
        under = nxt

    names = list(atoms)
    wfm = WellFoundedModel(
        true_set={names[i] for i in under},
        false_set={names[i] for i in range(n) if i not in over},
        undefined_set={names[i] for i in over - under},
    )
    wfm.trace = [({names[i] for i in u}, {names[i] for i in o}) for u, o in trace]
    return wfm


def well_founded_model(kb: KnowledgeBase) -> WellFoundedModel:
    return alternating_fixpoint(relevant_ground_program(kb))


def context_true(kb, wfm: WellFoundedModel, lits: Sequence[Literal]) -> bool:
    """True iff every literal holds in ``wfm``; undefined counts as not true."""
    for lit in lits:
        a = lit.atom
        if a.is_builtin:
            ok = _builtin_holds(a) == lit.positive
        elif lit.positive:
            ok = a in wfm.true_set
        else:
            ok = wfm.truth(a) == FALSE
        if not ok:
            return False
    return True


# ---------------------------------------------------------------------------
# tabled evaluation

@dataclass(eq=False)
class AnswerTable:
    goal: Atom
    # answer atom -> True (true) or False (undefined); insertion ordered
    status: dict = field(default_factory=dict)
    # answer atom -> {(k, body atoms): None}
    provenance: dict = field(default_factory=dict)
    complete: bool = False
    consumers: list = field(default_factory=list, repr=False)
    dfn: int = 0
    low: int = 0

    @property
    def answers(self) -> list[Atom]:
        return [a for a, t in self.status.items() if t]

    @property
    def undefined(self) -> list[Atom]:
        return [a for a, t in self.status.items() if not t]

    def truth(self, atom: Atom) -> str:
        t = self.status.get(atom)
        return FALSE if t is None else TRUE if t else UNDEFINED


@dataclass
class _Frame:
    owner: AnswerTable
    clause: Clause
    lits: list
    s: dict


class TabledEngine:
    """Goal-directed tabled evaluator over one knowledge base.

    Tables persist across :meth:`solve` calls on the same engine.
    """

    def __init__(self, kb: KnowledgeBase, oracle: WellFoundedModel | None = None):
        self.kb = kb
        self.tables: dict = {}
        self.universe = kb.constants
        self.by_key: dict = {}
        for c in kb.clauses:
            self.by_key.setdefault(c.head.key, []).append(c)
        self._oracle = oracle
        self.oracle_calls = 0
        self.undefined_context: set = set()
        self._stack: list[AnswerTable] = []
        self._queue: deque = deque()
        self._dfn = itertools.count(1)

    @property
    def oracle(self) -> WellFoundedModel:
        if self._oracle is None:
            self._oracle = well_founded_model(self.kb)
        return self._oracle

    def solve(self, goal: Atom) -> AnswerTable:
        if goal.key not in self.by_key:
            raise UnknownPredicate(f"{goal.pred}/{len(goal.args)} is not defined in PB or CB")
        limit = sys.getrecursionlimit()
        sys.setrecursionlimit(max(limit, 20000))
        try:
            return self._call(goal, None)
        finally:
            sys.setrecursionlimit(limit)

    def truth(self, atom: Atom) -> str:
        if atom.key not in self.by_key:
            return FALSE
        return self.solve(atom).truth(atom)

    # -- scheduling
    def _call(self, goal: Atom, owner: AnswerTable | None) -> AnswerTable:
        key = variant_key(goal)
        t = self.tables.get(key)
        if t is None:
            t = AnswerTable(Atom(goal.pred, key[1]))
            self.tables[key] = t
            self._evaluate(t)
        if not t.complete and owner is not None:
            self._depend(t)
        return t

    def _depend(self, callee: AnswerTable):
        """Merge every stack entry above ``callee`` into its component."""
        for entry in reversed(self._stack):
            if entry is callee:
                break
            entry.low = min(entry.low, callee.dfn)

    def _evaluate(self, t: AnswerTable):
        t.dfn = t.low = next(self._dfn)
        self._stack.append(t)
        for clause in self.by_key.get(t.goal.key, ()):
            c = rename_apart(clause)
            s = unify(c.head, t.goal)
            if s is not None:
                self._run(_Frame(t, c, _plan(c), s), 0, s, True)
        self._drain()
        if t.low == t.dfn:
            while True:
                done = self._stack.pop()
                done.complete = True
                done.consumers.clear()
                if done is t:
                    break

    def _drain(self):
        q = self._queue
        while q:
            (frame, i, s, status, lit), answer, ans_status = q.popleft()
            s2 = unify(lit, answer, s)
            if s2 is not None:
                self._run(frame, i + 1, s2, status and ans_status)

    def _add_answer(self, t: AnswerTable, atom: Atom, status: bool, prov):
        old = t.status.get(atom)
        if old is None or (status and not old):
            assert not t.complete, f"late answer {atom} for completed table {t.goal}"
            t.status[atom] = status
            for consumer in t.consumers:
                self._queue.append((consumer, atom, status))
        if prov is not None and status:
            t.provenance.setdefault(atom, {})[prov] = None

    # -- resolution
    def _run(self, frame: _Frame, i: int, s: dict, status: bool):
        lits = frame.lits
        if i == len(lits):
            self._answer(frame, s, status)
            return
        kind, atom = lits[i]
        if kind == "member":
            x, dom = atom.args
            x = walk(x, s)
            if isinstance(x, Var):
                for c in dom:
                    self._run(frame, i + 1, {**s, x: c}, status)
            elif x in dom:
                self._run(frame, i + 1, s, status)
        elif kind == "true":
            self._run(frame, i + 1, s, status)
        elif kind in ("infl", "ctx"):
            a = apply_atom(s, atom)
            callee = self._call(a, frame.owner)
            if not callee.complete:
                callee.consumers.append((frame, i, s, status, a))
            for ans, ans_status in list(callee.status.items()):
                s2 = unify(a, ans, s)
                if s2 is not None:
                    if not ans_status and kind == "ctx":
                        self.undefined_context.add(ans)
                    self._run(frame, i + 1, s2, status and ans_status)
        else:  # negative literal
            a = apply_atom(s, atom)
            free = a.variables()
            if free:
                for combo in itertools.product(self.universe, repeat=len(free)):
                    s2 = {**s, **dict(zip(free, combo))}
                    self._run(frame, i, s2, status)
                return
            value = self._negative(a, frame.owner)
            if value == TRUE:
                return
            if value == UNDEFINED:
                self.undefined_context.add(a)
            self._run(frame, i + 1, s, status and value == FALSE)

    def _negative(self, a: Atom, owner: AnswerTable) -> str:
        if a.key not in self.by_key:
            return FALSE
        t = self.tables.get(variant_key(a))
        if t is None:
            t = AnswerTable(a)
            self.tables[variant_key(a)] = t
            self._evaluate(t)
        if t.complete:
            return t.truth(a)
        self.oracle_calls += 1
        return self.oracle.truth(a)

    def _answer(self, frame: _Frame, s: dict, status: bool):
        c = frame.clause
        head = apply_atom(s, c.head)
        free = head.variables()
        heads = [head] if not free else [
            apply_atom(dict(zip(free, combo)), head)
            for combo in itertools.product(self.universe, repeat=len(free))
        ]
        prov = (c.index, tuple(apply_atom(s, a) for a in c.influences)) if c.is_pb else None
        for h in heads:
            self._add_answer(frame.owner, h, status, prov)


def _plan(c: Clause) -> list:
    """Literal evaluation order: influences, positive context, members, negations."""
    plan = [("infl", a) for a in c.influences]
    negs = []
    for lit in c.context:
        a = lit.atom
        if a.key == ("true", 0):
            continue
        if a.key == ("member", 2):
            plan.append(("member", a))
        elif lit.positive:
            plan.append(("ctx", a))
        else:
            negs.append(("neg", a))
    plan += [("member", Atom("member", (v, dom))) for v, dom in c.constraints]
    return plan + negs


def slg_solve(kb: KnowledgeBase, goal: Atom, engine: TabledEngine | None = None) -> AnswerTable:
    """Evaluate ``goal`` by tabled resolution; subsidiary tables stay on the engine."""
    return (engine or TabledEngine(kb)).solve(goal)


def tabled_model(kb: KnowledgeBase, atoms: Iterable[Atom], engine: TabledEngine | None = None) -> WellFoundedModel:
    """Classify ground ``atoms`` with the tabled evaluator."""
    engine = engine or TabledEngine(kb)
    wfm = WellFoundedModel()
    for a in atoms:
        {TRUE: wfm.true_set, FALSE: wfm.false_set, UNDEFINED: wfm.undefined_set}[engine.truth(a)].add(a)
    return wfm
