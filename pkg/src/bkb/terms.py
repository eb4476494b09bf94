"""Terms, atoms, clauses and unification for the Datalog-plus-member fragment.

Constants are plain strings, variables are :class:`Var` and the only compound
term is a constant list (a tuple of strings) used as the second argument of
``member/2``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from typing import Iterable, Iterator, Mapping, Sequence, Union

BUILTINS = {("true", 0), ("member", 2)}


@dataclass(frozen=True, slots=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


# A term is a constant (str), a variable, or a non-empty tuple of constants.
Term = Union[str, Var, tuple]
Substitution = dict


@dataclass(frozen=True, slots=True)
class Atom:
    pred: str
    args: tuple = ()

    @property
    def key(self) -> tuple[str, int]:
        return (self.pred, len(self.args))

    @property
    def is_builtin(self) -> bool:
        return self.key in BUILTINS

    def is_ground(self) -> bool:
        return not any(_has_var(a) for a in self.args)

    def variables(self) -> list[Var]:
        out: list[Var] = []
        for a in self.args:
            if isinstance(a, Var) and a not in out:
                out.append(a)
        return out

    def __str__(self) -> str:
        if not self.args:
            return self.pred
        return f"{self.pred}({','.join(term_str(a) for a in self.args)})"


TRUE = Atom("true")


@dataclass(frozen=True, slots=True)
class Literal:
    atom: Atom
    positive: bool = True

    def __str__(self) -> str:
        return str(self.atom) if self.positive else f"not {self.atom}"


@dataclass(frozen=True)
class Clause:
    """A PB clause (``index`` = k >= 1) or a CB clause (``index`` = None).

    ``constraints`` holds the ``member(X, [c1, ..., cn])`` type constraints
    of a PB clause as ``(Var, tuple_of_constants)`` pairs.
    """

    head: Atom
    influences: tuple = ()
    context: tuple = ()
    constraints: tuple = ()
    index: int | None = None

    @property
    def is_pb(self) -> bool:
        return self.index is not None

    @property
    def is_unit(self) -> bool:
        return not (self.influences or self.context or self.constraints)

    def variables(self) -> list[Var]:
        out: list[Var] = []
        atoms = [self.head, *self.influences, *(lit.atom for lit in self.context)]
        atoms += [Atom("member", (v, dom)) for v, dom in self.constraints]
        for atom in atoms:
            for v in atom.variables():
                if v not in out:
                    out.append(v)
        return out

    def is_ground(self) -> bool:
        return not self.variables()

    def body_literals(self) -> list[Literal]:
        """Full body in the written order ``influences, true, context, members``."""
        lits = [Literal(a) for a in self.influences]
        if self.is_pb and not self.is_unit:
            lits.append(Literal(TRUE))
        lits += list(self.context)
        lits += [Literal(Atom("member", (v, dom))) for v, dom in self.constraints]
        return lits

    def __str__(self) -> str:
        body = self.body_literals()
        if not body:
            return f"{self.head}."
        return f"{self.head} <- {', '.join(map(str, body))}."


def term_str(t: Term) -> str:
    if isinstance(t, tuple):
        return "[" + ",".join(t) + "]"
    return str(t)


def _has_var(t: Term) -> bool:
    return isinstance(t, Var)


# ---------------------------------------------------------------------------
# substitutions

def walk(t: Term, s: Mapping) -> Term:
    while isinstance(t, Var) and t in s:
        t = s[t]
    return t


def _bind(s: dict, v: Var, t: Term) -> dict:
    """Extend ``s`` with ``v -> t`` keeping it idempotent."""
    out = {}
    for k, val in s.items():
        out[k] = t if val == v else val
    out[v] = t
    return out


def unify(a: Atom, b: Atom, s: Mapping | None = None) -> dict | None:
    """Most general unifier of two atoms, or ``None`` when they clash.

    The returned substitution is idempotent. An optional ``s`` is extended.
    """
    if a.pred != b.pred or len(a.args) != len(b.args):
        return None
    out = dict(s) if s else {}
    for x, y in zip(a.args, b.args):
        x, y = walk(x, out), walk(y, out)
        if x == y:
            continue
        if isinstance(x, Var):
            out = _bind(out, x, y)
        elif isinstance(y, Var):
            out = _bind(out, y, x)
        else:
            return None
    return out


def apply_term(s: Mapping, t: Term) -> Term:
    return walk(t, s) if isinstance(t, Var) else t


def apply_atom(s: Mapping, a: Atom) -> Atom:
    if not s or not a.args:
        return a
    return Atom(a.pred, tuple(apply_term(s, t) for t in a.args))


def apply(s: Mapping, c):
    """Apply a substitution to an atom, literal or clause."""
    if isinstance(c, Atom):
        return apply_atom(s, c)
    if isinstance(c, Literal):
        return Literal(apply_atom(s, c.atom), c.positive)
    if isinstance(c, Clause):
        return replace(
            c,
            head=apply_atom(s, c.head),
            influences=tuple(apply_atom(s, a) for a in c.influences),
            context=tuple(Literal(apply_atom(s, l.atom), l.positive) for l in c.context),
            constraints=tuple((apply_term(s, v), dom) for v, dom in c.constraints),
        )
    raise TypeError(f"cannot apply a substitution to {type(c).__name__}")


_fresh = itertools.count()


def rename_apart(c: Clause) -> Clause:
    """Standardize a clause apart with globally fresh variable names."""
    n = next(_fresh)
    return apply({v: Var(f"{v.name}_{n}") for v in c.variables()}, c)


def variant_key(a: Atom) -> tuple:
    """Key equal for atoms that are variants (equal up to variable renaming)."""
    seen: dict[Var, int] = {}
    args = []
    for t in a.args:
        if isinstance(t, Var):
            args.append(Var(f"_{seen.setdefault(t, len(seen))}"))
        else:
            args.append(t)
    return (a.pred, tuple(args))


def ground_instances(c: Clause, universe: Sequence[str]) -> Iterator[Clause]:
    """All Herbrand ground instances of ``c`` over ``universe``.

    Variables vary in first-occurrence order (last one fastest), constants in
    the order given.
    """
    vs = c.variables()
    if not vs:
        yield c
        return
    for combo in itertools.product(universe, repeat=len(vs)):
        yield apply(dict(zip(vs, combo)), c)


def constants_of(atoms: Iterable[Atom]) -> list[str]:
    out: dict[str, None] = {}
    for a in atoms:
        for t in a.args:
            if isinstance(t, tuple):
                out.update(dict.fromkeys(t))
            elif isinstance(t, str):
                out[t] = None
    return list(out)
