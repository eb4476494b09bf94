"""Influence networks and two-slice DBN structures built from influence clauses."""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

from .influence import InfluenceClause, RandomVariableSpace
from .terms import Atom


class UnknownVariable(LookupError):
    pass


@dataclass(frozen=True)
class StateInput:
    """Previous-slice copy of a state variable."""

    atom: Atom

    def __str__(self) -> str:
        return f"{self.atom}@t-1"


def node_name(node) -> str:
    return str(node)


@dataclass
class InfluenceNetwork:
    kind: str = "plain"
    nodes: list = field(default_factory=list)
    # (child, parent, k) in insertion order; child is always a variable node
    edges: list = field(default_factory=list)
    # variable node -> clause indices of its unit (prior) clauses
    priors: dict = field(default_factory=dict)
    top: list = field(default_factory=list)

    def __post_init__(self):
        self._node_set = set(self.nodes)
        self._parents: dict = {}
        for child, parent, _ in self.edges:
            self._parents.setdefault(child, []).append(parent)

    def add_node(self, node):
        if node not in self._node_set:
            self._node_set.add(node)
            self.nodes.append(node)

    def add_edge(self, child, parent, k: int):
        self.edges.append((child, parent, k))
        self._parents.setdefault(child, []).append(parent)

    def __contains__(self, node) -> bool:
        return node in self._node_set

    @property
    def variables(self) -> list[Atom]:
        return [n for n in self.nodes if not isinstance(n, StateInput)]

    @property
    def state_inputs(self) -> list[StateInput]:
        return [n for n in self.nodes if isinstance(n, StateInput)]

    @property
    def state_variables(self) -> list[Atom]:
        return [s.atom for s in self.state_inputs]

    def parents(self, node) -> list:
        """Distinct parents of ``node`` in edge insertion order."""
        return list(dict.fromkeys(self._parents.get(node, ())))

    def reaches(self, src, dst) -> bool:
        """Whether a directed path parent -> ... -> child leads from ``src`` to ``dst``."""
        seen = set()
        todo = [dst]
        while todo:
            n = todo.pop()
            if n == src:
                return True
            if n in seen:
                continue
            seen.add(n)
            todo.extend(self._parents.get(n, ()))
        return False

    def topological_order(self) -> list:
        """Parents before children; raises ``ValueError`` on a directed cycle."""
        indeg = {n: 0 for n in self.nodes}
        children: dict = {n: [] for n in self.nodes}
        for child, parent, _ in self.edges:
            indeg[child] += 1
            children[parent].append(child)
        ready = deque(n for n in self.nodes if indeg[n] == 0)
        out = []
        while ready:
            n = ready.popleft()
            out.append(n)
            for c in children[n]:
                indeg[c] -= 1
                if indeg[c] == 0:
                    ready.append(c)
        if len(out) != len(self.nodes):
            raise ValueError("network has a directed cycle")
        return out

    def is_acyclic(self) -> bool:
        try:
            self.topological_order()
        except ValueError:
            return False
        return True

    def edge_multiset(self) -> dict:
        out: dict = {}
        for e in self.edges:
            key = tuple(map(str, e[:2])) + (e[2],)
            out[key] = out.get(key, 0) + 1
        return out

    # -- export
    def to_json(self, cpts: dict | None = None) -> dict:
        data = {
            "kind": self.kind,
            "top": [str(a) for a in self.top],
            "nodes": [
                {"id": str(n), "type": "state_input" if isinstance(n, StateInput) else "variable",
                 **({"priors": self.priors[n]} if n in self.priors else {})}
                for n in self.nodes
            ],
            "edges": [{"child": str(c), "parent": str(p), "k": k} for c, p, k in self.edges],
        }
        if cpts is not None:
            from .cpt import cpts_to_json
            data["cpts"] = cpts_to_json(self, cpts)
        return data

    def to_dot(self) -> str:
        lines = [f"digraph {'two_slice' if self.kind == 'two-slice' else 'influence'} {{", "  rankdir=BT;"]
        for n in self.nodes:
            style = "dashed" if isinstance(n, StateInput) else "solid"
            extra = ""
            if n in self.priors:
                extra = f', xlabel="{",".join(map(str, self.priors[n]))}"'
            lines.append(f'  "{n}" [shape=ellipse, style={style}{extra}];')
        for child, parent, k in self.edges:
            style = ", style=dashed" if isinstance(parent, StateInput) else ""
            lines.append(f'  "{parent}" -> "{child}" [label="{k}"{style}];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def dumps(data) -> str:
    return json.dumps(data, indent=2) + "\n"


def _build(space: RandomVariableSpace, top: Iterable[Atom], cut: bool):
    top = list(dict.fromkeys(top))
    for a in top:
        if a not in space.by_head:
            raise UnknownVariable(f"{a} heads no influence clause")
    net = InfluenceNetwork(kind="two-slice" if cut else "plain", top=list(top))
    generalized: list[InfluenceClause] = []
    queue = deque(top)
    for a in top:
        net.add_node(a)
    while queue:
        a = queue.popleft()
        for ic in space.by_head[a]:
            if ic.is_unit:
                net.priors.setdefault(a, []).append(ic.k)
                generalized.append(ic)
                continue
            body = []
            for b in ic.body:
                if b not in net:
                    net.add_node(b)
                    queue.append(b)
                parent = b
                if cut and net.reaches(a, b):
                    parent = StateInput(b)
                    net.add_node(parent)
                net.add_edge(a, parent, ic.k)
                body.append(parent)
            generalized.append(InfluenceClause(ic.k, a, tuple(body)))
    return net, generalized


def build_influence_network(space: RandomVariableSpace, top: Iterable[Atom]) -> InfluenceNetwork:
    """Backward-chain from ``top`` (FIFO) adding every influence clause as edges."""
    return _build(space, top, cut=False)[0]


def build_two_slice(space: RandomVariableSpace, top: Iterable[Atom]):
    """Like :func:`build_influence_network`, cutting loops at state input nodes.

    An edge ``a <-k- b`` that would close a directed cycle (a self-loop
    included) is attached to ``b@t-1`` instead. Returns the network and the
    generalized influence clauses with those body slots rewritten.
    """
    return _build(space, top, cut=True)


def complete_two_slice(space: RandomVariableSpace):
    """Two-slice structure covering every random variable."""
    return build_two_slice(space, list(space.by_head))
