"""Per-node CPTs assembled from clause CPTs with a combination rule."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

from .kb import DomainDecl, KnowledgeBase
from .network import InfluenceNetwork, StateInput
from .terms import Atom

PEER_AVERAGE, POSTERIOR_AVERAGE = "peer-average", "posterior-average"
FALLBACKS = (PEER_AVERAGE, POSTERIOR_AVERAGE)


class CPTError(ValueError):
    pass


class DomainMismatch(CPTError):
    pass


class NoisyOrNonBinary(CPTError):
    pass


class MissingPrior(CPTError):
    pass


@dataclass
class NodeCPT:
    node: Atom
    parents: list
    table: dict  # parent value tuple -> {value: probability}
    flavor: str  # "prior" | "posterior"

    def row(self, parent_values: Sequence[str]) -> dict:
        return self.table[tuple(parent_values)]


@dataclass
class NetworkCPTs:
    attached: dict = field(default_factory=dict)  # variable node -> NodeCPT
    initial: dict = field(default_factory=dict)  # state variable -> slice-0 prior NodeCPT
    synthesized: set = field(default_factory=set)  # state variables whose prior was averaged
    domains: dict = field(default_factory=dict)  # variable node -> value tuple


def combine(rule: str, contributions: Sequence[dict], domain: DomainDecl) -> dict:
    """Merge clause-level distributions over ``domain`` into one."""
    if not contributions:
        raise CPTError("nothing to combine")
    values = domain.values
    for c in contributions:
        if any(v not in values for v in c):
            raise DomainMismatch(f"distribution {c} is not over {values}")
    if len(contributions) == 1:
        return {v: float(contributions[0].get(v, 0.0)) for v in values}
    if rule == "noisy_or":
        if len(values) != 2 or domain.positive is None:
            raise NoisyOrNonBinary(f"noisy_or needs a binary domain with a positive value, got {values}")
        pos = domain.positive
        neg = values[1] if values[0] == pos else values[0]
        q = math.prod(1.0 - c.get(pos, 0.0) for c in contributions)
        dist = {pos: 1.0 - q, neg: q}
        return {v: dist[v] for v in values}
    if rule in ("min", "max"):
        pick = min if rule == "min" else max
        raw = {v: pick(c.get(v, 0.0) for c in contributions) for v in values}
        total = sum(raw.values())
        if total <= 0:
            raise CPTError(f"{rule} of {list(contributions)} is zero everywhere")
        return {v: p / total for v, p in raw.items()}
    raise CPTError(f"unknown combination rule {rule}")


def posterior_average_prior(posterior: NodeCPT, domain: DomainDecl) -> dict:
    """Mean over the posterior's rows, per value, renormalized."""
    rows = list(posterior.table.values())
    if not rows:
        raise MissingPrior(f"{posterior.node} has an empty posterior")
    mean = {v: sum(r.get(v, 0.0) for r in rows) / len(rows) for v in domain.values}
    total = sum(mean.values())
    return {v: p / total for v, p in mean.items()}


def _atom(node) -> Atom:
    return node.atom if isinstance(node, StateInput) else node


def build_node_cpts(kb: KnowledgeBase, network: InfluenceNetwork, generalized,
                    fallback: str = PEER_AVERAGE) -> NetworkCPTs:
    """Attach a CPT to every variable node and a slice-0 prior to every state variable."""
    if fallback not in FALLBACKS:
        raise ValueError(f"fallback must be one of {FALLBACKS}")
    rule = kb.combination
    non_unit: dict = {}
    for ic in generalized:
        if not ic.is_unit:
            non_unit.setdefault(ic.head, []).append(ic)

    out = NetworkCPTs()
    priors: dict = {}
    for node in network.variables:
        dom = kb.domain(node)
        out.domains[node] = dom.values
        if network.priors.get(node):
            dist = combine(rule, [kb.cpts[k].rows[()] for k in network.priors[node]], dom)
            priors[node] = NodeCPT(node, [], {(): dist}, "prior")
        if node in non_unit:
            parents = network.parents(node)
            doms = [kb.domain(_atom(p)).values for p in parents]
            table = {}
            for combo in itertools.product(*doms):
                assign = dict(zip(parents, combo))
                rows = [kb.cpts[ic.k].rows[tuple(assign[b] for b in ic.body)] for ic in non_unit[node]]
                table[combo] = combine(rule, rows, dom)
            out.attached[node] = NodeCPT(node, parents, table, "posterior")
        elif node in priors:
            out.attached[node] = priors[node]
        else:
            raise MissingPrior(f"{node} has no influence clause in the network")

    for sv in network.state_variables:
        if sv in priors:
            out.initial[sv] = priors[sv]
            continue
        dom = kb.domain(sv)
        if fallback == PEER_AVERAGE:
            peers = [priors[p] for p in network.state_variables if p != sv and p in priors and p.key == sv.key]
            if not peers:
                raise MissingPrior(f"state variable {sv} has no prior and no peer with one")
            mean = {v: sum(p.table[()][v] for p in peers) / len(peers) for v in dom.values}
            total = sum(mean.values())
            dist = {v: p / total for v, p in mean.items()}
        else:
            dist = posterior_average_prior(out.attached[sv], dom)
        out.initial[sv] = NodeCPT(sv, [], {(): dist}, "prior")
        out.synthesized.add(sv)
    return out


def cpts_to_json(network: InfluenceNetwork, cpts: NetworkCPTs) -> list:
    def rows(cpt: NodeCPT):
        return [{"parents": list(pv), "dist": dict(d)} for pv, d in cpt.table.items()]

    out = []
    for node in network.variables:
        cpt = cpts.attached[node]
        entry = {"node": str(node), "flavor": cpt.flavor, "parents": [str(p) for p in cpt.parents], "rows": rows(cpt)}
        if node in cpts.initial:
            init = cpts.initial[node]
            entry["initial"] = {"synthesized": node in cpts.synthesized, "dist": dict(init.table[()])}
        out.append(entry)
    return out
