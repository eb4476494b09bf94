"""Command-line front end: ``bkb <command> KB [options]``.

Exit codes: 0 ok, 1 domain error (diagnostics, unknown variable, bad query,
zero-probability evidence), 2 I/O or syntax error.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import os
import sys
from dataclasses import dataclass

from .cpt import FALLBACKS, PEER_AVERAGE, CPTError, build_node_cpts
from .infer import InvalidQuery, Query, ZeroEvidence, parse_query, query, unroll
from .influence import influence_clauses
from .kb import COMBINATION_RULES, KnowledgeBase, ValidationError, validate_kb
from .network import UnknownVariable, build_influence_network, build_two_slice, complete_two_slice, dumps
from .parser import ParseError, load_kb, split_atoms
from .wfs import ground_program

log = logging.getLogger("bkb")


@dataclass
class RunConfig:
    command: str
    kb: str | None = None
    top: str | None = None
    plain: bool = False
    horizon: int = 1
    fallback: str = PEER_AVERAGE
    combine: str | None = None
    format: str = "text"
    method: str = "ve"
    query: str | None = None
    with_cpts: bool = False
    count: int = 200
    seed: int = 0


class _Fail(Exception):
    def __init__(self, code: int, message: str = ""):
        super().__init__(message)
        self.code = code


def _load(cfg: RunConfig, validate: bool = True) -> KnowledgeBase:
    kb = load_kb(cfg.kb, validate=False)
    if cfg.combine:
        kb = dataclasses.replace(kb, combination=cfg.combine)
    if validate:
        diags = validate_kb(kb)
        if diags:
            raise ValidationError(diags)
    return kb


def _emit(text: str):
    sys.stdout.write(text if text.endswith("\n") or not text else text + "\n")


# ---------------------------------------------------------------------------
# commands

def cmd_check(cfg: RunConfig) -> int:
    diags = validate_kb(_load(cfg, validate=False))
    for d in diags:
        print(d)
    return 1 if diags else 0


def cmd_ground(cfg: RunConfig) -> int:
    ground = ground_program(_load(cfg))
    if cfg.format == "json":
        _emit(dumps([{"k": c.index, "clause": str(c)} for c in ground]))
    else:
        _emit("\n".join(f"{c.index}. {c}" if c.is_pb else f"cb. {c}" for c in ground))
    return 0


def cmd_influence_clauses(cfg: RunConfig) -> int:
    space = influence_clauses(_load(cfg))
    undefined = len(space.engine.undefined_context)
    if undefined:
        log.warning("%d context atom(s) were undefined and treated as not true", undefined)
    if cfg.format == "json":
        _emit(dumps({
            "variables": [str(a) for a in space.variables],
            "clauses": [ic.to_json() for ic in space.clauses],
            "undefined_context": undefined,
        }))
    else:
        _emit("\n".join(str(ic) for ic in space.clauses))
    return 0


def cmd_build(cfg: RunConfig) -> int:
    kb = _load(cfg)
    space = influence_clauses(kb)
    top = split_atoms(cfg.top) if cfg.top else None
    if cfg.plain:
        net, generalized = build_influence_network(space, top if top is not None else list(space.by_head)), None
    elif top is None:
        net, generalized = complete_two_slice(space)
    else:
        net, generalized = build_two_slice(space, top)
    log.info("top order: %s", ", ".join(map(str, net.top)))
    if cfg.format == "json":
        cpts = build_node_cpts(kb, net, generalized, cfg.fallback) if cfg.with_cpts and generalized is not None else None
        data = net.to_json(cpts)
        if generalized is not None:
            data["generalized"] = [ic.to_json() for ic in generalized]
        _emit(dumps(data))
    else:
        _emit(net.to_dot())
    return 0


def run_query(kb: KnowledgeBase, q: Query, horizon: int = 1, method: str = "ve",
              fallback: str = PEER_AVERAGE) -> tuple[float, int]:
    """Answer ``q`` on the two-slice network topped by its atoms; returns (p, horizon)."""
    space = influence_clauses(kb)
    try:
        net, generalized = build_two_slice(space, q.atoms())
    except UnknownVariable as exc:
        raise InvalidQuery(str(exc)) from exc
    cpts = build_node_cpts(kb, net, generalized, fallback)
    horizon = max(horizon, q.max_slice, 1)
    return query(unroll(net, cpts, horizon), q, method), horizon


def cmd_query(cfg: RunConfig) -> int:
    kb = _load(cfg)
    q = parse_query(cfg.query)
    p, horizon = run_query(kb, q, cfg.horizon, cfg.method, cfg.fallback)
    if cfg.format == "json":
        _emit(dumps({"query": str(q), "horizon": horizon, "method": cfg.method, "probability": p}))
    else:
        print(f"{q} = {p:.12f}")
    return 0


def cmd_selftest(cfg: RunConfig) -> int:
    from . import selftest

    results = selftest.run_all(cfg.seed, cfg.count)
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    return 0 if all(ok for _, ok, _ in results) else 1


COMMANDS = {
    "check": cmd_check,
    "ground": cmd_ground,
    "influence-clauses": cmd_influence_clauses,
    "build": cmd_build,
    "query": cmd_query,
    "selftest": cmd_selftest,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bkb", description="Bayesian knowledge bases: derive, build and query.")
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="command", required=True)

    def with_kb(name, help_, formats=("text", "json")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("kb", help="path to a .bkb file")
        p.add_argument("--combine", choices=sorted(COMBINATION_RULES), help="override the file's combination rule")
        p.add_argument("--format", choices=formats, default=formats[0])
        return p

    with_kb("check", "validate a knowledge base", formats=("text",))
    with_kb("ground", "print the ground program")
    with_kb("influence-clauses", "print the random variables' influence clauses")
    b = with_kb("build", "emit the two-slice (or plain) network", formats=("dot", "json"))
    b.add_argument("--top", help="comma-separated ground atoms; all heads when omitted")
    b.add_argument("--plain", action="store_true", help="build the influence network without cutting loops")
    b.add_argument("--fallback", choices=FALLBACKS, default=PEER_AVERAGE)
    b.add_argument("--with-cpts", action="store_true", help="embed node CPTs in JSON output")
    q = with_kb("query", "exact probability of a query")
    q.add_argument("query", help="e.g. 'P(aids(p1)@1 = yes | aids(p3)@0 = yes)'")
    q.add_argument("--T", dest="horizon", type=int, default=1, help="horizon (raised to the largest slice referenced)")
    q.add_argument("--method", choices=("ve", "enum"), default="ve")
    q.add_argument("--fallback", choices=FALLBACKS, default=PEER_AVERAGE)
    s = sub.add_parser("selftest", help="oracle-equivalence suites (seeded by BKB_SEED)")
    s.add_argument("--count", type=int, default=200)
    return ap


def parse_config(argv) -> RunConfig:
    ns = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * ns.verbose, format="%(levelname)s: %(message)s")
    fields = {f.name for f in dataclasses.fields(RunConfig)}
    cfg = RunConfig(**{k: v for k, v in vars(ns).items() if k in fields})
    if cfg.horizon < 1:
        raise _Fail(1, "--T must be at least 1")
    seed = os.environ.get("BKB_SEED")
    if seed is not None:
        try:
            cfg.seed = int(seed)
        except ValueError:
            raise _Fail(1, f"BKB_SEED must be an integer, got {seed!r}")
    return cfg


def main(argv=None) -> int:
    try:
        cfg = parse_config(argv)
        return COMMANDS[cfg.command](cfg)
    except _Fail as exc:
        print(f"bkb: {exc}", file=sys.stderr)
        return exc.code
    except OSError as exc:
        print(f"bkb: {exc}", file=sys.stderr)
        return 2
    except ParseError as exc:
        print(f"bkb: syntax error at {exc}", file=sys.stderr)
        return 2
    except ValidationError as exc:
        for d in exc.diagnostics:
            print(d, file=sys.stderr)
        return 1
    except (UnknownVariable, InvalidQuery, ZeroEvidence, CPTError) as exc:
        print(f"bkb: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
