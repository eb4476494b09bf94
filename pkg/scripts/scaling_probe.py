#!/usr/bin/env python3
"""Time influence-clause extraction on contact chains of growing length.

Prints the wall time per size and the ratio at every doubling. A
polynomial procedure keeps those ratios bounded; cubic growth gives about 8.
"""

import argparse
import time

from bkb.generators import generate_chain
from bkb.influence import influence_clauses
from bkb.parser import parse_kb


def probe(sizes, repeats=3):
    rows = []
    for n in sizes:
        kb = parse_kb(generate_chain(n))
        best = float("inf")
        for _ in range(repeats):
            t0 = time.perf_counter()
            space = influence_clauses(kb)
            best = min(best, time.perf_counter() - t0)
        rows.append((n, len(space.variables), len(space.clauses), best))
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[25, 50, 100, 200])
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args(argv)
    rows = probe(args.sizes, args.repeats)
    print(f"{'n':>5} {'vars':>6} {'clauses':>8} {'seconds':>9} {'ratio':>6}")
    prev = None
    for n, nv, nc, t in rows:
        ratio = f"{t / prev:6.2f}" if prev else "     -"
        print(f"{n:>5} {nv:>6} {nc:>8} {t:>9.4f} {ratio}")
        prev = t


if __name__ == "__main__":
    main()
