#!/usr/bin/env python3
"""Derive and check the CPT fill of the bundled AIDS fixture.

Known numbers: P(aids(p1)=yes) = 0.7 from clause 1, P(aids(p3)=yes) = 0.74
from clause 2, a peer-average prior of 0.72 for aids(p2), and a
posterior-average prior of 0.7 built from rows drawn from {0.9, 0.7, 0.4, 0.8}.

aids(p2) has three binary parents (its own previous state, aids(p1) and
contact(p2,p1)), so its posterior has 8 rows, not 4. We pick clause 3 rows
{0.8, 0.4} and clause 4 rows {0.9, 0.1} for contact = yes (0 without contact).
Under noisy-or every row is 1 - (1-x)(1-y) and the rows range over the full
grid, so the mean is 1 - (1 - mean x)(1 - mean y) = 1 - 0.4 * 0.75 = 0.7.

The arithmetic here is done in exact fractions, independently of the
library. Run with --check to compare against the fixture file, --write to
rewrite its CPT section.
"""

import argparse
import itertools
import sys
from fractions import Fraction as F
from pathlib import Path

FIXTURE = Path(__file__).resolve().parents[1] / "src" / "bkb" / "fixtures" / "aids.bkb"

CPT1 = F(7, 10)
CPT2 = F(74, 100)
CPT3 = {"yes": F(8, 10), "no": F(4, 10)}  # P(aids(X)=yes | aids(X) prev)
CPT4 = {  # P(aids(X)=yes | aids(Y), contact(X,Y))
    ("yes", "yes"): F(9, 10),
    ("yes", "no"): F(0),
    ("no", "yes"): F(1, 10),
    ("no", "no"): F(0),
}
CPT5 = CPT6 = F(6, 10)


def noisy_or(*ps):
    q = F(1)
    for p in ps:
        q *= 1 - p
    return 1 - q


def posterior_rows():
    """P(aids(p2)=yes | own prev, aids(p1) prev, contact(p2,p1)), all 8 rows."""
    return {
        (s, a, c): noisy_or(CPT3[s], CPT4[(a, c)])
        for s, a, c in itertools.product(("yes", "no"), repeat=3)
    }


def block(k, rows):
    body = " ;\n".join(
        f"  ({', '.join(pv)}) -> yes: {float(p)!r}, no: {float(1 - p)!r}" for pv, p in rows.items()
    )
    return f"cpt {k}: {{\n{body}\n}}"


def render():
    unit = lambda k, p: f"cpt {k}: {{ () -> yes: {float(p)!r}, no: {float(1 - p)!r} }}"
    return "\n".join([
        unit(1, CPT1),
        unit(2, CPT2),
        block(3, {(v,): p for v, p in CPT3.items()}),
        block(4, CPT4),
        unit(5, CPT5),
        unit(6, CPT6),
    ])


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--check", action="store_true", help="compare the fixture's CPT section")
    ap.add_argument("--write", action="store_true", help="rewrite the fixture's CPT section")
    args = ap.parse_args(argv)

    rows = posterior_rows()
    peer = (CPT1 + CPT2) / 2
    post = sum(rows.values()) / len(rows)
    print("aids(p2) posterior rows:", ", ".join(f"{float(p):g}" for p in rows.values()))
    print(f"peer-average prior      {float(peer)!r}  (exact {peer})")
    print(f"posterior-average prior {float(post)!r}  (exact {post})")
    assert peer == F(72, 100) and post == F(7, 10)

    text = render()
    fixture = FIXTURE.read_text()
    start = fixture.index("cpt 1:")
    if args.write:
        FIXTURE.write_text(fixture[:start] + text + "\n")
        return 0
    if not args.check:
        print(text)
        return 0
    if fixture[start:].strip() != text.strip():
        print("fixture CPT section differs from the derivation", file=sys.stderr)
        return 1
    print("fixture CPT section matches")
    return 0


if __name__ == "__main__":
    sys.exit(main())
