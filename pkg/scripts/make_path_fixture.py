#!/usr/bin/env python3
"""Write the path-program fixture: 100 edges s -> b1 -> ... -> b99 -> g."""

import argparse
from pathlib import Path

from bkb.generators import generate_path

OUT = Path(__file__).resolve().parents[1] / "src" / "bkb" / "fixtures" / "path.bkb"


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--edges", type=int, default=100)
    ap.add_argument("--out", type=Path, default=OUT)
    args = ap.parse_args(argv)
    args.out.write_text(generate_path(args.edges))
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
