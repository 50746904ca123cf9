#!/usr/bin/env python3
"""Write Gram-matrix fixtures for root lattices and reduced binary forms.

Files use the text format read by `sextic discr`: a "rank n" header, then
n rows of integers, with an optional leading comment.

Usage:
    python scripts/export_fixtures.py E6 D4 A2
    python scripts/export_fixtures.py "M(4,2,5)" "M(6,0,12)" --out data/fixtures
"""

import argparse
import sys
from pathlib import Path

from sextic.errors import SexticError
from sextic.lattice import GramLattice, write_gram
from sextic.rank2 import parse_reduced
from sextic.rootdata import make_root_lattice

REPO_ROOT = Path(__file__).resolve().parents[1]
FIXTURES_DIR = REPO_ROOT / "data" / "fixtures"


def fixture_for(name: str) -> tuple[str, str, GramLattice]:
    """(file stem, comment, lattice) for a root system symbol or M(a,b,c)."""
    if name.strip().startswith("M"):
        m = parse_reduced(name)
        return f"M_{m.a}_{m.b}_{m.c}", str(m), m.lattice
    return name.upper(), f"{name.upper()}, negative definite", make_root_lattice(name)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("names", nargs="+", help='Root system symbols or reduced forms "M(a,b,c)"')
    parser.add_argument("--out", type=Path, default=FIXTURES_DIR)
    parser.add_argument("--force", action="store_true", help="Overwrite existing files")
    args = parser.parse_args()

    args.out.mkdir(parents=True, exist_ok=True)
    written = 0
    for name in args.names:
        try:
            stem, comment, lattice = fixture_for(name)
        except SexticError as exc:
            print(f"error: {exc}", file=sys.stderr, flush=True)
            return exc.exit_code
        path = args.out / f"{stem}.gram"
        if path.exists() and not args.force:
            print(f"skip   {path} (exists)", flush=True)
            continue
        write_gram(path, lattice, comment)
        written += 1
        print(f"wrote  {path}", flush=True)
    print(f"\n{written} fixture(s) written to {args.out}", flush=True)
    return 0


if __name__ == "__main__":
    sys.exit(main())
