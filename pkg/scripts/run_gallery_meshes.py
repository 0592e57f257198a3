#!/usr/bin/env python3
"""Export viewer meshes and singular-set polylines for the whole catalog.

Usage: python3 scripts/run_gallery_meshes.py [OUTDIR]
"""

import sys
from pathlib import Path

from maxface import cli

SURFACES = [
    ("catenoid", []),
    ("helicoid", []),
    ("associated", ["--param", "phase=0.6"]),
    ("trinoid1", ["--param", "a=3.67"]),
    ("trinoid2", ["--param", "c=0.1"]),
    ("cone", ["--param", "a=2.5"]),
    ("genus_k", ["--param", "k=1"]),
    ("genus_k_reduced", ["--param", "k=2"]),
]

SINGULAR = [
    ("cone", ["--param", "a=2.5"]),
    ("trinoid1", ["--param", "a=3.67"]),
    ("genus_k", ["--param", "k=1"]),
]


def main(outdir: str = "gallery_out") -> None:
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    for name, params in SURFACES:
        rc = cli.main(["mesh", "--surface", name, *params,
                       "--out", str(out), "--format", "obj"])
        print(f"mesh     {name:<16} -> rc={rc}")
    for name, params in SINGULAR:
        rc = cli.main(["singular", "--surface", name, *params,
                       "--out", str(out), "--format", "csv"])
        print(f"singular {name:<16} -> rc={rc}")
    print(f"artifacts in {out}/")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "gallery_out")
