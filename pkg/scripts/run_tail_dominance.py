#!/usr/bin/env python3
"""Sweep the matrix-inversion tail experiment over n and sigma.

Writes one CSV + manifest per configuration under --outdir and prints a
one-line summary each. Any dominated=false row makes the exit code 3.
"""

import argparse
import pathlib
import sys

from spherecond.cli import main as cli_main


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", default="results/tail")
    ap.add_argument("--samples", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--sizes", default="2,3", help="comma list of n")
    ap.add_argument("--sigmas", default="0.25,1.0")
    args = ap.parse_args()

    outdir = pathlib.Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    worst = 0
    for n in (int(v) for v in args.sizes.split(",")):
        for sigma in (float(v) for v in args.sigmas.split(",")):
            for center in ("north", "random"):
                out = outdir / f"n{n}_sigma{sigma}_{center}"
                code = cli_main([
                    "estimate", "tail", "--problem", "matrix-inversion",
                    "--n", str(n), "--sigma", str(sigma), "--center", center,
                    "--samples", str(args.samples), "--seed", str(args.seed),
                    "--workers", str(args.workers), "--out", str(out),
                ])
                print(f"n={n} sigma={sigma} center={center}: exit {code}")
                worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(main())
