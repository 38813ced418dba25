#!/usr/bin/env python3
"""Tube/cap ratio experiments for the determinant variety and a sample curve.

Compares Monte Carlo tube mass in a cap against the closed-form ratio
bound across an epsilon grid; writes CSVs under --outdir.
"""

import argparse
import json
import pathlib
import sys

from spherecond.cli import main as cli_main

SAMPLE_CURVE = {
    "p": 2,
    "degree": 2,
    "monomials": [
        {"alpha": [2, 0, 0], "coeff": 1.0},
        {"alpha": [0, 2, 0], "coeff": -1.0},
    ],
}


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", default="results/tube")
    ap.add_argument("--samples", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--sigmas", default="0.25,1.0")
    args = ap.parse_args()

    outdir = pathlib.Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    curve_path = outdir / "sample_curve.json"
    curve_path.write_text(json.dumps(SAMPLE_CURVE, indent=2) + "\n")

    worst = 0
    for spec, label in [("determinant:2", "det2"),
                        ("subsphere:3,2", "subsphere"),
                        (f"curve:{curve_path}", "curve")]:
        for sigma in (float(v) for v in args.sigmas.split(",")):
            out = outdir / f"{label}_sigma{sigma}"
            code = cli_main([
                "estimate", "tube", "--variety", spec, "--sigma", str(sigma),
                "--samples", str(args.samples), "--seed", str(args.seed),
                "--workers", str(args.workers), "--out", str(out),
            ])
            print(f"{label} sigma={sigma}: exit {code}")
            worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(main())
