#!/usr/bin/env python3
"""Run every exact-identity and oracle verification suite in sequence.

Exit code is the worst suite result (0 pass, 1 any failure).
"""

import argparse
import sys

from spherecond.cli import main as cli_main


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=1_000_000,
                    help="Monte Carlo samples for the kinematic suite")
    ap.add_argument("--trials", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    worst = 0
    for which in ("jintegrals", "weyltube", "kinematic",
                  "eckart-young", "wilkinson", "cntr"):
        print(f"=== verify {which} ===")
        argv = ["verify", which, "--seed", str(args.seed),
                "--trials", str(args.trials), "--workers", str(args.workers)]
        if which == "kinematic":
            argv += ["--samples", str(args.samples)]
        worst = max(worst, cli_main(argv))
    return worst


if __name__ == "__main__":
    sys.exit(main())
