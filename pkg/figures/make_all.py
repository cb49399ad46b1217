"""Render every figure family from one pipeline run."""

import argparse
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from figures import fig_cases, fig_eos, fig_interaction, fig_riemann1d

FAMILIES = (fig_eos, fig_riemann1d, fig_cases, fig_interaction)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--run-dir", required=True, help="pipeline artifact directory")
    ap.add_argument("--out-dir", required=True, help="image output directory")
    args = ap.parse_args(argv)
    rc = 0
    for family in FAMILIES:
        rc |= family.main(["--run-dir", args.run_dir, "--out-dir", args.out_dir])
    return rc


if __name__ == "__main__":
    raise SystemExit(main())
