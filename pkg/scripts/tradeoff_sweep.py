#!/usr/bin/env python3
"""Threshold sweep behind the trade-off figures; writes results/tradeoff/.

Five nonzero thresholds plus the periodic baseline, three seeds each,
matching the acceptance suite.  Feed the resulting sweep_summary.csv to the
figures package for the trade-off panels.
"""

import sys
from pathlib import Path

from wcs_sim.cli import main

ROOT = Path(__file__).resolve().parent.parent

DELTAS = "0,0.001,0.003,0.01,0.03,0.09"
SEEDS = "1,2,3"


def run() -> int:
    out = ROOT / "results" / "tradeoff"
    config = ROOT / "configs" / "default.toml"
    code = main(["sweep", "--config", str(config), "--deltas", DELTAS,
                 "--seeds", SEEDS, "--out", str(out)])
    if code == 0:
        print(f"now render with: node figures/dist/cli.js tradeoff "
              f"--in {out / 'sweep_summary.csv'} --out-dir {out}")
    return code


if __name__ == "__main__":
    sys.exit(run())
