#!/usr/bin/env python3
"""One full default-scenario experiment; writes CSVs under results/single/.

Usage: python scripts/single_run.py [DELTA] [SEED]
"""

import sys
from pathlib import Path

from wcs_sim.cli import main

ROOT = Path(__file__).resolve().parent.parent


def run() -> int:
    delta = sys.argv[1] if len(sys.argv) > 1 else "0.03"
    seed = sys.argv[2] if len(sys.argv) > 2 else "42"
    out = ROOT / "results" / f"single-delta{delta}-seed{seed}"
    config = ROOT / "configs" / "default.toml"
    override = out / "config-override.toml"
    out.mkdir(parents=True, exist_ok=True)
    text = config.read_text().replace("delta = 0.03", f"delta = {delta}")
    override.write_text(text)
    return main(["run", "--config", str(override), "--seed", seed, "--out", str(out)])


if __name__ == "__main__":
    sys.exit(run())
