#!/usr/bin/env python3
"""Run every bundled sweep preset and drop plot-ready CSVs in one directory.

Usage: python scripts/reproduce_figures.py [OUT_DIR]   (default: ./figures)
"""
import sys
from pathlib import Path

from laacoex import cli

SWEEPS = ["fig7", "fig8", "fig9", "fig10", "fig11", "fig12", "fig12_class4",
          "fig13", "fig14"]


def main() -> int:
    out_dir = Path(sys.argv[1] if len(sys.argv) > 1 else "figures")
    out_dir.mkdir(parents=True, exist_ok=True)
    status = 0
    for name in SWEEPS:
        target = out_dir / f"{name}.csv"
        code = cli.main(["sweep", name, "--out", str(target)])
        print(f"{name}: exit {code} -> {target}")
        status = max(status, code)
    return status


if __name__ == "__main__":
    sys.exit(main())
