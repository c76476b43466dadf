#!/usr/bin/env python3
"""Reproduce the K-sweep CSV (iteration counts and min-rates per algorithm).

With no arguments this runs the shipped defaults into results/fig3.csv;
any arguments are passed straight through to ``ehuav fig3``.
"""

import sys
from pathlib import Path

from ehuav.cli import main

ROOT = Path(__file__).resolve().parent.parent

if __name__ == "__main__":
    argv = sys.argv[1:]
    if not argv:
        out_dir = ROOT / "results"
        out_dir.mkdir(exist_ok=True)
        argv = [str(ROOT / "configs" / "table1.yaml"), "--out", str(out_dir / "fig3.csv")]
    raise SystemExit(main(["fig3", *argv]))
