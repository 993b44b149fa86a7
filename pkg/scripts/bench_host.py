#!/usr/bin/env python3
"""Benchmark the host over the standard size ladder and print the report.

Examples:
    python scripts/bench_host.py
    python scripts/bench_host.py --sizes 16,32 --repeats 3 --workers 2
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from tvdmhd.cli import main

if __name__ == "__main__":
    sys.exit(main(["bench", *sys.argv[1:]]))
