#!/usr/bin/env python3
"""
Command-line entry point for the weak-discernibility toolkit.

Examples:
    python main.py verify --theorem 1 --lattice-sites 8 --trials 200 --seed 7 --format json
    python main.py audit --relation Rt
    python main.py discern --relation R --quantity Sz --state singlet.json
    python main.py sample --relation Rprime --quantity Q --trials 1000 --format csv
"""

import sys

from discernibility.cli import main

if __name__ == "__main__":
    sys.exit(main())
