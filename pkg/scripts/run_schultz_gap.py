#!/usr/bin/env python3
"""Log-gap between the classical knot-interpolation constants and ours.

Tabulates the gap for orders q = 1..8 over the admissible smoothness range;
every entry is nonnegative.  Writes results/schultz_gap.csv.
"""

import sys

from ritzspline.cli import main

if __name__ == "__main__":
    sys.exit(
        main(
            [
                "constants",
                "--table", "schultz-gap",
                "--q-max", "8",
                "--out", "results/schultz_gap.csv",
            ]
        )
    )
