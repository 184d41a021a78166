#!/usr/bin/env python3
"""Clamped biharmonic spectrum on cubic maximally smooth splines.

20 elements: prints the fundamental eigenvalue and the predicted/observed
outlier counts, and writes CSV/JSON/SVG reports under results/eig/.
"""

import sys

from ritzspline.cli import main

if __name__ == "__main__":
    sys.exit(
        main(
            [
                "eig",
                "--p", "3",
                "--elements", "20",
                "--threshold", "0.1",
                "--out", "results/eig",
            ]
        )
    )
