#!/usr/bin/env python3
"""Convergence of the boundary-interpolating projector for sin(4x).

Maximally smooth spaces of degree 2, 3, 4 on dyadic meshes h = 2^-i,
i = 1..5, measuring the L2 errors of the value and the first derivative.
Writes per-(p, l) CSV tables and a log-log SVG under results/error/.
"""

import sys

from ritzspline.cli import main

if __name__ == "__main__":
    sys.exit(
        main(
            [
                "converge",
                "--function", "sin(4*x)",
                "--p-list", "2,3,4",
                "--k", "max",
                "--q", "2",
                "--l-list", "0,1",
                "--levels", "5",
                "--study", "error",
                "--out", "results/error",
            ]
        )
    )
