#!/usr/bin/env python3
"""Superconvergence of the Ritz-minus-boundary projector difference.

Same setting as the error study; the observed order is 2(p-q+1), ahead of
the proven rate.  Writes CSV tables and an SVG under results/rq-diff/.
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
                "--study", "rq-diff",
                "--out", "results/rq-diff",
            ]
        )
    )
