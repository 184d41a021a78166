"""Gauss-Legendre rules and inner products over breakpoint meshes.

All L2 inner products in the package are computed element by element, so
piecewise-polynomial integrands are integrated exactly (to roundoff) once
the rule order is large enough.  The environment variable
``RITZ_SPLINE_QUAD_ORDER`` overrides every default order.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.linalg import cholesky_banded, solveh_banded

from .mesh import Breakpoints, SplineSpace, _basis_derivs, _find_span, _frozen

MAX_ORDER = 64
ENV_ORDER = "RITZ_SPLINE_QUAD_ORDER"

Integrand = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class GaussRule:
    """Nodes and weights of the n-point Gauss-Legendre rule on (-1, 1)."""

    nodes: np.ndarray
    weights: np.ndarray
    order: int

    def mapped(self, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
        """Nodes and weights transplanted to the interval [a, b]."""
        half = 0.5 * (b - a)
        return half * self.nodes + 0.5 * (a + b), half * self.weights


def _legendre_and_deriv(n: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """P_n(x) and P_n'(x) by the three-term recurrence."""
    p_prev = np.ones_like(x)
    p = x.copy()
    for j in range(2, n + 1):
        p, p_prev = ((2 * j - 1) * x * p - (j - 1) * p_prev) / j, p
    dp = n * (x * p - p_prev) / (x * x - 1.0)
    return p, dp


@lru_cache(maxsize=None)
def gauss_rule(n: int) -> GaussRule:
    """n-point Gauss-Legendre rule.

    The nodes are the roots of the degree-n Legendre polynomial, found by
    Newton iteration from the Chebyshev-like starting guesses; each iterate
    stays bracketed between neighbouring extrema, and the weights follow
    from the derivative formula w = 2 / ((1 - x^2) P_n'(x)^2).
    """
    if not 1 <= n <= MAX_ORDER:
        raise ValueError(f"requires 1 <= n <= {MAX_ORDER}: got {n}")
    if n == 1:
        return GaussRule(_frozen(np.zeros(1)), _frozen(np.full(1, 2.0)), 1)
    i = np.arange(n)
    x = np.cos(np.pi * (i + 0.75) / (n + 0.5))
    for _ in range(100):
        p, dp = _legendre_and_deriv(n, x)
        dx = p / dp
        x -= dx
        if np.max(np.abs(dx)) < 1e-15:
            break
    # enforce the exact symmetry of the rule
    x = 0.5 * (x - x[::-1])
    _, dp = _legendre_and_deriv(n, x)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    w = 0.5 * (w + w[::-1])
    order = np.argsort(x)
    return GaussRule(_frozen(x[order]), _frozen(w[order]), n)


def resolve_order(requested: int) -> int:
    """Clamp a default order to [1, MAX_ORDER], honouring the env override."""
    env = os.environ.get(ENV_ORDER)
    if env is not None:
        n = int(env)
        if not 1 <= n <= MAX_ORDER:
            raise ValueError(f"{ENV_ORDER} must lie in [1, {MAX_ORDER}]: got {env}")
        return n
    return min(max(requested, 1), MAX_ORDER)


def default_order(p: int, smooth_order: int | None = None) -> int:
    """Default rule order p + r + 2 for degree p against an H^r function.

    Exact for spline-spline products of degree p with margin for the smooth
    factor; ``r`` is the declared derivative order of the function, capped
    so closed-form registries with unlimited order stay inside MAX_ORDER.
    A floor of 12 points keeps single-element meshes accurate for smooth
    non-polynomial integrands.
    """
    r = p + 1 if smooth_order is None else min(smooth_order, 40)
    return resolve_order(max(p + r + 2, 12))


def mesh_points(xi: Breakpoints, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss points and weights per element, shaped (elements, n)."""
    rule = gauss_rule(n)
    pts = xi.points
    a = pts[:-1][:, None]
    b = pts[1:][:, None]
    half = 0.5 * (b - a)
    return half * rule.nodes + 0.5 * (a + b), half * rule.weights


def inner_product(f: Integrand, g: Integrand, xi: Breakpoints, n: int) -> float:
    """Elementwise n-point Gauss approximation of the L2 inner product (f, g)."""
    xs, ws = mesh_points(xi, n)
    flat = xs.ravel()
    return float(np.sum(np.asarray(f(flat)) * np.asarray(g(flat)) * ws.ravel()))


@dataclass(frozen=True)
class BandedSymmetric:
    """Symmetric banded matrix in lower-diagonal storage.

    ``bands[d, j]`` holds entry (j + d, j); row 0 is the main diagonal.
    """

    bands: np.ndarray
    dim: int
    bandwidth: int

    def to_dense(self) -> np.ndarray:
        a = np.zeros((self.dim, self.dim))
        for d in range(self.bandwidth + 1):
            idx = np.arange(self.dim - d)
            a[idx + d, idx] = self.bands[d, : self.dim - d]
            a[idx, idx + d] = self.bands[d, : self.dim - d]
        return a

    def matvec(self, v: np.ndarray) -> np.ndarray:
        out = self.bands[0] * v
        for d in range(1, self.bandwidth + 1):
            out[d:] += self.bands[d, : self.dim - d] * v[: self.dim - d]
            out[: self.dim - d] += self.bands[d, : self.dim - d] * v[d:]
        return out

    def cholesky(self) -> np.ndarray:
        """Banded Cholesky factor; raises LinAlgError when not SPD."""
        return cholesky_banded(self.bands, lower=True)

    def solve_spd(self, rhs: np.ndarray) -> np.ndarray:
        return solveh_banded(self.bands, rhs, lower=True)

    def norm_max(self) -> float:
        return float(np.max(np.abs(self.bands)))


def _basis_values_on_element(
    space: SplineSpace, xs: np.ndarray, deriv: int
) -> tuple[int, np.ndarray]:
    """First basis index and (len(xs), p+1) derivative values on one element.

    All points must lie strictly inside a single element, so the span is
    shared and derivative evaluation is unambiguous.
    """
    p = space.degree
    span = _find_span(space.knots, p, float(xs[0]), "right")
    vals = np.empty((xs.size, p + 1))
    if deriv > p:
        vals[:] = 0.0
        return span - p, vals
    for m, x in enumerate(xs):
        vals[m] = _basis_derivs(space.knots, p, span, float(x), deriv)[deriv]
    return span - p, vals


def gram_matrix(space: SplineSpace, deriv: int = 0, n: int | None = None) -> BandedSymmetric:
    """Banded Gram matrix of the deriv-th basis derivatives.

    For deriv = 0 the matrix is symmetric positive definite; for deriv = q
    >= 1 it is positive semidefinite with the degree-(q-1) polynomials in
    its kernel.
    """
    p = space.degree
    if deriv > p:
        raise ValueError("requires deriv <= p")
    if n is None:
        n = resolve_order(p + 1 + (p - deriv + 1))
    if n < p + 1:
        raise ValueError("requires n >= p + 1 for exact spline products")
    bands = np.zeros((p + 1, space.dim))
    xs, ws = mesh_points(space.breakpoints, n)
    for el in range(space.breakpoints.num_elements):
        first, vals = _basis_values_on_element(space, xs[el], deriv)
        local = (vals * ws[el][:, None]).T @ vals
        for d in range(p + 1):
            for j in range(p + 1 - d):
                bands[d, first + j] += local[j + d, j]
    return BandedSymmetric(_frozen(bands), space.dim, p)


def load_vector(
    space: SplineSpace, f: Integrand, n: int, deriv: int = 0
) -> np.ndarray:
    """Vector of inner products (f, d^deriv b_i) over the space's mesh."""
    out = np.zeros(space.dim)
    xs, ws = mesh_points(space.breakpoints, n)
    for el in range(space.breakpoints.num_elements):
        fv = np.asarray(f(xs[el]))
        first, vals = _basis_values_on_element(space, xs[el], deriv)
        out[first : first + space.degree + 1] += vals.T @ (fv * ws[el])
    return out
