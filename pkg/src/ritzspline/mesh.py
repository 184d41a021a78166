"""Breakpoint meshes, B-spline spaces, and exact calculus between them.

A spline space of degree ``p`` and smoothness ``k`` over a breakpoint
sequence is represented by its clamped (open) knot vector: end knots with
multiplicity ``p + 1`` and every interior breakpoint with multiplicity
``p - k``.  Differentiation maps the space with parameters ``(p, k)`` onto
the one with ``(p - 1, k - 1)`` over the same breakpoints, and integration
from the left endpoint inverts it; both act exactly on B-spline
coefficients, so the calculus between neighbouring spaces is free of
quadrature error.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

# Gram/stiffness conditioning in double precision degrades past this degree.
MAX_DEGREE = 20

# Relative tolerance for coefficient equality (accumulated recurrence rounding).
COEFF_RTOL = 1e-12


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Breakpoints:
    """Strictly increasing abscissae ``a = x_0 < x_1 < ... < x_{N+1} = b``."""

    points: np.ndarray

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1 or pts.size < 2:
            raise ValueError("breakpoints require at least 2 points")
        if not np.all(np.diff(pts) > 0.0):
            raise ValueError("breakpoints must be strictly increasing")
        object.__setattr__(self, "points", _frozen(pts))

    @classmethod
    def uniform(
        cls,
        elements: int,
        a: float = 0.0,
        b: float = 1.0,
        grading: float = 1.0,
    ) -> "Breakpoints":
        """Mesh with `elements` cells on [a, b]; `grading` != 1 packs cells near `a`."""
        if elements < 1:
            raise ValueError("requires at least 1 element")
        if b <= a:
            raise ValueError("requires b > a")
        s = np.linspace(0.0, 1.0, elements + 1)
        if grading != 1.0:
            s = s**grading
        return cls(a + (b - a) * s)

    @property
    def a(self) -> float:
        return float(self.points[0])

    @property
    def b(self) -> float:
        return float(self.points[-1])

    @property
    def num_elements(self) -> int:
        return self.points.size - 1

    @property
    def num_interior(self) -> int:
        return self.points.size - 2

    @property
    def h(self) -> float:
        return float(np.max(np.diff(self.points)))

    @property
    def h_min(self) -> float:
        return float(np.min(np.diff(self.points)))

    def element_of(self, x: float) -> int:
        """Index j with x in [x_j, x_{j+1}); the last element is closed at b."""
        if x < self.a or x > self.b:
            raise ValueError(f"x={x} outside [{self.a}, {self.b}]")
        j = int(np.searchsorted(self.points, x, side="right")) - 1
        return min(max(j, 0), self.num_elements - 1)


@dataclass(frozen=True)
class SplineSpace:
    """Piecewise polynomials of degree ``p`` in C^k across the breakpoints.

    Use :func:`make_space` to construct; the knot vector and dimension are
    derived there and must stay consistent with (degree, smoothness).
    """

    degree: int
    smoothness: int
    breakpoints: Breakpoints
    knots: np.ndarray
    dim: int

    @property
    def interval(self) -> tuple[float, float]:
        return self.breakpoints.a, self.breakpoints.b

    def derived(self) -> "SplineSpace":
        """Image space of differentiation: degree and smoothness drop by one."""
        if self.degree < 1 or self.smoothness < 0:
            raise ValueError(
                "derivative leaves the managed space chain: requires p >= 1 and k >= 0"
            )
        return make_space(self.degree - 1, self.smoothness - 1, self.breakpoints)

    def antiderived(self) -> "SplineSpace":
        """Image space of integration from the left endpoint."""
        return make_space(self.degree + 1, self.smoothness + 1, self.breakpoints)

    def contains_space(self, other: "SplineSpace") -> bool:
        """Whether every element of `other` lies in this space (same breakpoints).

        With no interior breakpoints both spaces are plain polynomial spaces
        and the smoothness labels carry no constraint.
        """
        return (
            np.array_equal(self.breakpoints.points, other.breakpoints.points)
            and self.degree >= other.degree
            and (self.breakpoints.num_interior == 0 or self.smoothness <= other.smoothness)
        )


def make_space(p: int, k: int, xi: Breakpoints) -> SplineSpace:
    """Build the spline space of degree `p` and smoothness `k` over `xi`.

    The clamped knot vector repeats the end points p+1 times and every
    interior breakpoint p-k times, giving dimension (p+1) + N*(p-k) for N
    interior breakpoints.
    """
    if p < 0:
        raise ValueError("requires degree p >= 0")
    if p > MAX_DEGREE:
        raise ValueError(f"requires degree p <= {MAX_DEGREE}")
    if not -1 <= k <= p - 1:
        raise ValueError(f"requires -1 <= k <= p-1: got k={k}, p={p}")
    pts = xi.points
    mult = np.full(pts.size, p - k, dtype=int)
    mult[0] = mult[-1] = p + 1
    knots = np.repeat(pts, mult)
    dim = (p + 1) + xi.num_interior * (p - k)
    assert knots.size == dim + p + 1
    return SplineSpace(p, k, xi, _frozen(knots), dim)


@dataclass(frozen=True)
class Spline:
    """Element of a spline space, stored as B-spline coefficients."""

    space: SplineSpace
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        c = np.asarray(self.coeffs, dtype=float)
        if c.shape != (self.space.dim,):
            raise ValueError(
                f"coefficient vector has length {c.size}, space dimension is {self.space.dim}"
            )
        object.__setattr__(self, "coeffs", _frozen(c))

    def __add__(self, other: "Spline") -> "Spline":
        self._check_same_space(other)
        return Spline(self.space, self.coeffs + other.coeffs)

    def __sub__(self, other: "Spline") -> "Spline":
        self._check_same_space(other)
        return Spline(self.space, self.coeffs - other.coeffs)

    def __mul__(self, scalar: float) -> "Spline":
        return Spline(self.space, self.coeffs * float(scalar))

    __rmul__ = __mul__

    def _check_same_space(self, other: "Spline") -> None:
        if not np.array_equal(self.space.knots, other.space.knots) or (
            self.space.degree != other.space.degree
        ):
            raise ValueError("splines live in different spaces")


@dataclass(frozen=True)
class Polynomial:
    """Polynomial on [a, b] with coefficients for the shifted monomials (x-a)^i.

    The length of the coefficient vector only bounds the degree; leading
    coefficients may vanish.
    """

    coeffs: np.ndarray
    interval: tuple[float, float]

    def __post_init__(self) -> None:
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=float))
        a, b = self.interval
        if not b > a:
            raise ValueError("requires b > a")
        object.__setattr__(self, "coeffs", _frozen(c))
        object.__setattr__(self, "interval", (float(a), float(b)))

    @property
    def degree_bound(self) -> int:
        return self.coeffs.size - 1

    def eval(self, x, deriv: int = 0):
        """Value of the deriv-th derivative at x (scalar or array)."""
        c = self.coeffs
        for _ in range(deriv):
            c = c[1:] * np.arange(1, c.size)
            if c.size == 0:
                c = np.zeros(1)
        t = np.asarray(x, dtype=float) - self.interval[0]
        out = np.zeros_like(t)
        for ci in c[::-1]:
            out = out * t + ci
        return out if out.ndim else float(out)

    def derivative(self) -> "Polynomial":
        c = self.coeffs[1:] * np.arange(1, self.coeffs.size)
        if c.size == 0:
            c = np.zeros(1)
        return Polynomial(c, self.interval)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        if self.interval != other.interval:
            raise ValueError("polynomials on different intervals")
        n = max(self.coeffs.size, other.coeffs.size)
        c = np.zeros(n)
        c[: self.coeffs.size] += self.coeffs
        c[: other.coeffs.size] += other.coeffs
        return Polynomial(c, self.interval)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-1.0) * other

    def __mul__(self, scalar: float) -> "Polynomial":
        return Polynomial(self.coeffs * float(scalar), self.interval)

    __rmul__ = __mul__


# ---------------------------------------------------------------------------
# Basis evaluation (Cox-de Boor recurrence with derivatives)
# ---------------------------------------------------------------------------


def _find_span(knots: np.ndarray, p: int, x: float, side: str) -> int:
    """Index i of the nonempty span with knots[i] <= x < knots[i+1].

    ``side='left'`` returns instead the span with knots[i] < x <= knots[i+1],
    which realizes one-sided limits from below at breakpoints.  Both clamp to
    the first/last nonempty span at the domain ends.
    """
    lo, hi = p, knots.size - p - 2
    if side == "left":
        i = int(np.searchsorted(knots, x, side="left")) - 1
    else:
        i = int(np.searchsorted(knots, x, side="right")) - 1
    i = min(max(i, lo), hi)
    # skip zero-length spans (repeated interior knots)
    while knots[i] == knots[i + 1]:
        i = i - 1 if side == "left" else i + 1
    return i


def _basis_derivs(knots: np.ndarray, p: int, span: int, x: float, n: int) -> np.ndarray:
    """All nonzero basis functions and derivatives at ``x``.

    Returns an array of shape (n+1, p+1): row ``d`` holds the d-th
    derivatives of the p+1 basis functions with indices span-p .. span.
    Standard triangular-table algorithm: the inverse knot-difference table
    from the Cox-de Boor recurrence is reused to accumulate the derivative
    sums, then scaled by the falling factorial of the degree.
    """
    ndu = np.empty((p + 1, p + 1))
    left = np.empty(p + 1)
    right = np.empty(p + 1)
    ndu[0, 0] = 1.0
    for j in range(1, p + 1):
        left[j] = x - knots[span + 1 - j]
        right[j] = knots[span + j] - x
        saved = 0.0
        for r in range(j):
            ndu[j, r] = right[r + 1] + left[j - r]
            temp = ndu[r, j - 1] / ndu[j, r]
            ndu[r, j] = saved + right[r + 1] * temp
            saved = left[j - r] * temp
        ndu[j, j] = saved

    ders = np.zeros((n + 1, p + 1))
    ders[0, :] = ndu[:, p]
    a = np.empty((2, p + 1))
    for r in range(p + 1):
        s1, s2 = 0, 1
        a[0, 0] = 1.0
        for d in range(1, min(n, p) + 1):
            dval = 0.0
            rk, pk = r - d, p - d
            if r >= d:
                a[s2, 0] = a[s1, 0] / ndu[pk + 1, rk]
                dval = a[s2, 0] * ndu[rk, pk]
            j1 = 1 if rk >= -1 else -rk
            j2 = d - 1 if r - 1 <= pk else p - r
            for j in range(j1, j2 + 1):
                a[s2, j] = (a[s1, j] - a[s1, j - 1]) / ndu[pk + 1, rk + j]
                dval += a[s2, j] * ndu[rk + j, pk]
            if r <= pk:
                a[s2, d] = -a[s1, d - 1] / ndu[pk + 1, r]
                dval += a[s2, d] * ndu[r, pk]
            ders[d, r] = dval
            s1, s2 = s2, s1

    fac = float(p)
    for d in range(1, min(n, p) + 1):
        ders[d, :] *= fac
        fac *= p - d
    return ders


def eval_basis(
    space: SplineSpace, x: float, deriv: int = 0, side: str = "auto"
) -> tuple[int, np.ndarray]:
    """Nonzero basis derivative values at ``x``.

    Returns ``(first_index, values)`` where ``values`` holds the p+1
    possibly-nonzero d-th basis derivatives with indices ``first_index ..
    first_index + p``.  Evaluation is right-continuous at interior
    breakpoints and left-continuous at ``b``; pass ``side='left'`` or
    ``side='right'`` to force a one-sided limit.
    """
    a, b = space.interval
    if x < a or x > b:
        raise ValueError(f"x={x} outside [{a}, {b}]")
    if deriv < 0:
        raise ValueError("requires deriv >= 0")
    if side == "auto":
        side = "left" if x == b else "right"
    elif side not in ("left", "right"):
        raise ValueError("side must be 'auto', 'left' or 'right'")
    span = _find_span(space.knots, space.degree, x, side)
    first = span - space.degree
    if deriv > space.degree:
        return first, np.zeros(space.degree + 1)
    ders = _basis_derivs(space.knots, space.degree, span, x, deriv)
    return first, ders[deriv]


def eval_spline(s: Spline, x: float, deriv: int = 0, side: str = "auto") -> float:
    """Value of the deriv-th derivative of ``s`` at ``x`` (broken for deriv > k)."""
    first, vals = eval_basis(s.space, x, deriv, side)
    return float(np.dot(s.coeffs[first : first + s.space.degree + 1], vals))


def eval_spline_many(s: Spline, xs: np.ndarray, deriv: int = 0) -> np.ndarray:
    """Vectorized :func:`eval_spline` over an array of points."""
    xs = np.asarray(xs, dtype=float)
    out = np.empty(xs.size)
    flat = xs.ravel()
    for i in range(flat.size):
        out[i] = eval_spline(s, float(flat[i]), deriv)
    return out.reshape(xs.shape)


# ---------------------------------------------------------------------------
# Exact calculus: differentiation and integration between neighbour spaces
# ---------------------------------------------------------------------------


def derive(s: Spline) -> Spline:
    """Derivative of ``s`` as an element of the (p-1, k-1) space.

    Uses the exact coefficient formula c'_i = p (c_{i+1} - c_i) / (t_{i+p+1}
    - t_{i+1}); the denominators are positive whenever k >= 0.
    """
    target = s.space.derived()
    p = s.space.degree
    t = s.space.knots
    c = s.coeffs
    gaps = t[p + 1 : p + 1 + target.dim] - t[1 : 1 + target.dim]
    out = p * (c[1:] - c[:-1]) / gaps
    return Spline(target, out)


def integrate_from_left(s: Spline) -> Spline:
    """Antiderivative of ``s`` vanishing at ``a``, in the (p+1, k+1) space."""
    target = s.space.antiderived()
    p = s.space.degree
    t = s.space.knots
    c = s.coeffs
    out = np.zeros(target.dim)
    out[1:] = np.cumsum(c * (t[p + 1 :] - t[: s.space.dim]) / (p + 1))
    return Spline(target, out)


# ---------------------------------------------------------------------------
# Exact change of representation (dual functionals)
# ---------------------------------------------------------------------------


def _elementary_symmetric(vals: np.ndarray) -> np.ndarray:
    """e_0..e_m of the given values, by the stable one-value-at-a-time update."""
    e = np.zeros(vals.size + 1)
    e[0] = 1.0
    for v in vals:
        e[1 : vals.size + 1] = e[1 : vals.size + 1] + v * e[: vals.size]
    return e


def _dual_coefficients(space: SplineSpace, derivs_at) -> np.ndarray:
    """B-spline coefficients of a function known to lie in ``space``.

    ``derivs_at(tau, m)`` must return the m-th derivative at ``tau``.  For
    each basis index the dual functional is evaluated at the midpoint of the
    widest knot span inside the basis support, where the integrand is a
    single polynomial piece:

        c_i = sum_m e_m(t_{i+1} - tau, ..., t_{i+p} - tau) f^(m)(tau) (p-m)!/p!
    """
    p, t = space.degree, space.knots
    pfac = factorial(p)
    coeffs = np.empty(space.dim)
    for i in range(space.dim):
        widths = t[i + 1 : i + p + 2] - t[i : i + p + 1]
        j = i + int(np.argmax(widths))
        tau = 0.5 * (t[j] + t[j + 1])
        e = _elementary_symmetric(t[i + 1 : i + p + 1] - tau)
        acc = 0.0
        for m in range(p + 1):
            acc += e[m] * derivs_at(tau, m) * (factorial(p - m) / pfac)
        coeffs[i] = acc
    return coeffs


def poly_to_spline(poly: Polynomial, space: SplineSpace) -> Spline:
    """Exact B-spline coefficients of a polynomial inside ``space``."""
    a, b = space.interval
    pa, pb = poly.interval
    if not (np.isclose(pa, a) and np.isclose(pb, b)):
        raise ValueError("polynomial interval differs from the space interval")
    if poly.degree_bound > space.degree:
        nz = np.nonzero(poly.coeffs)[0]
        if nz.size and nz[-1] > space.degree:
            raise ValueError(
                f"polynomial degree {nz[-1]} exceeds space degree {space.degree}"
            )
    return Spline(space, _dual_coefficients(space, poly.eval))


def embed(s: Spline, target: SplineSpace) -> Spline:
    """Re-express ``s`` in a superspace (same breakpoints, p up, k down)."""
    if not target.contains_space(s.space):
        raise ValueError(
            "target is not a superspace: requires same breakpoints, "
            f"target p >= {s.space.degree} and target k <= {s.space.smoothness}"
        )
    return Spline(target, _dual_coefficients(target, lambda tau, m: eval_spline(s, tau, m)))


def spline_to_poly(s: Spline, element: int = 0) -> Polynomial:
    """Local polynomial of ``s`` on one element, in shifted monomial form.

    With no interior breakpoints this is the global polynomial of the spline.
    """
    pts = s.space.breakpoints.points
    if not 0 <= element < s.space.breakpoints.num_elements:
        raise ValueError("element index out of range")
    a = s.space.breakpoints.a
    x0, x1 = pts[element], pts[element + 1]
    mid = 0.5 * (x0 + x1)
    p = s.space.degree
    # Taylor coefficients at the element midpoint, re-expanded around a:
    # sum_m t_m (x - mid)^m with t_m = s^(m)(mid)/m! and x - mid = (x-a) - d.
    taylor = np.array([eval_spline(s, mid, m) / factorial(m) for m in range(p + 1)])
    d = mid - a
    shifted = np.zeros(p + 1)
    power = np.zeros(p + 1)  # running expansion of (x - mid)^m in (x-a)^j
    power[0] = 1.0
    for m, tm in enumerate(taylor):
        shifted += tm * power
        power[1 : p + 1] = power[0:p] - d * power[1 : p + 1]
        power[0] *= -d
    return Polynomial(shifted, s.space.interval)
