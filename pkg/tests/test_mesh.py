import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ritzspline.mesh import (
    Breakpoints,
    Polynomial,
    Spline,
    derive,
    embed,
    eval_basis,
    eval_spline,
    eval_spline_many,
    integrate_from_left,
    make_space,
    poly_to_spline,
    spline_to_poly,
)

from conftest import random_breakpoints, random_space, random_spline


# ---------------------------------------------------------------------------
# independent oracle: B-splines as divided differences of truncated powers
# ---------------------------------------------------------------------------


def _divided_difference(ys, f, dfs):
    """Divided difference over the (sorted, possibly repeated) nodes ys.

    ``dfs[m](y)`` must be the m-th derivative of f; repeated nodes use the
    confluent rule [y,...,y]f = f^(m)(y)/m!.
    """
    from math import factorial

    memo = {}

    def dd(lo, hi):
        key = (lo, hi)
        if key in memo:
            return memo[key]
        if ys[lo] == ys[hi]:
            m = hi - lo
            val = dfs[m](ys[lo]) / factorial(m)
        else:
            val = (dd(lo + 1, hi) - dd(lo, hi - 1)) / (ys[hi] - ys[lo])
        memo[key] = val
        return val

    return dd(0, len(ys) - 1)


def bspline_by_truncated_powers(knots, p, i, x):
    """B_{i,p}(x) = (t_{i+p+1} - t_i) [t_i..t_{i+p+1}] (y - x)_+^p."""
    from math import factorial

    ys = list(knots[i : i + p + 2])
    if ys[0] == ys[-1]:
        return 0.0

    def deriv(m):
        def f(y):
            if y <= x:
                return 0.0
            return factorial(p) / factorial(p - m) * (y - x) ** (p - m)

        return f

    dfs = [deriv(m) if m <= p else (lambda y: 0.0) for m in range(p + 2)]
    return (ys[-1] - ys[0]) * _divided_difference(ys, None, dfs)


def test_basis_matches_truncated_power_oracle(rng):
    xi = Breakpoints(np.array([0.0, 0.5, 1.0]))
    space = make_space(2, 1, xi)
    first, vals = eval_basis(space, 0.25)
    assert abs(vals.sum() - 1.0) < 1e-13
    for j, v in enumerate(vals):
        ref = bspline_by_truncated_powers(space.knots, 2, first + j, 0.25)
        assert v == pytest.approx(ref, abs=1e-12)
    # a few random spaces and points, avoiding the knots themselves
    for _ in range(10):
        space = random_space(rng, p_max=4)
        x = float(rng.uniform(0.01, 0.99))
        while np.any(np.abs(space.knots - x) < 1e-6):
            x = float(rng.uniform(0.01, 0.99))
        first, vals = eval_basis(space, x)
        for j, v in enumerate(vals):
            ref = bspline_by_truncated_powers(space.knots, space.degree, first + j, x)
            assert v == pytest.approx(ref, abs=1e-11)


# ---------------------------------------------------------------------------
# construction and validation
# ---------------------------------------------------------------------------


def test_dimension_examples():
    assert make_space(2, 1, Breakpoints(np.array([0, 0.5, 1.0]))).dim == 4
    assert make_space(3, 2, Breakpoints(np.array([0, 1.0]))).dim == 4
    assert make_space(3, -1, Breakpoints(np.array([0, 0.5, 1.0]))).dim == 8


def test_dim_matches_knot_count(rng):
    for _ in range(20):
        space = random_space(rng)
        assert space.knots.size == space.dim + space.degree + 1


def test_make_space_rejects_bad_smoothness():
    xi = Breakpoints(np.array([0.0, 1.0]))
    with pytest.raises(ValueError):
        make_space(2, 2, xi)
    with pytest.raises(ValueError):
        make_space(2, -2, xi)


def test_breakpoints_must_increase():
    with pytest.raises(ValueError):
        Breakpoints(np.array([0.0, 0.0, 1.0]))
    with pytest.raises(ValueError):
        Breakpoints(np.array([1.0]))


def test_breakpoint_metrics():
    xi = Breakpoints(np.array([0.0, 0.25, 1.0]))
    assert xi.h == 0.75
    assert xi.h_min == 0.25
    assert xi.num_interior == 1
    assert xi.element_of(0.25) == 1
    assert xi.element_of(1.0) == 1


def test_eval_outside_domain_rejected():
    space = make_space(1, 0, Breakpoints(np.array([0.0, 1.0])))
    s = Spline(space, [0.0, 1.0])
    with pytest.raises(ValueError):
        eval_spline(s, 1.5)
    with pytest.raises(ValueError):
        eval_basis(space, -0.1)


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------


def test_hat_functions_midpoint():
    space = make_space(1, 0, Breakpoints(np.array([0.0, 1.0])))
    first, vals = eval_basis(space, 0.5)
    assert first == 0
    np.testing.assert_allclose(vals, [0.5, 0.5])


def test_constant_basis():
    space = make_space(0, -1, Breakpoints(np.array([0.0, 1.0])))
    first, vals = eval_basis(space, 0.3)
    assert vals.tolist() == [1.0]


@settings(max_examples=40, deadline=None)
@given(
    x=st.floats(0.0, 1.0),
    p=st.integers(0, 6),
    seed=st.integers(0, 2**31),
)
def test_partition_of_unity(x, p, seed):
    r = np.random.default_rng(seed)
    k = int(r.integers(-1, p))
    space = make_space(p, k, random_breakpoints(r))
    _, vals = eval_basis(space, x)
    assert abs(vals.sum() - 1.0) < 1e-13


def test_unit_spline_everywhere(rng):
    space = random_space(rng)
    ones = Spline(space, np.ones(space.dim))
    xs = rng.uniform(0, 1, 200)
    np.testing.assert_allclose(eval_spline_many(ones, xs), 1.0, atol=1e-13)


def test_linear_spline_derivative():
    space = make_space(1, 0, Breakpoints(np.array([0.0, 1.0])))
    s = Spline(space, [0.0, 1.0])
    assert eval_spline(s, 0.7) == pytest.approx(0.7)
    assert eval_spline(s, 0.7, deriv=1) == pytest.approx(1.0)


def test_eval_matches_local_horner(rng):
    """Per-element monomial interpolation reproduces the spline evaluation."""
    space = make_space(3, 1, random_breakpoints(rng, 3))
    s = random_spline(rng, space)
    pts = space.breakpoints.points
    for el in range(space.breakpoints.num_elements):
        x0, x1 = pts[el], pts[el + 1]
        sample = np.linspace(x0 + 1e-9, x1 - 1e-9, space.degree + 1)
        coeffs = np.polyfit(sample, eval_spline_many(s, sample), space.degree)
        for x in rng.uniform(x0 + 1e-9, x1 - 1e-9, 10):
            assert eval_spline(s, float(x)) == pytest.approx(
                float(np.polyval(coeffs, x)), rel=1e-9, abs=1e-9
            )


def test_continuity_across_breakpoints(rng):
    for _ in range(10):
        p = int(rng.integers(1, 6))
        k = int(rng.integers(0, p))
        space = make_space(p, k, random_breakpoints(rng, 3))
        s = random_spline(rng, space)
        scale = max(1.0, np.max(np.abs(s.coeffs)))
        for x in space.breakpoints.points[1:-1]:
            for d in range(k + 1):
                left = eval_spline(s, float(x), d, side="left")
                right = eval_spline(s, float(x), d, side="right")
                assert abs(left - right) <= 1e-11 * scale * max(
                    1.0, abs(left)
                ), (p, k, d)


def test_smoothness_break_at_order_k_plus_one(rng):
    space = make_space(2, 0, Breakpoints(np.array([0.0, 0.4, 1.0])))
    s = random_spline(rng, space)
    x = 0.4
    left = eval_spline(s, x, 1, side="left")
    right = eval_spline(s, x, 1, side="right")
    assert abs(left - right) > 1e-8  # generic splines kink at order k+1


# ---------------------------------------------------------------------------
# derivative and antiderivative operators
# ---------------------------------------------------------------------------


def test_derive_linear_and_constant():
    space = make_space(1, 0, Breakpoints(np.array([0.0, 1.0])))
    d = derive(Spline(space, [0.0, 1.0]))
    assert d.space.degree == 0
    np.testing.assert_allclose(d.coeffs, [1.0])

    sp2 = make_space(2, 1, Breakpoints(np.array([0.0, 0.5, 1.0])))
    z = derive(Spline(sp2, np.ones(sp2.dim)))
    np.testing.assert_allclose(z.coeffs, 0.0, atol=1e-14)


def test_derive_requires_smoothness():
    sp = make_space(2, -1, Breakpoints(np.array([0.0, 1.0])))
    with pytest.raises(ValueError):
        derive(Spline(sp, np.zeros(sp.dim)))
    sp0 = make_space(0, -1, Breakpoints(np.array([0.0, 1.0])))
    with pytest.raises(ValueError):
        derive(Spline(sp0, np.zeros(1)))


def test_derive_consistent_with_pointwise(rng):
    space = make_space(3, 2, random_breakpoints(rng, 4))
    s = random_spline(rng, space)
    ds = derive(s)
    xs = rng.uniform(0, 1, 100)
    np.testing.assert_allclose(
        eval_spline_many(ds, xs), eval_spline_many(s, xs, deriv=1), rtol=1e-10, atol=1e-10
    )


def test_integrate_constant_gives_identity():
    space = make_space(0, -1, Breakpoints(np.array([0.0, 1.0])))
    ks = integrate_from_left(Spline(space, [1.0]))
    np.testing.assert_allclose(ks.coeffs, [0.0, 1.0])
    zero = integrate_from_left(Spline(space, [0.0]))
    np.testing.assert_allclose(zero.coeffs, 0.0)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**31))
def test_derive_after_integrate_is_identity(seed):
    r = np.random.default_rng(seed)
    space = random_space(r, p_max=5)
    s = random_spline(r, space)
    back = derive(integrate_from_left(s))
    scale = max(1.0, float(np.max(np.abs(s.coeffs))))
    assert np.max(np.abs(back.coeffs - s.coeffs)) <= 1e-12 * scale


def test_integral_vanishes_at_left(rng):
    space = random_space(rng, p_max=4)
    v = integrate_from_left(random_spline(rng, space))
    assert eval_spline(v, v.space.breakpoints.a) == pytest.approx(0.0, abs=1e-14)


# ---------------------------------------------------------------------------
# embedding and polynomial conversion
# ---------------------------------------------------------------------------


def test_constant_has_unit_coefficients_in_any_space(rng):
    for _ in range(5):
        space = random_space(rng, p_max=4)
        s = poly_to_spline(Polynomial([1.0], space.interval), space)
        np.testing.assert_allclose(s.coeffs, 1.0, atol=1e-13)


def test_embed_constant_is_all_ones(rng):
    xi = random_breakpoints(rng, 2)
    src = make_space(1, 0, xi)
    tgt = make_space(3, 0, xi)
    e = embed(Spline(src, np.ones(src.dim)), tgt)
    np.testing.assert_allclose(e.coeffs, 1.0, atol=1e-13)


def test_embed_linear_gives_greville():
    src = make_space(1, 0, Breakpoints(np.array([0.0, 1.0])))
    tgt = make_space(3, 2, Breakpoints(np.array([0.0, 1.0])))
    e = embed(Spline(src, [0.0, 1.0]), tgt)
    np.testing.assert_allclose(e.coeffs, [0.0, 1 / 3, 2 / 3, 1.0], atol=1e-14)


def test_embed_pointwise_match(rng):
    xi = random_breakpoints(rng, 3)
    src = make_space(2, 1, xi)
    tgt = make_space(3, 1, xi)
    s = random_spline(rng, src)
    e = embed(s, tgt)
    xs = rng.uniform(0, 1, 50)
    scale = max(1.0, float(np.max(np.abs(eval_spline_many(s, xs)))))
    assert np.max(np.abs(eval_spline_many(e, xs) - eval_spline_many(s, xs))) <= 1e-12 * scale


def test_embed_ten_point_per_element_tolerance(rng):
    xi = random_breakpoints(rng, 2)
    src = make_space(1, 0, xi)
    tgt = make_space(4, 0, xi)
    s = random_spline(rng, src)
    e = embed(s, tgt)
    pts = xi.points
    for el in range(xi.num_elements):
        xs = np.linspace(pts[el] + 1e-12, pts[el + 1] - 1e-12, 10)
        diff = np.abs(eval_spline_many(e, xs) - eval_spline_many(s, xs))
        assert np.max(diff) <= 1e-12 * max(1.0, np.max(np.abs(eval_spline_many(s, xs))))


def test_embed_rejects_non_superspace():
    xi = Breakpoints(np.array([0.0, 0.5, 1.0]))
    src = make_space(2, 0, xi)
    tgt = make_space(3, 2, xi)  # smoother than the source: not a superspace
    with pytest.raises(ValueError):
        embed(Spline(src, np.zeros(src.dim)), tgt)
    other = make_space(2, 0, Breakpoints(np.array([0.0, 0.4, 1.0])))
    with pytest.raises(ValueError):
        embed(Spline(src, np.zeros(src.dim)), other)


def test_poly_roundtrip(rng):
    xi = random_breakpoints(rng, 2)
    space = make_space(4, 1, xi)
    pol = Polynomial(rng.normal(size=5), space.interval)
    s = poly_to_spline(pol, space)
    xs = rng.uniform(xi.a, xi.b, 40)
    np.testing.assert_allclose(
        eval_spline_many(s, xs), pol.eval(xs), rtol=1e-11, atol=1e-11
    )
    back = spline_to_poly(s)
    np.testing.assert_allclose(back.coeffs, pol.coeffs, rtol=1e-9, atol=1e-10)


def test_poly_to_spline_rejects_high_degree():
    space = make_space(1, 0, Breakpoints(np.array([0.0, 1.0])))
    with pytest.raises(ValueError):
        poly_to_spline(Polynomial([0.0, 0.0, 1.0], (0.0, 1.0)), space)


def test_polynomial_eval_and_derivative():
    pol = Polynomial([1.0, -2.0, 3.0], (0.0, 1.0))  # 1 - 2y + 3y^2, y = x
    assert pol.eval(0.5) == pytest.approx(1 - 1 + 0.75)
    assert pol.eval(0.5, deriv=1) == pytest.approx(-2 + 3.0)
    assert pol.derivative().coeffs.tolist() == [-2.0, 6.0]


def test_spline_coefficient_length_checked():
    space = make_space(2, 1, Breakpoints(np.array([0.0, 1.0])))
    with pytest.raises(ValueError):
        Spline(space, np.zeros(5))
