import numpy as np
import pytest

from ritzspline.functions import SmoothFunction
from ritzspline.mesh import Breakpoints, Spline, make_space


def random_breakpoints(rng, n_interior=None, a=0.0, b=1.0):
    """Strictly increasing mesh with well-separated interior points."""
    if n_interior is None:
        n_interior = int(rng.integers(0, 5))
    if n_interior == 0:
        return Breakpoints(np.array([a, b]))
    cuts = np.sort(rng.uniform(0.08, 0.92, size=n_interior))
    while np.any(np.diff(cuts) < 0.02):
        cuts = np.sort(rng.uniform(0.08, 0.92, size=n_interior))
    return Breakpoints(np.concatenate([[a], a + (b - a) * cuts, [b]]))


def random_spline(rng, space):
    return Spline(space, rng.normal(size=space.dim))


def random_space(rng, p_max=5):
    p = int(rng.integers(0, p_max + 1))
    k = int(rng.integers(-1, p))
    return make_space(p, k, random_breakpoints(rng))


def smooth_mix(amp_sin, freq, amp_exp, rate, poly_coeffs):
    """Closed-form smooth function: sine + exponential + cubic polynomial."""
    poly = np.asarray(poly_coeffs, dtype=float)

    def ev(x, d):
        out = amp_sin * freq**d * np.sin(freq * x + d * np.pi / 2.0)
        out = out + amp_exp * rate**d * np.exp(rate * x)
        pc = poly.copy()
        for _ in range(d):
            pc = pc[1:] * np.arange(1, pc.size)
            if pc.size == 0:
                pc = np.zeros(1)
        acc = np.zeros_like(np.asarray(x, dtype=float))
        for c in pc[::-1]:
            acc = acc * x + c
        return out + acc

    return SmoothFunction(ev, 1_000_000, "sine+exp+cubic mix")


def random_smooth(rng):
    return smooth_mix(
        float(rng.uniform(0.3, 2.0)),
        float(rng.uniform(0.5, 6.0)),
        float(rng.uniform(0.2, 1.5)),
        float(rng.uniform(-1.5, 1.5)),
        rng.normal(size=4),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
