"""Anti-derivation-error checks for the manufactured sources.

The hand-derived f and g are compared against numerical differentiation of
an independent reimplementation of u: mpmath at 40 digits for the tight
pointwise checks, float64 Richardson differences for the larger sweeps.
"""

import mpmath as mp
import numpy as np
import pytest
from scipy.stats import qmc

from dgdyn.manufactured import ManufacturedCase, example1, example3, get_case

mp.mp.dps = 40


def mp_u(case_name):
    if case_name == "example1":
        return lambda t, x, y: mp.e ** (-10 * t) * (1 - mp.cos(2 * mp.pi * x)) * mp.cos(4 * mp.pi * y)
    return lambda t, x, y: t * (1 - mp.cos(2 * mp.pi * x)) * mp.cos(mp.pi * y)


def mp_residuals(case: ManufacturedCase, t, x, y, boundary=False):
    """Residuals of the defining identities at one point, via mpmath."""
    U = mp_u(case.name)
    du_dt = mp.diff(lambda s: U(s, x, y), t)
    ux = mp.diff(lambda s: U(t, s, y), x)
    uy = mp.diff(lambda s: U(t, x, s), y)
    uxx = mp.diff(lambda s: U(t, s, y), x, 2)
    uyy = mp.diff(lambda s: U(t, x, s), y, 2)
    res = {}
    res["f"] = float(du_dt - (uxx + uyy) - mp.mpf(case.f(t, float(x), float(y))))
    gx, gy = case.grad_u(t, float(x), float(y))
    res["grad"] = float(max(abs(ux - mp.mpf(gx)), abs(uy - mp.mpf(gy))))
    res["du_dt"] = float(du_dt - mp.mpf(case.du_dt(t, float(x), float(y))))
    if boundary:
        normal = -1.0 if y == 0 else 1.0
        g_val = case.lam * du_dt + normal * uy + case.alpha * U(t, x, y) - case.beta * uxx
        res["g"] = float(g_val - mp.mpf(case.g(t, float(x), float(y))))
    return res


@pytest.mark.parametrize("case_fn", [example1, example3])
def test_sources_match_high_precision_oracle(case_fn):
    case = case_fn()
    rng = np.random.default_rng(42)
    for _ in range(50):
        t, x, y = rng.random(3)
        res = mp_residuals(case, t, x, y)
        assert abs(res["f"]) <= 1e-10
        assert abs(res["grad"]) <= 1e-10
        assert abs(res["du_dt"]) <= 1e-10
    for _ in range(50):
        t, x = rng.random(2)
        y = float(rng.integers(0, 2))
        res = mp_residuals(case, t, x, y, boundary=True)
        assert abs(res["g"]) <= 1e-10


def fd_laplacian(u, t, x, y, h=1e-3):
    """Richardson-extrapolated second differences, vectorized."""

    def second(f, z):
        d1 = (f(z + h) - 2.0 * f(z) + f(z - h)) / h**2
        d2 = (f(z + h / 2) - 2.0 * f(z) + f(z - h / 2)) / (h / 2) ** 2
        return (4.0 * d2 - d1) / 3.0

    uxx = second(lambda s: u(t, s, y), x)
    uyy = second(lambda s: u(t, x, s), y)
    return uxx + uyy


def fd_dt(u, t, x, y, h=1e-4):
    d1 = (u(t + h, x, y) - u(t - h, x, y)) / (2 * h)
    d2 = (u(t + h / 2, x, y) - u(t - h / 2, x, y)) / h
    return (4.0 * d2 - d1) / 3.0


@pytest.mark.parametrize("case_fn", [example1, example3])
def test_invariants_at_quasi_random_sample(case_fn):
    case = case_fn()
    pts = qmc.Halton(d=3, seed=0).random(1000)
    t, x, y = pts[:, 0], 0.98 * pts[:, 1] + 0.01, 0.98 * pts[:, 2] + 0.01
    res_f = fd_dt(case.u, t, x, y) - fd_laplacian(case.u, t, x, y) - case.f(t, x, y)
    assert np.abs(res_f).max() <= 1e-6

    for y0, normal in ((np.zeros_like(x), -1.0), (np.ones_like(x), 1.0)):
        h = 1e-4
        # one-sided y-derivative is not needed: u extends smoothly past gamma1
        uy = (case.u(t, x, y0 + h) - case.u(t, x, y0 - h)) / (2 * h)
        uy2 = (case.u(t, x, y0 + h / 2) - case.u(t, x, y0 - h / 2)) / h
        uy = (4.0 * uy2 - uy) / 3.0
        res_g = (
            case.lam * fd_dt(case.u, t, x, y0)
            + normal * uy
            + case.alpha * case.u(t, x, y0)
            - case.beta * fd_second_x(case.u, t, x, y0)
            - case.g(t, x, y0)
        )
        assert np.abs(res_g).max() <= 1e-6


def fd_second_x(u, t, x, y, h=1e-3):
    d1 = (u(t, x + h, y) - 2.0 * u(t, x, y) + u(t, x - h, y)) / h**2
    d2 = (u(t, x + h / 2, y) - 2.0 * u(t, x, y) + u(t, x - h / 2, y)) / (h / 2) ** 2
    return (4.0 * d2 - d1) / 3.0


def test_example1_point_values():
    case = example1()
    assert case.u(0.0, 0.0, 0.0) == 0.0
    assert np.isclose(case.u(0.0, 0.5, 0.0), 2.0, rtol=1e-14)


def test_example1_periodicity():
    case = example1()
    rng = np.random.default_rng(1)
    t, y = rng.random(200), rng.random(200)
    assert np.allclose(case.u(t, 0.0, y), case.u(t, 1.0, y), atol=1e-14)
    gx0, _ = case.grad_u(t, 0.0, y)
    gx1, _ = case.grad_u(t, 1.0, y)
    assert np.allclose(gx0, gx1, atol=1e-13)


def test_example3_point_values():
    case = example3()
    rng = np.random.default_rng(2)
    t, y = rng.random(100), rng.random(100)
    assert np.allclose(case.u(t, 0.0, y), 0.0, atol=1e-14)
    assert np.allclose(case.u(t, 1.0, y), 0.0, atol=1e-13)
    assert np.isclose(case.u(1.0, 0.5, 0.0), 2.0, rtol=1e-14)


def test_case_lookup():
    assert get_case("example1").name == "example1"
    assert get_case("example2").name == "example1"  # shared fields
    assert get_case("example3").bc_mode == "dirichlet_lateral"
    with pytest.raises(ValueError):
        get_case("example9")
