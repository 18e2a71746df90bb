"""Closed-form test cases with sources derived from the exact solution.

Each case provides u, its gradient and time derivative, the bulk source
f = du/dt - laplace(u), and the boundary source

    g = lam * du/dt + du/dn + alpha * u - beta * d2u/dx2   on gamma1,

with du/dn = -du/dy on the bottom component and +du/dy on the top.  The
sources are hand-derived closed forms; the test suite validates them
against high-precision numerical differentiation of u.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mesh import DIRICHLET_LATERAL, PERIODIC

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class ManufacturedCase:
    name: str
    bc_mode: str
    alpha: float
    beta: float
    lam: float
    u: callable  # u(t, x, y)
    grad_u: callable  # (t, x, y) -> (du/dx, du/dy)
    du_dt: callable
    f: callable
    g: callable  # valid on gamma1 only (y = 0 or y = 1)

    def u0(self, x, y):
        return self.u(0.0, x, y)


def example1(alpha: float = 2.0, beta: float = 5.0, lam: float = 10.0) -> ManufacturedCase:
    """u = exp(-10 t) (1 - cos(2 pi x)) cos(4 pi y), periodic in x."""

    def u(t, x, y):
        return np.exp(-10.0 * t) * (1.0 - np.cos(TWO_PI * x)) * np.cos(2.0 * TWO_PI * y)

    def grad_u(t, x, y):
        e = np.exp(-10.0 * t)
        gx = e * TWO_PI * np.sin(TWO_PI * x) * np.cos(2.0 * TWO_PI * y)
        gy = -e * 2.0 * TWO_PI * (1.0 - np.cos(TWO_PI * x)) * np.sin(2.0 * TWO_PI * y)
        return gx, gy

    def du_dt(t, x, y):
        return -10.0 * u(t, x, y)

    def f(t, x, y):
        # du/dt - laplace(u); laplace(u) = e cos(4 pi y)
        #   [4 pi^2 cos(2 pi x) - 16 pi^2 (1 - cos(2 pi x))]
        e = np.exp(-10.0 * t)
        c = np.cos(TWO_PI * x)
        lap = e * np.cos(2.0 * TWO_PI * y) * (TWO_PI**2 * c - 4.0 * TWO_PI**2 * (1.0 - c))
        return du_dt(t, x, y) - lap

    def g(t, x, y):
        # normal derivative vanishes on both components (sin(4 pi y) = 0)
        e = np.exp(-10.0 * t)
        c = np.cos(TWO_PI * x)
        return np.cos(2.0 * TWO_PI * y) * e * ((alpha - 10.0 * lam) * (1.0 - c) - beta * TWO_PI**2 * c)

    return ManufacturedCase(
        name="example1", bc_mode=PERIODIC, alpha=alpha, beta=beta, lam=lam,
        u=u, grad_u=grad_u, du_dt=du_dt, f=f, g=g,
    )


def example3(alpha: float = 2.0, beta: float = 5.0, lam: float = 10.0) -> ManufacturedCase:
    """u = t (1 - cos(2 pi x)) cos(pi y); vanishes on the lateral boundary,
    so homogeneous Dirichlet data there is consistent."""

    def u(t, x, y):
        return t * (1.0 - np.cos(TWO_PI * x)) * np.cos(np.pi * y)

    def grad_u(t, x, y):
        gx = t * TWO_PI * np.sin(TWO_PI * x) * np.cos(np.pi * y)
        gy = -t * np.pi * (1.0 - np.cos(TWO_PI * x)) * np.sin(np.pi * y)
        return gx, gy

    def du_dt(t, x, y):
        return (1.0 - np.cos(TWO_PI * x)) * np.cos(np.pi * y)

    def f(t, x, y):
        c = np.cos(TWO_PI * x)
        lap = t * np.cos(np.pi * y) * (TWO_PI**2 * c - np.pi**2 * (1.0 - c))
        return du_dt(t, x, y) - lap

    def g(t, x, y):
        # du/dy = 0 on y in {0, 1} (sin(pi y) = 0); cos(pi y) = +/-1 selects
        # the component
        c = np.cos(TWO_PI * x)
        return np.cos(np.pi * y) * (lam * (1.0 - c) + alpha * t * (1.0 - c) - beta * TWO_PI**2 * t * c)

    return ManufacturedCase(
        name="example3", bc_mode=DIRICHLET_LATERAL, alpha=alpha, beta=beta, lam=lam,
        u=u, grad_u=grad_u, du_dt=du_dt, f=f, g=g,
    )


def get_case(name: str) -> ManufacturedCase:
    """Case lookup; example2 reuses example1's fields (it differs only in
    the run configuration)."""
    if name in ("example1", "example2"):
        return example1()
    if name == "example3":
        return example3()
    raise ValueError(f"unknown case {name!r}")
