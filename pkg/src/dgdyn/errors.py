"""Error norms and convergence rates.

The energy norm combines the broken H1 seminorm, the penalty-scaled jumps
and averaged gradients on interior/periodic (or Dirichlet) edges, the
weighted boundary terms on gamma1 and the point jump/average terms at the
ridges.  Arguments may be a DG coefficient vector, an exact field (value
and gradient callables) or both, in which case the norm of the difference
``exact - u_h`` is computed; exact fields contribute no jumps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .assembly import (
    RIDGE_TANGENT,
    FormParams,
    _dirichlet_face_tables,
    _gamma1_face_tables,
    _interior_face_tables,
    _ridge_tables,
    _volume_tables,
)
from .mesh import EdgeClassification, Mesh
from .space import DGSpace


@dataclass
class ErrorRecord:
    """One row of a convergence table."""

    h: float
    dt: float
    l2_domain: float
    l2_gamma1: float
    energy: float  # (dt * sum_k |||e^k|||^2)^(1/2) accumulated over the run
    rate_l2_domain: float | None = None
    rate_l2_gamma1: float | None = None
    rate_energy: float | None = None


def rate(err_coarse: float, err_fine: float, factor: float = 2.0) -> float:
    """log(err_coarse / err_fine) / log(factor)."""
    if err_coarse <= 0 or err_fine <= 0:
        raise ValueError("errors must be positive to compute a rate")
    return math.log(err_coarse / err_fine) / math.log(factor)


def _as_field(exact):
    if exact is None:
        return None, None
    if hasattr(exact, "u"):
        return exact.u, getattr(exact, "grad_u", None)
    if isinstance(exact, tuple):
        value, grad = exact
        return value, grad
    return exact, None


def _side_values(side, space, coeffs, value_fn, t):
    val = np.zeros_like(side.x)
    if value_fn is not None:
        val = val + np.asarray(value_fn(t, side.x, side.y), dtype=float)
    if coeffs is not None:
        dg = np.einsum("eql,el->eq", side.phi, coeffs[space.dofs[side.elem]])
        val = val - dg if value_fn is not None else dg
    return val


def _side_grads(side, space, coeffs, grad_fn, t):
    g = np.zeros(side.x.shape + (2,))
    if grad_fn is not None:
        gx, gy = grad_fn(t, side.x, side.y)
        g = g + np.stack([np.asarray(gx, float), np.asarray(gy, float)], axis=-1)
    if coeffs is not None:
        dg = np.einsum("eqli,el->eqi", side.gphi, coeffs[space.dofs[side.elem]])
        g = g - dg if grad_fn is not None else dg
    return g


def energy_norm_terms(
    mesh: Mesh,
    edges: EdgeClassification,
    space: DGSpace,
    params: FormParams,
    u_h: np.ndarray | None = None,
    exact=None,
    t: float = 0.0,
) -> dict[str, float]:
    """Squared contributions of every term of the energy norm."""
    value_fn, grad_fn = _as_field(exact)
    if value_fn is not None and grad_fn is None:
        raise ValueError("exact field needs a gradient for the energy norm")
    if u_h is None and value_fn is None:
        raise ValueError("nothing to measure")
    sigma = params.sigma
    degree = 2 * space.p + 4
    terms: dict[str, float] = {}

    vol = _volume_tables(mesh, space, degree)
    grad_vol = np.zeros(vol.x.shape + (2,))
    if grad_fn is not None:
        gx, gy = grad_fn(t, vol.x, vol.y)
        grad_vol += np.stack([np.asarray(gx, float), np.asarray(gy, float)], axis=-1)
    if u_h is not None:
        dg = np.einsum("eqli,el->eqi", vol.gphi, u_h[space.dofs])
        grad_vol = grad_vol - dg if grad_fn is not None else dg
    terms["h1_broken"] = float(
        np.einsum("q,e,eqi,eqi->", vol.w, mesh.det_jacobians, grad_vol, grad_vol)
    )

    # interior and periodic edges: sigma |[w]|^2 + (1/sigma) |{grad w}|^2
    ft = _interior_face_tables(mesh, edges, space, degree)
    vp = _side_values(ft.plus, space, u_h, value_fn, t)
    vm = _side_values(ft.minus, space, u_h, value_fn, t)
    gp = _side_grads(ft.plus, space, u_h, grad_fn, t)
    gm = _side_grads(ft.minus, space, u_h, grad_fn, t)
    jump = vp - vm
    avg = 0.5 * (gp + gm)
    jump2 = float(np.einsum("eq,eq->", ft.wl, jump**2))
    avg2 = float(np.einsum("eq,eqi,eqi->", ft.wl, avg, avg))
    if edges.dirichlet is not None and len(edges.dirichlet):
        fd = _dirichlet_face_tables(mesh, edges, space, degree)
        vd = _side_values(fd.plus, space, u_h, value_fn, t)
        gd = _side_grads(fd.plus, space, u_h, grad_fn, t)
        jump2 += float(np.einsum("eq,eq->", fd.wl, vd**2))
        avg2 += float(np.einsum("eq,eqi,eqi->", fd.wl, gd, gd))
    terms["jump_penalty"] = sigma * jump2
    terms["grad_average"] = avg2 / sigma

    # gamma1: alpha ||w||^2 + beta |w|_H1^2 along the boundary
    fg = _gamma1_face_tables(mesh, edges, space, degree)
    vg = _side_values(fg.plus, space, u_h, value_fn, t)
    gg = _side_grads(fg.plus, space, u_h, grad_fn, t)
    dt_g = gg @ RIDGE_TANGENT
    terms["alpha_boundary"] = params.alpha * float(np.einsum("eq,eq->", fg.wl, vg**2))
    terms["beta_tangential"] = params.beta * float(np.einsum("eq,eq->", fg.wl, dt_g**2))

    # ridges: beta sigma [w]^2 + (beta/sigma) {d_t w}^2 point sums
    rt = _ridge_tables(mesh, edges, space)
    r = edges.ridges
    two = r.two_sided
    rj2 = 0.0
    ra2 = 0.0
    if two.any():

        def point_vals(phi, dt, elems, points):
            val = np.zeros(len(elems))
            dtan = np.zeros(len(elems))
            if value_fn is not None:
                val += np.asarray(value_fn(t, points[:, 0], points[:, 1]), float)
                gx, gy = grad_fn(t, points[:, 0], points[:, 1])
                dtan += np.asarray(gx, float)
            if u_h is not None:
                v_dg = np.einsum("el,el->e", phi, u_h[space.dofs[elems]])
                d_dg = np.einsum("el,el->e", dt, u_h[space.dofs[elems]])
                if value_fn is not None:
                    val -= v_dg
                    dtan -= d_dg
                else:
                    val, dtan = v_dg, d_dg
            return val, dtan

        vp_r, dp_r = point_vals(rt.phi_plus, rt.dt_plus, rt.elem_plus, r.point_plus[two])
        vm_r, dm_r = point_vals(rt.phi_minus, rt.dt_minus, rt.elem_minus, r.point_minus[two])
        jr = rt.sign_plus * vp_r + rt.sign_minus * vm_r
        ar = 0.5 * (dp_r + dm_r)
        rj2 += float((jr**2).sum())
        ra2 += float((ar**2).sum())
    if len(rt.corner_elem):
        val = np.zeros(len(rt.corner_elem))
        dtan = np.zeros(len(rt.corner_elem))
        if value_fn is not None:
            val += np.asarray(value_fn(t, rt.corner_x, rt.corner_y), float)
            gx, _ = grad_fn(t, rt.corner_x, rt.corner_y)
            dtan += np.asarray(gx, float)
        if u_h is not None:
            v_dg = np.einsum("el,el->e", rt.corner_phi, u_h[space.dofs[rt.corner_elem]])
            d_dg = np.einsum("el,el->e", rt.corner_dt, u_h[space.dofs[rt.corner_elem]])
            if value_fn is not None:
                val -= v_dg
                dtan -= d_dg
            else:
                val, dtan = v_dg, d_dg
        rj2 += float(((rt.corner_sign * val) ** 2).sum())
        ra2 += float((dtan**2).sum())
    terms["ridge_jump"] = params.beta * sigma * rj2
    terms["ridge_average"] = params.beta / sigma * ra2
    return terms


def energy_norm(mesh, edges, space, params, u_h=None, exact=None, t: float = 0.0) -> float:
    """Mesh-dependent energy norm of u_h, an exact field, or exact - u_h."""
    terms = energy_norm_terms(mesh, edges, space, params, u_h=u_h, exact=exact, t=t)
    return math.sqrt(sum(terms.values()))


def l2_errors(mesh, edges, space, lam, u_h, exact, t: float = 0.0) -> tuple[float, float, float]:
    """(L2(Omega), L2(gamma1), L2_lambda) norms of exact - u_h.

    Either argument may be None to measure the other alone; the lambda-
    weighted norm satisfies l2_lambda^2 = l2_domain^2 + lam * l2_gamma1^2.
    """
    value_fn, _ = _as_field(exact)
    degree = 2 * space.p + 4
    vol = _volume_tables(mesh, space, degree)
    diff = np.zeros_like(vol.x)
    if value_fn is not None:
        diff = diff + np.asarray(value_fn(t, vol.x, vol.y), float)
    if u_h is not None:
        dg = np.einsum("ql,el->eq", vol.phi, u_h[space.dofs])
        diff = diff - dg if value_fn is not None else dg
    l2_dom = math.sqrt(float(np.einsum("q,e,eq->", vol.w, mesh.det_jacobians, diff**2)))

    fg = _gamma1_face_tables(mesh, edges, space, degree)
    diffb = _side_values(fg.plus, space, u_h, value_fn, t)
    l2_g1 = math.sqrt(float(np.einsum("eq,eq->", fg.wl, diffb**2)))
    return l2_dom, l2_g1, math.sqrt(l2_dom**2 + lam * l2_g1**2)
