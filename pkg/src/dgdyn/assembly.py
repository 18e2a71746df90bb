"""Sparse operators of the interior-penalty discretization.

Assembles the bulk form (volume gradients plus jump/flux terms on interior
and periodic edges), the surface form on the top/bottom boundary (tangential
stiffness on the boundary edges plus point couplings at the ridges), the
mass matrices and time-dependent load vectors.  Everything is built from
batched per-face tables so repeated assembly (one load vector per time
step) stays vectorized.

Quadrature degrees follow a single convention: matrix assembly uses rules
exact to degree 2p, data-dependent vectors (loads, projections) and error
norms use 2p + 4.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .mesh import DIRICHLET_LATERAL, EdgeClassification, Mesh
from .space import DGSpace, edge_quadrature, triangle_quadrature

RIDGE_TANGENT = np.array([1.0, 0.0])  # gamma1 is horizontal


@dataclass(eq=False)
class FormParams:
    """Coefficients of the bilinear forms.

    sigma is the jump penalty; in the default ``gamma_over_h`` mode it is
    gamma / h with the single global mesh size (the mesh is quasi-uniform),
    in ``fixed_sigma`` mode it is the level-independent value gamma.
    """

    alpha: float
    beta: float
    lam: float
    gamma: float
    sigma: float
    penalty_mode: str = "gamma_over_h"

    def __post_init__(self):
        if self.gamma <= 0 or self.sigma <= 0:
            raise ValueError("penalty parameters must be positive")
        if min(self.alpha, self.beta, self.lam) < 0:
            raise ValueError("alpha, beta, lambda must be non-negative")

    @classmethod
    def for_mesh(cls, mesh: Mesh, *, alpha, beta, lam, gamma, penalty_mode="gamma_over_h"):
        if penalty_mode == "gamma_over_h":
            sigma = gamma / mesh.h
        elif penalty_mode == "fixed_sigma":
            sigma = gamma
        else:
            raise ValueError(f"unknown penalty_mode {penalty_mode!r}")
        return cls(alpha=alpha, beta=beta, lam=lam, gamma=gamma, sigma=sigma, penalty_mode=penalty_mode)


# ---------------------------------------------------------------------------
# precomputed evaluation tables


@dataclass(eq=False)
class _VolumeTables:
    w: np.ndarray  # (nq,)
    phi: np.ndarray  # (nq, n_local)
    gphi: np.ndarray  # (n_el, nq, n_local, 2) physical gradients
    x: np.ndarray  # (n_el, nq)
    y: np.ndarray


@dataclass(eq=False)
class _SideTables:
    elem: np.ndarray  # (nE,)
    phi: np.ndarray  # (nE, nq, n_local)
    gphi: np.ndarray  # (nE, nq, n_local, 2)
    x: np.ndarray  # (nE, nq) physical points on this side's realization
    y: np.ndarray


@dataclass(eq=False)
class _FaceTables:
    plus: _SideTables
    minus: _SideTables | None
    normal: np.ndarray  # (nE, 2)
    wl: np.ndarray  # (nE, nq) quadrature weights times edge length


@dataclass(eq=False)
class _RidgeTables:
    """Point evaluations at ridges, split into two-sided and one-sided sets."""

    elem_plus: np.ndarray
    phi_plus: np.ndarray  # (nR, n_local)
    dt_plus: np.ndarray  # tangential derivative of the basis, (nR, n_local)
    sign_plus: np.ndarray
    elem_minus: np.ndarray
    phi_minus: np.ndarray
    dt_minus: np.ndarray
    sign_minus: np.ndarray
    corner_elem: np.ndarray
    corner_phi: np.ndarray
    corner_dt: np.ndarray
    corner_sign: np.ndarray
    corner_x: np.ndarray
    corner_y: np.ndarray


def _side_tables(mesh, space, elems, points) -> _SideTables:
    ref = mesh.to_reference(elems, points)
    phi = space.basis.eval(ref)
    gref = space.basis.grad(ref)
    gphi = np.einsum("eqli,eij->eqlj", gref, mesh.inv_jacobians[elems])
    return _SideTables(elem=elems, phi=phi, gphi=gphi, x=points[..., 0], y=points[..., 1])


@lru_cache(maxsize=16)
def _volume_tables(mesh: Mesh, space: DGSpace, degree: int) -> _VolumeTables:
    rule = triangle_quadrature(degree)
    phi = space.basis.eval(rule.points)
    gref = space.basis.grad(rule.points)
    gphi = np.einsum("qli,eij->eqlj", gref, mesh.inv_jacobians)
    X = mesh.v0[:, None, :] + np.einsum("eij,qj->eqi", mesh.jacobians, rule.points)
    return _VolumeTables(w=rule.weights, phi=phi, gphi=gphi, x=X[..., 0], y=X[..., 1])


def _edge_points(p0, p1, srule):
    return p0[:, None, :] + srule.points[None, :, None] * (p1 - p0)[:, None, :]


@lru_cache(maxsize=16)
def _interior_face_tables(mesh: Mesh, edges: EdgeClassification, space: DGSpace, degree: int) -> _FaceTables:
    """Interior edges and periodic pairs combined (both are two-sided)."""
    srule = edge_quadrature(degree)
    groups = [edges.interior]
    if edges.gamma2_pairs is not None and len(edges.gamma2_pairs):
        groups.append(edges.gamma2_pairs)
    p0 = np.concatenate([g.p0 for g in groups])
    p1 = np.concatenate([g.p1 for g in groups])
    ep = np.concatenate([g.elem_plus for g in groups])
    em = np.concatenate([g.elem_minus for g in groups])
    normal = np.concatenate([g.normal for g in groups])
    length = np.concatenate([g.length for g in groups])
    shift = np.concatenate([g.minus_shift for g in groups])
    pts = _edge_points(p0, p1, srule)
    plus = _side_tables(mesh, space, ep, pts)
    minus = _side_tables(mesh, space, em, pts + shift[:, None, :])
    wl = srule.weights[None, :] * length[:, None]
    return _FaceTables(plus=plus, minus=minus, normal=normal, wl=wl)


@lru_cache(maxsize=16)
def _gamma1_face_tables(mesh: Mesh, edges: EdgeClassification, space: DGSpace, degree: int) -> _FaceTables:
    srule = edge_quadrature(degree)
    g1 = edges.gamma1
    pts = _edge_points(g1.p0, g1.p1, srule)
    plus = _side_tables(mesh, space, g1.elem, pts)
    wl = srule.weights[None, :] * g1.length[:, None]
    return _FaceTables(plus=plus, minus=None, normal=g1.normal, wl=wl)


@lru_cache(maxsize=16)
def _dirichlet_face_tables(mesh: Mesh, edges: EdgeClassification, space: DGSpace, degree: int) -> _FaceTables:
    srule = edge_quadrature(degree)
    de = edges.dirichlet
    pts = _edge_points(de.p0, de.p1, srule)
    plus = _side_tables(mesh, space, de.elem, pts)
    wl = srule.weights[None, :] * de.length[:, None]
    return _FaceTables(plus=plus, minus=None, normal=de.normal, wl=wl)


@lru_cache(maxsize=16)
def _ridge_tables(mesh: Mesh, edges: EdgeClassification, space: DGSpace) -> _RidgeTables:
    r = edges.ridges

    def point_eval(elems, points):
        st = _side_tables(mesh, space, elems, points[:, None, :])
        phi = st.phi[:, 0, :]
        dt = st.gphi[:, 0, :, :] @ RIDGE_TANGENT
        return phi, dt

    two = r.two_sided
    one = ~two
    phi_p, dt_p = point_eval(r.elem_plus[two], r.point_plus[two])
    phi_m, dt_m = point_eval(r.elem_minus[two], r.point_minus[two])
    if one.any():
        phi_c, dt_c = point_eval(r.elem_plus[one], r.point_plus[one])
    else:
        phi_c = np.empty((0, space.n_local))
        dt_c = np.empty((0, space.n_local))
    return _RidgeTables(
        elem_plus=r.elem_plus[two],
        phi_plus=phi_p,
        dt_plus=dt_p,
        sign_plus=r.sign_plus[two],
        elem_minus=r.elem_minus[two],
        phi_minus=phi_m,
        dt_minus=dt_m,
        sign_minus=r.sign_minus[two],
        corner_elem=r.elem_plus[one],
        corner_phi=phi_c,
        corner_dt=dt_c,
        corner_sign=r.sign_plus[one],
        corner_x=r.point_plus[one][:, 0] if one.any() else np.empty(0),
        corner_y=r.point_plus[one][:, 1] if one.any() else np.empty(0),
    )


# ---------------------------------------------------------------------------
# scatter helpers


class _CooBuilder:
    def __init__(self, n):
        self.n = n
        self.rows = []
        self.cols = []
        self.data = []

    def add_blocks(self, dofs_row, dofs_col, blocks):
        shape = blocks.shape
        self.rows.append(np.broadcast_to(dofs_row[:, :, None], shape).ravel())
        self.cols.append(np.broadcast_to(dofs_col[:, None, :], shape).ravel())
        self.data.append(blocks.ravel())

    def tocsr(self) -> sp.csr_matrix:
        if not self.data:
            return sp.csr_matrix((self.n, self.n))
        rows = np.concatenate(self.rows)
        cols = np.concatenate(self.cols)
        data = np.concatenate(self.data)
        A = sp.coo_matrix((data, (rows, cols)), shape=(self.n, self.n)).tocsr()
        A.sum_duplicates()
        A.sort_indices()
        return A


def _two_sided_penalty_blocks(ft: _FaceTables, sigma: float):
    """The four (test side, trial side) blocks of the interior-penalty terms

        -([v], {grad w}) - ([w], {grad v}) + sigma ([v], [w])

    on a batch of two-sided faces."""
    sides = ((ft.plus, 1.0), (ft.minus, -1.0))
    gn = {id(st): np.einsum("eqli,ei->eql", st.gphi, ft.normal) for st, _ in sides}
    out = []
    for st_a, s_a in sides:
        for st_b, s_b in sides:
            block = (
                -0.5 * s_a * np.einsum("eq,eql,eqm->elm", ft.wl, st_a.phi, gn[id(st_b)])
                - 0.5 * s_b * np.einsum("eq,eql,eqm->elm", ft.wl, gn[id(st_a)], st_b.phi)
                + sigma * s_a * s_b * np.einsum("eq,eql,eqm->elm", ft.wl, st_a.phi, st_b.phi)
            )
            out.append((st_a.elem, st_b.elem, block))
    return out


def _ridge_blocks(phis, dts, signs, elems, sigma, half_average):
    """Point coupling blocks -[v]{d w} - [w]{d v} + sigma [v][w] over the
    given ridge slots (two entries for a two-sided ridge, one for a corner)."""
    factor = 0.5 if half_average else 1.0
    out = []
    for phi_a, dt_a, s_a, el_a in zip(phis, dts, signs, elems):
        for phi_b, dt_b, s_b, el_b in zip(phis, dts, signs, elems):
            block = (
                -factor * s_a[:, None, None] * np.einsum("el,em->elm", phi_a, dt_b)
                - factor * s_b[:, None, None] * np.einsum("el,em->elm", dt_a, phi_b)
                + sigma * (s_a * s_b)[:, None, None] * np.einsum("el,em->elm", phi_a, phi_b)
            )
            out.append((el_a, el_b, block))
    return out


# ---------------------------------------------------------------------------
# public assembly entry points


def assemble_Bh(mesh: Mesh, edges: EdgeClassification, space: DGSpace, params: FormParams) -> sp.csr_matrix:
    """Bulk bilinear form: broken gradients plus symmetric interior-penalty
    terms on interior edges and periodic pairs.  Constants lie in the
    kernel; the matrix is symmetric."""
    builder = _CooBuilder(space.n_dofs)
    vol = _volume_tables(mesh, space, 2 * space.p)
    stiff = np.einsum("q,e,eqli,eqmi->elm", vol.w, mesh.det_jacobians, vol.gphi, vol.gphi)
    builder.add_blocks(space.dofs, space.dofs, stiff)

    ft = _interior_face_tables(mesh, edges, space, 2 * space.p)
    for el_a, el_b, block in _two_sided_penalty_blocks(ft, params.sigma):
        builder.add_blocks(space.dofs[el_a], space.dofs[el_b], block)
    return builder.tocsr()


def assemble_bh(mesh: Mesh, edges: EdgeClassification, space: DGSpace, params: FormParams) -> sp.csr_matrix:
    """Surface form on gamma1: tangential stiffness along the boundary edges
    plus jump/flux point couplings at the (two-sided) ridges.

    One-sided corner ridges of the Dirichlet variant are excluded here;
    they enter through assemble_dirichlet_terms."""
    builder = _CooBuilder(space.n_dofs)
    ft = _gamma1_face_tables(mesh, edges, space, 2 * space.p)
    dt = np.einsum("eqli,i->eql", ft.plus.gphi, RIDGE_TANGENT)
    builder.add_blocks(
        space.dofs[ft.plus.elem],
        space.dofs[ft.plus.elem],
        np.einsum("eq,eql,eqm->elm", ft.wl, dt, dt),
    )

    rt = _ridge_tables(mesh, edges, space)
    blocks = _ridge_blocks(
        (rt.phi_plus, rt.phi_minus),
        (rt.dt_plus, rt.dt_minus),
        (rt.sign_plus, rt.sign_minus),
        (rt.elem_plus, rt.elem_minus),
        params.sigma,
        half_average=True,
    )
    for el_a, el_b, block in blocks:
        builder.add_blocks(space.dofs[el_a], space.dofs[el_b], block)
    return builder.tocsr()


def assemble_boundary_mass(mesh: Mesh, edges: EdgeClassification, space: DGSpace) -> sp.csr_matrix:
    """L2(gamma1) mass matrix."""
    builder = _CooBuilder(space.n_dofs)
    ft = _gamma1_face_tables(mesh, edges, space, 2 * space.p)
    block = np.einsum("eq,eql,eqm->elm", ft.wl, ft.plus.phi, ft.plus.phi)
    builder.add_blocks(space.dofs[ft.plus.elem], space.dofs[ft.plus.elem], block)
    return builder.tocsr()


def assemble_domain_mass(mesh: Mesh, space: DGSpace) -> sp.csr_matrix:
    """L2(Omega) mass matrix (block diagonal for the DG dof layout)."""
    builder = _CooBuilder(space.n_dofs)
    vol = _volume_tables(mesh, space, 2 * space.p)
    ref = np.einsum("q,ql,qm->lm", vol.w, vol.phi, vol.phi)
    builder.add_blocks(space.dofs, space.dofs, mesh.det_jacobians[:, None, None] * ref)
    return builder.tocsr()


def assemble_mass(mesh: Mesh, edges: EdgeClassification, space: DGSpace, lam: float) -> sp.csr_matrix:
    """Weighted mass matrix (u, v)_Omega + lam (u, v)_gamma1."""
    M = assemble_domain_mass(mesh, space) + lam * assemble_boundary_mass(mesh, edges, space)
    M.sum_duplicates()
    M.sort_indices()
    return M


def assemble_Ah(mesh: Mesh, edges: EdgeClassification, space: DGSpace, params: FormParams) -> sp.csr_matrix:
    """Full stationary operator: bulk form + alpha boundary mass + beta
    surface form.  Positive definite for gamma large enough when alpha > 0."""
    A = (
        assemble_Bh(mesh, edges, space, params)
        + params.alpha * assemble_boundary_mass(mesh, edges, space)
        + params.beta * assemble_bh(mesh, edges, space, params)
    )
    A.sum_duplicates()
    A.sort_indices()
    return A


def assemble_load(mesh: Mesh, edges: EdgeClassification, space: DGSpace, f, g, t: float = 0.0) -> np.ndarray:
    """Load vector (f, v)_Omega + (g, v)_gamma1 at time t.

    f and g are callables (t, x, y) -> array; either may be None for a zero
    source."""
    load = np.zeros(space.n_dofs)
    if f is not None:
        vol = _volume_tables(mesh, space, 2 * space.p + 4)
        fv = np.asarray(f(t, vol.x, vol.y), dtype=float)
        local = np.einsum("q,e,eq,ql->el", vol.w, mesh.det_jacobians, fv, vol.phi)
        load += local.ravel()  # dofs are contiguous per element
    if g is not None:
        ft = _gamma1_face_tables(mesh, edges, space, 2 * space.p + 4)
        gv = np.asarray(g(t, ft.plus.x, ft.plus.y), dtype=float)
        local = np.einsum("eq,eq,eql->el", ft.wl, gv, ft.plus.phi)
        np.add.at(load, space.dofs[ft.plus.elem], local)
    return load


def assemble_dirichlet_terms(
    mesh: Mesh,
    edges: EdgeClassification,
    space: DGSpace,
    params: FormParams,
    u_D=None,
    t: float = 0.0,
) -> tuple[sp.csr_matrix, np.ndarray]:
    """Weak Dirichlet coupling for the lateral boundary (Example 3 variant).

    Returns the symmetric matrix delta to add to the full operator and the
    matching right-hand-side contribution for the boundary datum u_D
    (zero vector for homogeneous data).  The matrix carries the Nitsche
    terms on the lateral edges and, scaled by beta, the one-sided endpoint
    terms of the surface operator at the corner ridges."""
    if edges.bc_mode != DIRICHLET_LATERAL:
        raise ValueError("Dirichlet terms require bc_mode='dirichlet_lateral'")
    sigma = params.sigma
    builder = _CooBuilder(space.n_dofs)
    rhs = np.zeros(space.n_dofs)

    ft = _dirichlet_face_tables(mesh, edges, space, 2 * space.p)
    gn = np.einsum("eqli,ei->eql", ft.plus.gphi, ft.normal)
    block = (
        -np.einsum("eq,eql,eqm->elm", ft.wl, ft.plus.phi, gn)
        - np.einsum("eq,eql,eqm->elm", ft.wl, gn, ft.plus.phi)
        + sigma * np.einsum("eq,eql,eqm->elm", ft.wl, ft.plus.phi, ft.plus.phi)
    )
    builder.add_blocks(space.dofs[ft.plus.elem], space.dofs[ft.plus.elem], block)

    rt = _ridge_tables(mesh, edges, space)
    if len(rt.corner_elem):
        blocks = _ridge_blocks(
            (rt.corner_phi,), (rt.corner_dt,), (rt.corner_sign,), (rt.corner_elem,), sigma, half_average=False
        )
        for el_a, el_b, b in blocks:
            builder.add_blocks(space.dofs[el_a], space.dofs[el_b], params.beta * b)

    if u_D is not None:
        fte = _dirichlet_face_tables(mesh, edges, space, 2 * space.p + 4)
        gne = np.einsum("eqli,ei->eql", fte.plus.gphi, fte.normal)
        ud = np.asarray(u_D(t, fte.plus.x, fte.plus.y), dtype=float)
        local = np.einsum("eq,eq,eql->el", fte.wl, ud, sigma * fte.plus.phi - gne)
        np.add.at(rhs, space.dofs[fte.plus.elem], local)
        if len(rt.corner_elem):
            udr = np.asarray(u_D(t, rt.corner_x, rt.corner_y), dtype=float)
            local = (
                params.beta
                * udr[:, None]
                * (sigma * rt.corner_phi - rt.corner_sign[:, None] * rt.corner_dt)
            )
            np.add.at(rhs, space.dofs[rt.corner_elem], local)

    return builder.tocsr(), rhs


def dump_matrix(A: sp.spmatrix, path) -> None:
    """Write a matrix as text: header line ``n nnz`` then one
    ``row col value`` line per stored entry (0-based indices)."""
    A = A.tocsr()
    A.sum_duplicates()
    A.sort_indices()
    coo = A.tocoo()
    with open(path, "w") as fh:
        fh.write(f"{A.shape[0]} {A.nnz}\n")
        for r, c, v in zip(coo.row, coo.col, coo.data):
            fh.write(f"{r} {c} {v:.17e}\n")
