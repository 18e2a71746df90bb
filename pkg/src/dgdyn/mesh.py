"""Structured triangulations of a rectangle with classified edges and ridges.

The domain is a rectangle whose top and bottom sides carry the dynamic
boundary condition (``gamma1``) and whose left and right sides are either
identified periodically or treated as a weak Dirichlet boundary
(``gamma2``).  Meshes are uniform N x N grids of cells (N = 2**level), each
cell split along the lower-left to upper-right diagonal.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

PERIODIC = "periodic"
DIRICHLET_LATERAL = "dirichlet_lateral"

BC_MODES = (PERIODIC, DIRICHLET_LATERAL)


class MeshError(Exception):
    """Raised for malformed meshes (e.g. an edge shared by >2 triangles)."""


@dataclass(frozen=True)
class Rectangle:
    """Axis-aligned rectangle (a, b) x (c, d)."""

    a: float = 0.0
    b: float = 1.0
    c: float = 0.0
    d: float = 1.0

    def __post_init__(self):
        if not (self.a < self.b and self.c < self.d):
            raise ValueError(f"degenerate rectangle: {self}")

    @property
    def width(self) -> float:
        return self.b - self.a

    @property
    def height(self) -> float:
        return self.d - self.c

    @property
    def area(self) -> float:
        return self.width * self.height


UNIT_SQUARE = Rectangle(0.0, 1.0, 0.0, 1.0)


@dataclass(eq=False)
class Mesh:
    """Immutable triangulation.

    vertices are enumerated row-major on the (N+1) x (N+1) grid of nodes,
    triangles are counterclockwise vertex index triples, and ``h`` is the
    mesh size (the cell diagonal, i.e. the longest edge).
    """

    domain: Rectangle
    level: int
    vertices: np.ndarray  # (n_vertices, 2)
    triangles: np.ndarray  # (n_triangles, 3) int
    h: float

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    @property
    def n_cells_per_side(self) -> int:
        return 2**self.level

    # Affine geometry, shared by assembly and error evaluation.  The map
    # from the reference triangle (0,0)-(1,0)-(0,1) to triangle t is
    # x = v0[t] + J[t] @ x_ref.

    @cached_property
    def v0(self) -> np.ndarray:
        return self.vertices[self.triangles[:, 0]]

    @cached_property
    def jacobians(self) -> np.ndarray:
        p0 = self.vertices[self.triangles[:, 0]]
        p1 = self.vertices[self.triangles[:, 1]]
        p2 = self.vertices[self.triangles[:, 2]]
        return np.stack([p1 - p0, p2 - p0], axis=-1)  # columns are the edges

    @cached_property
    def det_jacobians(self) -> np.ndarray:
        J = self.jacobians
        return J[:, 0, 0] * J[:, 1, 1] - J[:, 0, 1] * J[:, 1, 0]

    @cached_property
    def inv_jacobians(self) -> np.ndarray:
        J = self.jacobians
        det = self.det_jacobians
        inv = np.empty_like(J)
        inv[:, 0, 0] = J[:, 1, 1]
        inv[:, 0, 1] = -J[:, 0, 1]
        inv[:, 1, 0] = -J[:, 1, 0]
        inv[:, 1, 1] = J[:, 0, 0]
        return inv / det[:, None, None]

    @cached_property
    def areas(self) -> np.ndarray:
        return 0.5 * self.det_jacobians

    @cached_property
    def centroids(self) -> np.ndarray:
        return self.vertices[self.triangles].mean(axis=1)

    def to_reference(self, elems: np.ndarray, points: np.ndarray) -> np.ndarray:
        """Map physical ``points`` (..., 2) into the reference coordinates of
        the elements ``elems`` (broadcast along leading axes)."""
        diff = points - self.v0[elems][..., None, :]
        return np.einsum("...ij,...qj->...qi", self.inv_jacobians[elems], diff)


def build_structured_mesh(level: int, domain: Rectangle = UNIT_SQUARE) -> Mesh:
    """Uniformly refined structured triangular grid.

    N = 2**level cells per side; each cell is split by its lower-left to
    upper-right diagonal into a lower triangle (v00, v10, v11) and an upper
    triangle (v00, v11, v01), both counterclockwise.
    """
    if level < 0:
        raise ValueError("level must be >= 0")
    n = 2**level
    xs = np.linspace(domain.a, domain.b, n + 1)
    ys = np.linspace(domain.c, domain.d, n + 1)
    X, Y = np.meshgrid(xs, ys)  # row-major: index = j*(n+1) + i
    vertices = np.column_stack([X.ravel(), Y.ravel()])

    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    i = i.ravel(order="F")
    j = j.ravel(order="F")
    v00 = j * (n + 1) + i
    v10 = v00 + 1
    v01 = v00 + (n + 1)
    v11 = v01 + 1
    lower = np.column_stack([v00, v10, v11])
    upper = np.column_stack([v00, v11, v01])
    # cell (i, j) owns triangles 2*(j*n+i) (lower) and 2*(j*n+i)+1 (upper)
    triangles = np.empty((2 * n * n, 3), dtype=np.int64)
    triangles[0::2] = lower
    triangles[1::2] = upper

    dx = domain.width / n
    dy = domain.height / n
    h = float(np.hypot(dx, dy))
    return Mesh(domain=domain, level=level, vertices=vertices, triangles=triangles, h=h)


@dataclass(eq=False)
class TwoSidedFaces:
    """Edges with two adjacent elements: interior edges and periodic pairs.

    Endpoints ``p0``/``p1`` are on the plus-side realization of the edge;
    ``minus_shift`` translates plus-side points onto the minus-side
    realization (zero for interior edges).  The normal is unit length and
    points from the plus to the minus element.
    """

    p0: np.ndarray
    p1: np.ndarray
    elem_plus: np.ndarray
    elem_minus: np.ndarray
    normal: np.ndarray
    length: np.ndarray
    minus_shift: np.ndarray

    def __len__(self) -> int:
        return len(self.elem_plus)


@dataclass(eq=False)
class BoundaryFaces:
    """One-sided boundary edges with outward unit normal.

    ``component`` is 0/1 for bottom/top on gamma1 and 0/1 for left/right on
    the lateral boundary.
    """

    p0: np.ndarray
    p1: np.ndarray
    elem: np.ndarray
    normal: np.ndarray
    length: np.ndarray
    component: np.ndarray

    def __len__(self) -> int:
        return len(self.elem)


@dataclass(eq=False)
class Ridges:
    """Vertices of the 1D surface mesh on gamma1.

    Every ridge carries one or two (element, point, tangent sign) slots.
    Two-sided ridges join the two gamma1 edges that share the vertex
    (periodic corner vertices are fused into a single ridge); one-sided
    ridges are the Dirichlet endpoints of the surface operator in
    dirichlet_lateral mode.  Signs are the outward tangent directions of
    the adjacent edges, so sign_plus == -sign_minus on two-sided ridges.
    """

    vertex: np.ndarray
    edge_plus: np.ndarray
    elem_plus: np.ndarray
    point_plus: np.ndarray
    sign_plus: np.ndarray
    edge_minus: np.ndarray  # -1 on one-sided ridges
    elem_minus: np.ndarray
    point_minus: np.ndarray
    sign_minus: np.ndarray
    two_sided: np.ndarray  # bool mask

    def __len__(self) -> int:
        return len(self.vertex)

    @property
    def n_two_sided(self) -> int:
        return int(self.two_sided.sum())


@dataclass(eq=False)
class EdgeClassification:
    """All mesh edges, each in exactly one category."""

    bc_mode: str
    interior: TwoSidedFaces
    gamma1: BoundaryFaces
    gamma2_pairs: TwoSidedFaces | None
    dirichlet: BoundaryFaces | None
    ridges: Ridges

    @property
    def n_interior(self) -> int:
        return len(self.interior)

    @property
    def n_gamma1(self) -> int:
        return len(self.gamma1)

    @property
    def n_periodic_pairs(self) -> int:
        return 0 if self.gamma2_pairs is None else len(self.gamma2_pairs)

    @property
    def n_dirichlet(self) -> int:
        return 0 if self.dirichlet is None else len(self.dirichlet)

    @property
    def n_ridges(self) -> int:
        return len(self.ridges)


def classify_edges(mesh: Mesh, bc_mode: str = PERIODIC) -> EdgeClassification:
    """Classify every geometric edge of a structured mesh.

    In periodic mode the lateral edges are matched into left/right pairs by
    identical y-interval and the four corner vertices fuse into one ridge
    per boundary component.  In dirichlet_lateral mode the lateral edges
    form a separate Dirichlet set and the corners become one-sided ridges.
    """
    if bc_mode not in BC_MODES:
        raise ValueError(f"unknown bc_mode {bc_mode!r}")
    n = mesh.n_cells_per_side
    verts = mesh.vertices
    tris = mesh.triangles

    # Edge -> incident (triangle, opposite local vertex) map.
    incidence: dict[tuple[int, int], list[int]] = {}
    for t, (a, b, c) in enumerate(tris):
        for va, vb in ((a, b), (b, c), (c, a)):
            key = (va, vb) if va < vb else (vb, va)
            incidence.setdefault(key, []).append(t)

    interior_rows = []
    gamma1_rows = []  # (key, elem, component)
    left_rows = {}  # j-row of lower endpoint -> (key, elem)
    right_rows = {}

    for key in sorted(incidence):
        elems = incidence[key]
        if len(elems) > 2:
            raise MeshError(f"edge {key} shared by {len(elems)} triangles")
        va, vb = key
        ia, ja = int(va) % (n + 1), int(va) // (n + 1)
        ib, jb = int(vb) % (n + 1), int(vb) // (n + 1)
        if len(elems) == 2:
            interior_rows.append((key, elems[0], elems[1]))
            continue
        (t,) = elems
        if ja == 0 and jb == 0:
            gamma1_rows.append((key, t, 0))
        elif ja == n and jb == n:
            gamma1_rows.append((key, t, 1))
        elif ia == 0 and ib == 0:
            left_rows[min(ja, jb)] = (key, t)
        elif ia == n and ib == n:
            right_rows[min(ja, jb)] = (key, t)
        else:  # pragma: no cover - impossible for the structured construction
            raise MeshError(f"boundary edge {key} on no boundary")

    interior = _build_two_sided(mesh, interior_rows)
    gamma1 = _build_gamma1(mesh, gamma1_rows)

    gamma2_pairs = None
    dirichlet = None
    if bc_mode == PERIODIC:
        if set(left_rows) != set(right_rows):  # pragma: no cover
            raise MeshError("unmatched periodic edges")
        pair_rows = []
        for j in sorted(right_rows):
            rkey, rtri = right_rows[j]
            lkey, ltri = left_rows[j]
            pair_rows.append((rkey, rtri, ltri))
        gamma2_pairs = _build_two_sided(
            mesh, pair_rows, shift=np.array([-mesh.domain.width, 0.0]), normal=np.array([1.0, 0.0])
        )
    else:
        dirichlet = _build_dirichlet(mesh, left_rows, right_rows)

    ridges = _build_ridges(mesh, gamma1, bc_mode)
    return EdgeClassification(
        bc_mode=bc_mode,
        interior=interior,
        gamma1=gamma1,
        gamma2_pairs=gamma2_pairs,
        dirichlet=dirichlet,
        ridges=ridges,
    )


def _build_two_sided(mesh, rows, shift=None, normal=None) -> TwoSidedFaces:
    if not rows:
        keys = np.empty((0, 2), dtype=int)
        ep = em = np.empty(0, dtype=int)
    elif shift is None:
        # interior edges: the plus element is the one with the smaller index
        keys = np.array([r[0] for r in rows], dtype=int)
        ep = np.array([min(r[1], r[2]) for r in rows], dtype=int)
        em = np.array([max(r[1], r[2]) for r in rows], dtype=int)
    else:
        # periodic pairs: plus is the element on the right boundary
        keys = np.array([r[0] for r in rows], dtype=int)
        ep = np.array([r[1] for r in rows], dtype=int)
        em = np.array([r[2] for r in rows], dtype=int)
    p0 = mesh.vertices[keys[:, 0]] if len(rows) else np.empty((0, 2))
    p1 = mesh.vertices[keys[:, 1]] if len(rows) else np.empty((0, 2))
    tang = p1 - p0
    length = np.linalg.norm(tang, axis=1) if len(rows) else np.empty(0)
    if normal is None:
        nrm = np.column_stack([tang[:, 1], -tang[:, 0]])
        if len(rows):
            nrm /= length[:, None]
            # orient outward from the plus element
            mid = 0.5 * (p0 + p1)
            flip = np.einsum("ei,ei->e", nrm, mid - mesh.centroids[ep]) < 0
            nrm[flip] *= -1.0
    else:
        nrm = np.broadcast_to(normal, (len(rows), 2)).copy()
    ms = np.zeros((len(rows), 2)) if shift is None else np.broadcast_to(shift, (len(rows), 2)).copy()
    return TwoSidedFaces(p0=p0, p1=p1, elem_plus=ep, elem_minus=em, normal=nrm, length=length, minus_shift=ms)


def _build_gamma1(mesh, rows) -> BoundaryFaces:
    rows = sorted(rows, key=lambda r: (r[2], mesh.vertices[r[0][0]][0]))
    keys = np.array([r[0] for r in rows], dtype=int)
    elem = np.array([r[1] for r in rows], dtype=int)
    comp = np.array([r[2] for r in rows], dtype=int)
    p0 = mesh.vertices[keys[:, 0]]
    p1 = mesh.vertices[keys[:, 1]]
    # ensure p0 is the left endpoint so the edge tangent is +x
    swap = p0[:, 0] > p1[:, 0]
    p0[swap], p1[swap] = p1[swap].copy(), p0[swap].copy()
    length = np.abs(p1[:, 0] - p0[:, 0])
    normal = np.where(comp[:, None] == 0, [0.0, -1.0], [0.0, 1.0])
    return BoundaryFaces(p0=p0, p1=p1, elem=elem, normal=normal, length=length, component=comp)


def _build_dirichlet(mesh, left_rows, right_rows) -> BoundaryFaces:
    rows = []
    for j in sorted(left_rows):
        key, t = left_rows[j]
        rows.append((key, t, 0, np.array([-1.0, 0.0])))
    for j in sorted(right_rows):
        key, t = right_rows[j]
        rows.append((key, t, 1, np.array([1.0, 0.0])))
    keys = np.array([r[0] for r in rows], dtype=int)
    p0 = mesh.vertices[keys[:, 0]]
    p1 = mesh.vertices[keys[:, 1]]
    length = np.linalg.norm(p1 - p0, axis=1)
    return BoundaryFaces(
        p0=p0,
        p1=p1,
        elem=np.array([r[1] for r in rows], dtype=int),
        normal=np.array([r[3] for r in rows]),
        length=length,
        component=np.array([r[2] for r in rows], dtype=int),
    )


def _build_ridges(mesh, gamma1: BoundaryFaces, bc_mode: str) -> Ridges:
    n = mesh.n_cells_per_side
    # slots[vertex_key] = list of (gamma1 edge index, physical point, sign)
    slots: dict[tuple[int, float], list] = {}
    for e in range(len(gamma1)):
        comp = int(gamma1.component[e])
        for point, sign in ((gamma1.p0[e], -1.0), (gamma1.p1[e], 1.0)):
            x = float(point[0])
            if bc_mode == PERIODIC and x == mesh.domain.b:
                x = mesh.domain.a  # fuse the periodic corner
            slots.setdefault((comp, x), []).append((e, point.copy(), sign))

    vertex_ids, rows = [], []
    for comp, x in sorted(slots):
        entries = slots[(comp, x)]
        j = 0 if comp == 0 else n
        i = round((x - mesh.domain.a) / mesh.domain.width * n)
        vid = j * (n + 1) + i
        if len(entries) == 2:
            (eA, pA, sA), (eB, pB, sB) = entries
            if sA < sB:  # plus slot is the one with outward tangent +1
                (eA, pA, sA), (eB, pB, sB) = (eB, pB, sB), (eA, pA, sA)
            if sA != -sB:  # pragma: no cover
                raise MeshError(f"inconsistent ridge tangents at {(comp, x)}")
            rows.append((eA, pA, sA, eB, pB, sB, True))
        elif len(entries) == 1 and bc_mode == DIRICHLET_LATERAL:
            (eA, pA, sA) = entries[0]
            rows.append((eA, pA, sA, -1, pA, 0.0, False))
        else:  # pragma: no cover
            raise MeshError(f"ridge at {(comp, x)} has {len(entries)} slots")
        vertex_ids.append(vid)

    return Ridges(
        vertex=np.array(vertex_ids, dtype=int),
        edge_plus=np.array([r[0] for r in rows], dtype=int),
        elem_plus=gamma1.elem[np.array([r[0] for r in rows], dtype=int)],
        point_plus=np.array([r[1] for r in rows]),
        sign_plus=np.array([r[2] for r in rows]),
        edge_minus=np.array([r[3] for r in rows], dtype=int),
        elem_minus=np.where(
            np.array([r[3] for r in rows], dtype=int) >= 0,
            gamma1.elem[np.array([max(r[3], 0) for r in rows], dtype=int)],
            -1,
        ),
        point_minus=np.array([r[4] for r in rows]),
        sign_minus=np.array([r[5] for r in rows]),
        two_sided=np.array([r[6] for r in rows], dtype=bool),
    )
