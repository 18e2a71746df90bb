"""Initial projection, stationary solve and the backward Euler loop."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .assembly import (
    FormParams,
    _volume_tables,
    assemble_Ah,
    assemble_dirichlet_terms,
    assemble_load,
    assemble_mass,
)
from .config import ProblemConfig
from .mesh import DIRICHLET_LATERAL, EdgeClassification, Mesh, build_structured_mesh, classify_edges
from .solver import SolverError, block_jacobi_preconditioner, cg_solve
from .space import DGSpace


def l2_project(mesh: Mesh, space: DGSpace, lam_unused, u0) -> np.ndarray:
    """Plain L2(Omega) projection of the field u0(x, y) onto the DG space.

    Lambda-independent; the block dof layout makes it an exact per-element
    solve against the reference mass matrix.
    """
    vol = _volume_tables(mesh, space, 2 * space.p + 4)
    ref_mass = np.einsum("q,ql,qm->lm", vol.w, vol.phi, vol.phi)
    vals = np.asarray(u0(vol.x, vol.y), dtype=float)
    rhs = np.einsum("q,eq,ql->el", vol.w, vals, vol.phi)  # det cancels below
    try:
        local = np.linalg.solve(ref_mass, rhs.T).T
    except np.linalg.LinAlgError as exc:  # pragma: no cover - valid geometry
        raise SolverError("singular local mass block") from exc
    return local.ravel()


def l2_lambda_project(mesh: Mesh, space: DGSpace, edges: EdgeClassification, lam: float, u0) -> np.ndarray:
    """Projection in the lambda-weighted norm (domain plus lam * gamma1).

    This is the initial datum the time stepper uses: unlike the plain
    domain projection, its boundary trace is accurate to the same order as
    the interior, which the boundary-error convergence rates require.  The
    weighted mass matrix is still block diagonal, so the solve is exact.
    """
    M = assemble_mass(mesh, edges, space, lam)
    rhs = assemble_load(
        mesh,
        edges,
        space,
        lambda t, x, y: u0(x, y),
        lambda t, x, y: lam * np.asarray(u0(x, y)),
        t=0.0,
    )
    n = space.n_local
    coo = M.tocoo()
    blocks = np.zeros((mesh.n_triangles, n, n))
    np.add.at(blocks, (coo.row // n, coo.row % n, coo.col % n), coo.data)
    return np.linalg.solve(blocks, rhs.reshape(-1, n, 1))[..., 0].ravel()


@dataclass(eq=False)
class Operators:
    """Assembled discretization of one configuration."""

    mesh: Mesh
    edges: EdgeClassification
    space: DGSpace
    params: FormParams
    A: sp.csr_matrix  # full stationary operator (Dirichlet terms included)
    M: sp.csr_matrix  # domain mass + lam * boundary mass
    dirichlet_rhs: object = None  # callable t -> vector, or None


def build_operators(config: ProblemConfig, u_D=None) -> Operators:
    mesh = build_structured_mesh(config.level)
    edges = classify_edges(mesh, config.bc_mode)
    space = DGSpace(mesh, config.p)
    params = FormParams.for_mesh(
        mesh,
        alpha=config.alpha,
        beta=config.beta,
        lam=config.lam,
        gamma=config.gamma,
        penalty_mode=config.penalty_mode,
    )
    A = assemble_Ah(mesh, edges, space, params)
    ops = Operators(
        mesh=mesh,
        edges=edges,
        space=space,
        params=params,
        A=A,
        M=assemble_mass(mesh, edges, space, config.lam),
    )
    if config.bc_mode == DIRICHLET_LATERAL:
        delta, _ = assemble_dirichlet_terms(mesh, edges, space, params)
        ops.A = (A + delta).tocsr()
        if u_D is not None:
            ops.dirichlet_rhs = lambda t: assemble_dirichlet_terms(
                mesh, edges, space, params, u_D=u_D, t=t
            )[1]
    return ops


def solve_stationary(
    mesh: Mesh,
    edges: EdgeClassification,
    space: DGSpace,
    params: FormParams,
    f,
    g,
    u_D=None,
    tol: float = 1e-12,
) -> np.ndarray:
    """Solve the stationary problem A_h u = (f, v) + (g, v)_gamma1."""
    A = assemble_Ah(mesh, edges, space, params)
    rhs = assemble_load(mesh, edges, space, f, g, t=0.0)
    if edges.bc_mode == DIRICHLET_LATERAL:
        delta, drhs = assemble_dirichlet_terms(mesh, edges, space, params, u_D=u_D, t=0.0)
        A = (A + delta).tocsr()
        rhs = rhs + drhs
    elif params.alpha == 0.0:
        raise SolverError("stationary operator is singular: alpha = 0 leaves constants in the kernel")
    prec = block_jacobi_preconditioner(A, space.n_local)
    x, report = cg_solve(A, rhs, tol=tol, preconditioner=prec)
    if not report.converged:
        raise SolverError(
            f"stationary solve failed: residual {report.final_relative_residual:.3e} "
            f"after {report.iterations} iterations (gamma too small?)"
        )
    return x


@dataclass(eq=False)
class TransientResult:
    coeffs: np.ndarray  # final state u_h^K
    l2lambda_norms: np.ndarray  # ||u_h^k||_{L2_lambda}, k = 0..K
    n_steps: int
    dt: float
    ops: Operators
    trajectory: list | None = None


def run_backward_euler(
    config: ProblemConfig,
    f,
    g,
    u0,
    u_D=None,
    on_step=None,
    keep_trajectory: bool = False,
    ops: Operators | None = None,
    tol: float = 1e-12,
    warm_start: bool = False,
) -> TransientResult:
    """Backward Euler loop: (M + dt A) u^{k+1} = M u^k + dt load(t_{k+1}).

    Sources are evaluated at t_{k+1}.  ``on_step(k, t_k, u_h^k)`` is invoked
    for every state including the initial one; only the current state is
    stored unless ``keep_trajectory`` is set.  ``warm_start`` seeds each
    solve with the previous state instead of zero; it is off by default so
    results do not depend on the step history through the solver.
    """
    n_steps = config.num_steps()
    dt = config.dt
    if ops is None:
        ops = build_operators(config, u_D=u_D)
    mesh, edges, space = ops.mesh, ops.edges, ops.space

    system = (ops.M + dt * ops.A).tocsr()
    prec = block_jacobi_preconditioner(system, space.n_local)

    u = l2_lambda_project(mesh, space, edges, config.lam, u0)
    norms = [float(np.sqrt(u @ (ops.M @ u)))]
    trajectory = [u.copy()] if keep_trajectory else None
    if on_step is not None:
        on_step(0, 0.0, u)

    for k in range(n_steps):
        t_next = (k + 1) * dt
        rhs = ops.M @ u + dt * assemble_load(mesh, edges, space, f, g, t=t_next)
        if ops.dirichlet_rhs is not None:
            rhs += dt * ops.dirichlet_rhs(t_next)
        u, report = cg_solve(
            system, rhs, tol=tol, preconditioner=prec, x0=u if warm_start else None
        )
        if not report.converged:
            raise SolverError(
                f"backward Euler step {k + 1} failed: residual "
                f"{report.final_relative_residual:.3e} after {report.iterations} iterations"
            )
        norms.append(float(np.sqrt(u @ (ops.M @ u))))
        if keep_trajectory:
            trajectory.append(u.copy())
        if on_step is not None:
            on_step(k + 1, t_next, u)

    return TransientResult(
        coeffs=u,
        l2lambda_norms=np.array(norms),
        n_steps=n_steps,
        dt=dt,
        ops=ops,
        trajectory=trajectory,
    )
