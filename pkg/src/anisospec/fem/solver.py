"""P1 finite element solvers for the Dirichlet eigenvalue and torsion problems.

Euclidean solves assemble stiffness/mass/load on a triangulation and work on
the interior nodes (zero Dirichlet data eliminated). Quadratic seminorms are
handled by transforming the mesh: with B = diag(1/alpha) R^T the seminorm
becomes Euclidean on B Omega, and

    lambda_H(Omega) = lambda(B Omega),   T_H(Omega) = T(B Omega) * prod(alpha).

Degenerate quadratics (one alpha = 0) route to the exact slicing solver; the
zero seminorm is rejected as a distinguished error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix, diags
from scipy.sparse.linalg import cg

from ..errors import DegenerateSeminormError, InvalidSeminormError, SolverError
from ..geometry import Polygon2D, _cross2
from ..seminorms import QuadraticSeminorm, Rank1Seminorm
from ..slicing import solve_rank1
from .meshing import TriMesh, mesh_polygon

__all__ = [
    "SolverConfig",
    "SpectralResult",
    "lambda_euclid_fem",
    "solve_quadratic",
    "torsion_euclid_fem",
]


@dataclass(frozen=True)
class SolverConfig:
    """Discretization and iteration controls for the FEM solvers."""

    target_h: float = 0.05
    linear_tol: float = 1e-10
    eig_tol: float = 1e-8
    max_iters: int = 20000
    richardson: bool = False

    def __post_init__(self):
        if not (self.target_h > 0):
            raise ValueError("target_h must be positive")
        if not (self.linear_tol > 0 and self.eig_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be positive")


@dataclass(frozen=True)
class SpectralResult:
    """Eigenvalue and/or torsion with the mesh size and error bookkeeping.

    provenance is one of "fem", "fem_richardson", "slicing", "closed_form".
    error_estimate is 0 when the route is exact (slicing, closed forms) and
    the coarse/fine difference when a nested pair was solved.
    """

    lambda_: float | None
    torsion: float | None
    h_used: float
    error_estimate: float
    provenance: str


def p1_assemble(mesh: TriMesh):
    """Stiffness K, consistent mass M (CSR) and load vector f for P1 elements."""
    T = mesh.triangles
    P = mesh.nodes[T]
    x, y = P[..., 0], P[..., 1]
    area2 = _cross2(P[:, 1] - P[:, 0], P[:, 2] - P[:, 0])
    if np.any(area2 <= 0):
        raise SolverError("mesh contains a degenerate or flipped triangle")
    b = np.stack([y[:, 1] - y[:, 2], y[:, 2] - y[:, 0], y[:, 0] - y[:, 1]], axis=1)
    c = np.stack([x[:, 2] - x[:, 1], x[:, 0] - x[:, 2], x[:, 1] - x[:, 0]], axis=1)
    Kloc = (b[:, :, None] * b[:, None, :] + c[:, :, None] * c[:, None, :]) / (2.0 * area2)[:, None, None]
    Mloc = (np.ones((3, 3)) + np.eye(3))[None, :, :] * (area2 / 24.0)[:, None, None]
    rows = np.repeat(T, 3, axis=1).ravel()
    cols = np.tile(T, (1, 3)).ravel()
    n = mesh.n_nodes
    K = coo_matrix((Kloc.ravel(), (rows, cols)), shape=(n, n)).tocsr()
    M = coo_matrix((Mloc.ravel(), (rows, cols)), shape=(n, n)).tocsr()
    f = np.zeros(n)
    np.add.at(f, T.ravel(), np.repeat(area2 / 6.0, 3))
    return K, M, f


def _cg_solve(A, rhs, cfg: SolverConfig, x0=None) -> np.ndarray:
    precond = diags(1.0 / A.diagonal())
    x, info = cg(A, rhs, x0=x0, rtol=cfg.linear_tol, atol=0.0, maxiter=cfg.max_iters, M=precond)
    if info != 0:
        residual = float(np.linalg.norm(A @ x - rhs))
        raise SolverError(
            f"conjugate gradient did not converge in {cfg.max_iters} iterations "
            f"(residual {residual:.3e})"
        )
    return x


def _torsion_on_mesh(mesh: TriMesh, cfg: SolverConfig) -> float:
    K, _, f = p1_assemble(mesh)
    free = mesh.interior_nodes()
    if len(free) == 0:
        raise SolverError("mesh has no interior nodes; decrease target_h")
    Kff = K[free][:, free]
    ff = f[free]
    u = _cg_solve(Kff, ff, cfg)
    return float(ff @ u)


def _lambda_on_mesh(mesh: TriMesh, cfg: SolverConfig) -> float:
    K, M, f = p1_assemble(mesh)
    free = mesh.interior_nodes()
    if len(free) == 0:
        raise SolverError("mesh has no interior nodes; decrease target_h")
    Kff = K[free][:, free].tocsr()
    Mff = M[free][:, free].tocsr()
    # inverse power iteration on K y = M x; the torsion load is a good
    # positive start (close to the ground state, no odd-mode contamination)
    y = f[free]
    y /= np.sqrt(y @ (Mff @ y))
    rho_prev = None
    z = None
    # slowly separated spectra (stretched domains) need many cheap steps;
    # warm-started inner solves keep each one inexpensive
    for _ in range(5000):
        z = _cg_solve(Kff, Mff @ y, cfg, x0=z)
        norm = np.sqrt(z @ (Mff @ z))
        if not np.isfinite(norm) or norm <= 0:
            raise SolverError("inverse iteration produced a non-finite iterate")
        y = z / norm
        rho = float((y @ (Kff @ y)) / (y @ (Mff @ y)))
        if rho_prev is not None and abs(rho - rho_prev) <= cfg.eig_tol * abs(rho):
            return rho
        rho_prev = rho
    raise SolverError("inverse power iteration did not converge in 5000 steps")


def _solve_pair(mesh: TriMesh, cfg: SolverConfig, compute):
    """Run `compute` on the mesh, optionally on its uniform refinement too,
    extrapolating under second-order convergence."""
    coarse = compute(mesh, cfg)
    if not cfg.richardson:
        return coarse, mesh.h, 0.0, "fem"
    fine_mesh = mesh.refined()
    fine = compute(fine_mesh, cfg)
    extrapolated = (4.0 * fine - coarse) / 3.0
    return extrapolated, fine_mesh.h, abs(fine - coarse), "fem_richardson"


def torsion_euclid_fem(polygon: Polygon2D, cfg: SolverConfig = SolverConfig()) -> SpectralResult:
    """Euclidean torsional rigidity of a polygon by P1 FEM."""
    mesh = mesh_polygon(polygon, cfg.target_h)
    value, h_used, err, prov = _solve_pair(mesh, cfg, _torsion_on_mesh)
    return SpectralResult(lambda_=None, torsion=value, h_used=h_used, error_estimate=err, provenance=prov)


def lambda_euclid_fem(polygon: Polygon2D, cfg: SolverConfig = SolverConfig()) -> SpectralResult:
    """Euclidean first Dirichlet eigenvalue of a polygon by P1 FEM."""
    mesh = mesh_polygon(polygon, cfg.target_h)
    value, h_used, err, prov = _solve_pair(mesh, cfg, _lambda_on_mesh)
    return SpectralResult(lambda_=value, torsion=None, h_used=h_used, error_estimate=err, provenance=prov)


def transform_matrix(H: QuadraticSeminorm) -> np.ndarray:
    """B with H(x) = |B^-T ... | -- concretely B = diag(1/alpha) R^T, so that
    the seminorm pulled to B Omega is Euclidean."""
    if H.kernel_codim != H.dimension:
        raise InvalidSeminormError("transform needs a nondegenerate quadratic seminorm")
    return np.diag(1.0 / H.alphas) @ H.rotation.T


def solve_quadratic(
    polygon: Polygon2D, H: QuadraticSeminorm, cfg: SolverConfig = SolverConfig()
) -> SpectralResult:
    """lambda_H and T_H on a polygon for a quadratic seminorm.

    Nondegenerate H: solve the Euclidean problems on the transformed mesh of
    B Omega (B = diag(1/alpha) R^T); then lambda_H = lambda(B Omega) and
    T_H = T(B Omega) * prod(alpha). One vanishing alpha: exact slicing on the
    rank-1 reduction. Zero seminorm: rejected (lambda 0, torsion infinite).
    """
    if not isinstance(H, QuadraticSeminorm):
        raise InvalidSeminormError("solve_quadratic expects a QuadraticSeminorm")
    if H.dimension != 2:
        raise InvalidSeminormError("polygon solves are two-dimensional")
    codim = H.kernel_codim
    if codim == 0:
        raise DegenerateSeminormError("zero seminorm has lambda=0, T=infinity")
    if codim == 1:
        eta = H.alphas[0] * H.rotation[:, 0]
        r = solve_rank1(polygon, Rank1Seminorm(eta))
        return SpectralResult(
            lambda_=r.lambda_, torsion=r.torsion, h_used=0.0, error_estimate=0.0, provenance="slicing"
        )

    B = transform_matrix(H)
    base = mesh_polygon(polygon, cfg.target_h)
    mesh = base.transformed(B)
    det_scale = float(np.prod(H.alphas))

    lam, h_lam, err_lam, prov = _solve_pair(mesh, cfg, _lambda_on_mesh)
    tor_raw, h_tor, err_tor, _ = _solve_pair(mesh, cfg, _torsion_on_mesh)
    return SpectralResult(
        lambda_=lam,
        torsion=tor_raw * det_scale,
        h_used=max(h_lam, h_tor),
        error_estimate=max(err_lam, err_tor * det_scale),
        provenance=prov,
    )
