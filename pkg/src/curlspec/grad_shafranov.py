"""First Dirichlet eigenvalues of the Laplacian and the Grad-Shafranov operator.

The Grad-Shafranov operator ``L = d_rr + d_zz - (1/r) d_r`` is handled in its
weighted form: ``-L u = lam u`` is the Euler-Lagrange equation of

    B_r[u, u] / (u, u)_r,   B_r[u, u] = int |grad u|^2 / r,   (u, u)_r = int u^2 / r.

On the grid, B_r is the sum over lattice links of ``(u_i - u_j)^2 / r_e`` with
``r_e`` the geometric mean of the end-point radii. With ``v = r^(-1/2) u``
this is exactly the 5-point Dirichlet energy of ``v`` plus a diagonal
potential that is a second-order approximation of ``3 / (4 r^2)``, so the
symmetric Schrodinger matrix for ``v`` and the weighted problem for ``u``
share eigenvalues bit-for-bit up to solver tolerance.

Curved boundaries use the symmetric ghost-point stencil: a link that leaves
the domain after a fraction ``theta`` of a cell contributes ``1/theta`` to
the diagonal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .sections import DegenerateSectionError, Grid, GridMask, build_grid, node_areas

EIG_TOL = 1e-12
RESIDUAL_TOL = 1e-9
MAX_ITER = 500
# below this size a dense generalized eigensolve is cheaper and more robust
DENSE_LIMIT = 64


@dataclass
class GridField:
    """Eigenfunction on the grid; arrays are indexed ``[j, i]`` = (z_j, r_i).

    ``u`` is normalised so that ``(u, u)_r = 1`` and ``v = u / sqrt(r)``.
    Non-interior nodes carry the boundary value (zero for Dirichlet).
    """

    r: np.ndarray
    z: np.ndarray
    interior: np.ndarray
    u: np.ndarray
    v: np.ndarray


@dataclass
class EigenEstimate:
    value: float
    grid_h: float
    bracket_low: float
    bracket_high: float
    iterations: int
    field: GridField | None = None
    laplacian_value: float | None = None


@dataclass
class FluxFreeResult:
    """Symmetric flux-free eigenpair: ``u = c`` on the boundary, zero weighted mean."""

    lam: float
    grid_h: float
    boundary_value: float
    weighted_mean: float
    relative_mean: float
    iterations: int
    field: GridField


def _assemble(grid: Grid, weighted: bool):
    """Stiffness matrix of the link energy.

    ``weighted=False``: plain Dirichlet energy (Laplacian times h^2).
    ``weighted=True``:  B_r in the u-variable.
    """
    n = grid.n
    rn = grid.node_r()
    src, dst = grid.edges[:, 0], grid.edges[:, 1]
    if weighted:
        w = 1.0 / np.sqrt(rn[src] * rn[dst])
        wb = 1.0 / (grid.bnd_theta * np.sqrt(rn[grid.bnd_node] * grid.bnd_r))
    else:
        w = np.ones(src.size)
        wb = 1.0 / grid.bnd_theta
    diag = np.zeros(n)
    np.add.at(diag, src, w)
    np.add.at(diag, dst, w)
    np.add.at(diag, grid.bnd_node, wb)
    rows = np.concatenate([np.arange(n), src, dst])
    cols = np.concatenate([np.arange(n), dst, src])
    vals = np.concatenate([diag, -w, -w])
    return sp.csc_matrix((vals, (rows, cols)), shape=(n, n))


def schrodinger_matrix(grid: Grid):
    """Matrix of ``-Delta + V`` acting on ``v``, with V the discrete ``3/(4r^2)``."""
    s = sp.diags(np.sqrt(grid.node_r()))
    return (s @ _assemble(grid, weighted=True) @ s).tocsc() / grid.h**2


def laplacian_matrix(grid: Grid):
    return _assemble(grid, weighted=False) / grid.h**2


def discrete_potential(grid: Grid):
    """Diagonal difference between the Schrodinger and Laplacian matrices."""
    return schrodinger_matrix(grid).diagonal() - laplacian_matrix(grid).diagonal()


def lowest_eigenpair(K, mass=None, block=4, tol=EIG_TOL, rtol=RESIDUAL_TOL, maxiter=MAX_ITER):
    """Smallest eigenpair of ``K x = lam M x`` by block inverse iteration.

    ``K`` is sparse symmetric positive definite; ``mass`` is a callable
    applying the SPD mass operator to a block of vectors (identity if None).
    Rayleigh-Ritz on the block keeps near-degenerate pairs from stalling
    convergence. Returns (lam, x, iterations) with ``x`` M-normalised.
    """
    n = K.shape[0]
    if mass is None:
        mass = lambda X: X  # noqa: E731
    if n <= DENSE_LIMIT:
        Md = mass(np.eye(n))
        theta, X = scipy.linalg.eigh(K.toarray(), 0.5 * (Md + Md.T))
        return float(theta[0]), X[:, 0], 1
    block = min(block, n)
    lu = splu(sp.csc_matrix(K))
    rng = np.random.default_rng(20240917)
    X = rng.standard_normal((n, block))
    X[:, 0] = 1.0
    prev = math.inf
    for it in range(1, maxiter + 1):
        Y = lu.solve(mass(X))
        KY = K @ Y
        MY = mass(Y)
        Kp = Y.T @ KY
        Mp = Y.T @ MY
        theta, C = scipy.linalg.eigh(0.5 * (Kp + Kp.T), 0.5 * (Mp + Mp.T))
        X = Y @ C
        lam = theta[0]
        x = X[:, 0]
        res = K @ x - lam * mass(x[:, None])[:, 0]
        rel_res = np.linalg.norm(res) / (abs(lam) * np.linalg.norm(mass(x[:, None])))
        if abs(lam - prev) <= tol * abs(lam) and rel_res <= rtol:
            break
        prev = lam
    else:
        raise RuntimeError(f"inverse iteration did not converge in {maxiter} steps")
    return float(lam), x, it


def _field(grid, u_nodes, boundary_value=0.0):
    rr = np.broadcast_to(grid.r[None, :], grid.interior.shape)
    u = np.full(grid.interior.shape, float(boundary_value))
    u[grid.interior] = u_nodes
    with np.errstate(divide="ignore", invalid="ignore"):
        v = np.where(rr > 0, u / np.sqrt(np.abs(rr)), 0.0)
    return GridField(r=grid.r, z=grid.z, interior=grid.interior, u=u, v=v)


def _check_section(section):
    if section.r_min <= 0:
        raise ValueError("cross-section must stay in r > 0")


def laplacian_dirichlet_lambda1(section, grid_h=None) -> EigenEstimate:
    """First Dirichlet eigenvalue of ``-(d_rr + d_zz)``."""
    grid = build_grid(section, grid_h)
    lam, x, its = lowest_eigenpair(laplacian_matrix(grid))
    x = x * np.sign(x.sum())
    x /= math.sqrt(np.sum(x * x) * grid.h**2)
    fld = _field(grid, x)
    return EigenEstimate(lam, grid.h, lam, lam, its, fld, lam)


def grad_shafranov_lambda1(section, grid_h=None, with_bracket=True) -> EigenEstimate:
    """First Dirichlet eigenvalue of the Grad-Shafranov operator.

    Solved as ``-Delta v + V v = lam v`` with ``u = sqrt(r) v``. The bracket
    fields hold ``lam_D + 3/(4 r_max^2)`` and ``lam_D + 3/(4 r_min^2)`` with
    ``lam_D`` the Laplacian eigenvalue on the same grid.
    """
    _check_section(section)
    grid = build_grid(section, grid_h)
    lam, v, its = lowest_eigenpair(schrodinger_matrix(grid))
    v = v * np.sign(v.sum())
    v /= math.sqrt(np.sum(v * v) * grid.h**2)
    u = np.sqrt(grid.node_r()) * v
    fld = _field(grid, u)
    lam_d = None
    low = high = math.nan
    if with_bracket:
        lam_d, _, _ = lowest_eigenpair(laplacian_matrix(grid))
        low = lam_d + 0.75 / section.r_max**2
        high = lam_d + 0.75 / section.r_min**2
    return EigenEstimate(lam, grid.h, low, high, its, fld, lam_d)


def symmetric_amperian_lambda1(section, grid_h=None) -> float:
    """First positive symmetric Amperian curl eigenvalue, ``sqrt(lam_GS)``."""
    return math.sqrt(grad_shafranov_lambda1(section, grid_h, with_bracket=False).value)


def weighted_forms(section, grid_h, u):
    """Discrete ``B_r[u, u]`` and ``(u, u)_r`` for a grid function ``u``.

    ``u`` may be a full-grid array (boundary nodes ignored) or the vector
    of interior values.
    """
    grid = build_grid(section, grid_h)
    if np.ndim(u) == 2:
        u = u[grid.interior]
    K = _assemble(grid, weighted=True)
    energy = float(u @ (K @ u))
    mass = float(np.sum(grid.h**2 * u * u / grid.node_r()))
    return energy, mass


def fluxfree_eigenpair(section, grid_h=None) -> FluxFreeResult:
    """Smallest symmetric flux-free eigenvalue.

    Unknowns are ``u0 = u - c`` on interior nodes (Dirichlet) and the
    boundary constant ``c``. The zero-mean constraint fixes
    ``c = -(W . u0) / S`` with ``W = area / r`` per interior node and ``S``
    the total weighted area, which turns the mass into ``diag(W) - W W^T / S``.
    """
    _check_section(section)
    grid = build_grid(section, grid_h)
    area_in, area_out, r_out = node_areas(section, grid)
    W = area_in / grid.node_r()
    s_out = float(np.sum(area_out / r_out)) if area_out.size else 0.0
    S = float(W.sum()) + s_out
    if grid.n < 2 and s_out == 0:
        raise DegenerateSectionError("flux-free problem needs at least two interior nodes")

    def mass(X):
        return W[:, None] * X - np.outer(W, W @ X) / S

    K = _assemble(grid, weighted=True)
    mu, u0, its = lowest_eigenpair(K, mass=mass, block=6)
    c = -float(W @ u0) / S
    u = u0 + c
    norm = math.sqrt(float(np.sum(W * u * u)) + c * c * s_out)
    u, c = u / norm, c / norm
    pivot = np.argmax(np.abs(u))
    if u[pivot] < 0:
        u, c = -u, -c
    mean = float(W @ u) + c * s_out
    scale = float(np.abs(W) @ np.abs(u)) + abs(c) * s_out
    return FluxFreeResult(
        lam=math.sqrt(mu),
        grid_h=grid.h,
        boundary_value=c,
        weighted_mean=mean,
        relative_mean=abs(mean) / scale,
        iterations=its,
        field=_field(grid, u, boundary_value=c),
    )


def symmetric_fluxfree_lambda1(section, grid_h=None) -> float:
    return fluxfree_eigenpair(section, grid_h).lam


@dataclass
class RichardsonStudy:
    spacings: list[float]
    values: list[float]
    order: float
    error: float

    @property
    def finest(self):
        return self.values[-1]


def richardson(values, spacings) -> RichardsonStudy:
    """Observed order and error estimate of the finest value from three grids h, h/2, h/4."""
    if len(values) != 3:
        raise ValueError("Richardson estimate needs exactly three grids")
    d1 = values[0] - values[1]
    d2 = values[1] - values[2]
    ratio = spacings[0] / spacings[1]
    if d2 == 0 or d1 / d2 <= 0:
        order = math.nan
        err = abs(d2)
    else:
        order = math.log(abs(d1 / d2)) / math.log(ratio)
        err = abs(d2) / (ratio**order - 1) if order > 0 else abs(d2)
    return RichardsonStudy(list(spacings), list(values), order, err)


def richardson_study(solver, section, grid_h, levels=3) -> RichardsonStudy:
    """Run ``solver(section, h)`` on h, h/2, h/4 and estimate the observed order."""
    if isinstance(section, GridMask):
        raise ValueError("grid masks have a fixed spacing; refine the mask instead")
    spacings = [grid_h / 2**k for k in range(levels)]
    vals = []
    for h in spacings:
        res = solver(section, h)
        vals.append(res.value if isinstance(res, EigenEstimate) else float(res))
    return richardson(vals, spacings)
