"""Antisymmetric curl modes on flat tubes: dispersion relations and their roots.

Flat tube: a disk ``D_a`` or annulus ``A_{a,b}`` times a circle of length L,
with axial wavenumber ``ell = 2 pi n_ell / L`` and azimuthal index m. A
mode with eigenvalue ``lam`` exists iff ``lam^2 > ell^2`` and, with
``mu = sqrt(lam^2 - ell^2)``, the boundary expression

    (lam m / c) Z_m(mu c) + ell mu Z_m'(mu c)

vanishes at c = a (disk, Z = J) or the 2x2 J/Y determinant over c in {a, b}
vanishes (annulus). On the disk the zero set is that of

    F_m(alpha, kappa) = (kappa + alpha)/(kappa - alpha) J_{m-1}(rho) + J_{m+1}(rho),
    rho = sqrt(kappa^2 - alpha^2),

at ``(alpha, kappa) = (a ell, a lam)``.
"""

from __future__ import annotations

import functools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .bessel import bessel_zero, j_table, y_table

POLE_BAND = 1e-6
# Bessel argument pi * sqrt(1 - r0^2) equals this value; r0 comes from it.
CERTIFIED_S = 2.87
R0 = math.sqrt(1.0 - CERTIFIED_S**2 / math.pi**2)


@dataclass(frozen=True)
class ModeIndex:
    n_ell: int
    m: int
    L: float

    def __post_init__(self):
        if not (self.L > 0):
            raise ValueError("tube period L must be positive")
        if int(self.n_ell) != self.n_ell or int(self.m) != self.m:
            raise ValueError("mode indices must be integers")

    @property
    def ell(self):
        return 2.0 * math.pi * self.n_ell / self.L


@dataclass(frozen=True)
class DispersionPoint:
    lam: float
    ell: float

    def __post_init__(self):
        if not (self.lam**2 > self.ell**2):
            raise ValueError(f"need lambda^2 > ell^2, got lambda={self.lam}, ell={self.ell}")

    @property
    def mu(self):
        return math.sqrt(self.lam**2 - self.ell**2)


@dataclass(frozen=True)
class FPlanePoint:
    alpha: float
    kappa: float

    def __post_init__(self):
        if not (self.kappa**2 > self.alpha**2):
            raise ValueError("F-plane point must satisfy kappa^2 > alpha^2")


@dataclass(frozen=True)
class AnnulusGeometry:
    """Annulus ``a < |x| < b`` with the ansatz ``lam = pi/(b-a)``, ``ell = r lam``."""

    a: float
    b: float
    ratio_r: float

    def __post_init__(self):
        if not (0 < self.a < self.b):
            raise ValueError("annulus needs 0 < a < b")
        if not (0 < self.ratio_r < 1):
            raise ValueError("ratio r must lie in (0, 1)")

    @property
    def lam(self):
        return math.pi / (self.b - self.a)

    @property
    def ell(self):
        return self.ratio_r * self.lam

    @property
    def mu(self):
        return math.sqrt(1.0 - self.ratio_r**2) * self.lam


# --- Bessel helpers with signed orders --------------------------------------


def _orders(kind, orders, x):
    """Stack Z_k(x) for the requested (possibly negative) integer orders."""
    top = max(abs(k) for k in orders)
    table = j_table(top, x) if kind == "J" else y_table(top, x)
    out = []
    for k in orders:
        val = table[abs(k)]
        if k < 0 and abs(k) % 2:
            val = -val
        out.append(val)
    return out


def _mu_of(lam, ell):
    lam = np.asarray(lam, dtype=float)
    d = lam * lam - ell * ell
    if np.any(d <= 0):
        raise ValueError("dispersion relation requires lambda^2 > ell^2")
    return np.sqrt(d)


def _out(value, like):
    return float(value) if np.ndim(like) == 0 else value


# --- disk ---------------------------------------------------------------------


def disk_dispersion(a, mode: ModeIndex, lam):
    """Residual ``(lam m/a) J_m(mu a) + ell mu J_m'(mu a)``; zero at eigenvalues."""
    if not (a > 0):
        raise ValueError("disk radius must be positive")
    ell = mode.ell
    mu = _mu_of(lam, ell)
    m = mode.m
    jm1, jm, jp1 = _orders("J", (m - 1, m, m + 1), mu * a)
    val = (np.asarray(lam) * m / a) * jm + ell * mu * 0.5 * (jm1 - jp1)
    return _out(val, lam)


def F(m, alpha, kappa):
    """``F_m(alpha, kappa)`` on ``kappa^2 > alpha^2``; broadcasts over arrays."""
    alpha = np.asarray(alpha, dtype=float)
    kappa = np.asarray(kappa, dtype=float)
    if np.any(kappa * kappa <= alpha * alpha):
        raise ValueError("F_m is defined only on kappa^2 > alpha^2")
    if np.any(np.abs(kappa - alpha) < POLE_BAND):
        raise ValueError("point lies inside the excluded band around the pole kappa = alpha")
    alpha, kappa = np.broadcast_arrays(alpha, kappa)
    rho = np.sqrt(kappa * kappa - alpha * alpha)
    jm1, jp1 = _orders("J", (m - 1, m + 1), rho)
    val = (kappa + alpha) / (kappa - alpha) * jm1 + jp1
    return float(val) if val.ndim == 0 else val


def _vector_bisect(f, lo, hi, width=1e-13, maxiter=80):
    """Simultaneous bisection on arrays of brackets with f(lo) > 0 >= f(hi) or reversed."""
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    flo = f(lo)
    for _ in range(maxiter):
        if np.all(hi - lo <= width * np.maximum(1.0, np.abs(hi))):
            break
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        same = np.sign(fm) == np.sign(flo)
        lo = np.where(same, mid, lo)
        flo = np.where(same, fm, flo)
        hi = np.where(same, hi, mid)
    return 0.5 * (lo + hi)


@dataclass
class JStarScan:
    """Result of the F_m zero-curve scan."""

    m: int
    value: float
    error_bar: float
    alpha_at_min: float
    found: bool
    alphas: np.ndarray
    kappas: np.ndarray
    kappa_floor: float
    kappa_max: float
    alpha_max: float
    step: float

    @property
    def lower(self):
        return self.value - self.error_bar

    @property
    def truncation_bound(self):
        """Zeros with |alpha| > alpha_max have kappa above this value."""
        return math.sqrt(self.kappa_floor**2 + self.alpha_max**2)


def _first_roots(m, alphas, kappa_floor, kappa_max, step):
    """First zero of F_m(alpha, .) above sqrt(kappa_floor^2 + alpha^2) for each alpha.

    Below that threshold F_m is positive, so cells there are set to +1.
    Returns an array with NaN where no sign change occurs up to kappa_max.
    """
    alphas = np.asarray(alphas, dtype=float)
    nk = int(math.ceil((kappa_max - kappa_floor) / step))
    kap = kappa_floor + step * np.arange(1, nk + 1)
    thresh = np.sqrt(kappa_floor**2 + alphas**2)
    roots = np.full(alphas.shape, np.nan)
    live = thresh < kappa_max
    if not np.any(live):
        return roots
    A = alphas[live][:, None]
    K = np.broadcast_to(kap[None, :], (A.shape[0], nk))
    valid = K > thresh[live][:, None]
    vals = np.ones(K.shape)
    if np.any(valid):
        Av = np.broadcast_to(A, K.shape)[valid]
        vals[valid] = F(m, Av, K[valid])
    neg = vals <= 0
    has = neg.any(axis=1)
    first = np.argmax(neg, axis=1)
    rows = np.nonzero(has)[0]
    if rows.size == 0:
        return roots
    k = first[rows]
    hi = kap[k]
    lo = np.where(k > 0, kap[np.maximum(k - 1, 0)], kappa_floor)
    lo = np.maximum(lo, thresh[live][rows])
    a_rows = alphas[live][rows]
    exact = vals[rows, k] == 0
    sol = _vector_bisect(lambda kk: F(m, a_rows, kk), lo, hi)
    sol = np.where(exact, hi, sol)
    out_live = np.full(int(live.sum()), np.nan)
    out_live[rows] = sol
    roots[live] = out_live
    return roots


def j_star_m(m, alpha_max=10.0, step=0.005, kappa_max=None) -> JStarScan:
    """Scan estimate of ``inf {kappa > 0 : F_m(alpha, kappa) = 0}``.

    A lattice over ``|alpha| <= alpha_max`` with spacing ``step`` detects the
    first sign change of F_m along kappa in each column (starting where F_m is
    known to be positive), bisects it, and the minimum over columns is then
    refined continuously in alpha. The error bar is the kappa lattice step
    plus the coarse-to-refined correction.
    """
    if int(m) != m or m < 1:
        raise ValueError("j*_m is defined for positive integers m")
    if alpha_max < 10:
        raise ValueError("alpha_max must be at least 10")
    if not (0 < step <= 0.01):
        raise ValueError("scan step must lie in (0, 0.01]")
    m = int(m)
    floor = bessel_zero(m - 1, 1)
    if kappa_max is None:
        kappa_max = bessel_zero(m, 1) + 0.5
    n_half = int(round(alpha_max / step))
    alphas = step * np.arange(-n_half, n_half + 1)
    roots = _first_roots(m, alphas, floor, kappa_max, step)
    ok = np.isfinite(roots)
    if not ok.any():
        return JStarScan(m, kappa_max, 0.0, math.nan, False, alphas[ok], roots[ok],
                         floor, kappa_max, alpha_max, step)
    i = int(np.nanargmin(roots))
    coarse = float(roots[i])

    def root_at(alpha):
        r = _first_roots(m, np.array([alpha]), floor, kappa_max, step / 4)[0]
        return r if np.isfinite(r) else kappa_max

    lo_a = alphas[max(i - 1, 0)]
    hi_a = alphas[min(i + 1, len(alphas) - 1)]
    res = minimize_scalar(root_at, bounds=(lo_a, hi_a), method="bounded",
                          options={"xatol": 1e-9})
    refined = min(coarse, float(res.fun))
    a_min = float(res.x) if res.fun < coarse else float(alphas[i])
    err = step + (coarse - refined)
    return JStarScan(m, refined, err, a_min, True, alphas[ok], roots[ok],
                     floor, kappa_max, alpha_max, step)


@dataclass(frozen=True)
class JStar:
    """``j* = min(j*_1, j_{1,1})`` with the scan that produced it."""

    value: float
    error_bar: float
    j_star_1: float
    j11: float
    scan_step: float
    alpha_max: float

    @property
    def lower(self):
        """Conservative lower bound, value minus error bar."""
        return self.value - self.error_bar

    def provenance(self) -> dict:
        return {
            "j_star": self.value,
            "error_bar": self.error_bar,
            "j_star_lower": self.lower,
            "j_star_1_scan": self.j_star_1,
            "j_11": self.j11,
            "scan_step": self.scan_step,
            "alpha_max": self.alpha_max,
        }


@functools.lru_cache(maxsize=8)
def j_star(alpha_max=10.0, step=0.005) -> JStar:
    scan = j_star_m(1, alpha_max=alpha_max, step=step)
    j11 = float(bessel_zero(1, 1))
    if scan.found and scan.value < j11:
        value, err = scan.value, scan.error_bar
    else:
        # j_{1,1} is known to bisection accuracy
        value, err = j11, 1e-10
    return JStar(value, err, scan.value, j11, step, alpha_max)


@dataclass(frozen=True)
class DiskRoot:
    m: int
    n_ell: int
    ell: float
    lam: float
    a: float

    @property
    def alpha(self):
        return self.a * self.ell

    @property
    def kappa(self):
        return self.a * self.lam


def _mode_list(m_max, n_ell_max):
    if m_max < 0 or n_ell_max < 0:
        raise ValueError("mode caps must be non-negative")
    return [
        (m, n)
        for n in range(-n_ell_max, n_ell_max + 1)
        if n != 0
        for m in range(-m_max, m_max + 1)
    ]


def _scan_mu(fun, mu_max, step):
    """Sign-change roots of ``fun(mu)`` on (0, mu_max] with lattice ``step``."""
    n = int(math.ceil(mu_max / step))
    if n < 1:
        return []
    grid = step * (np.arange(n + 1) + 0.5)
    grid = grid[grid <= mu_max] if grid[-1] > mu_max else grid
    if grid.size < 2:
        return []
    vals = fun(grid)
    s = np.sign(vals)
    idx = np.nonzero(s[:-1] * s[1:] < 0)[0]
    if idx.size == 0:
        return []
    return list(_vector_bisect(fun, grid[idx], grid[idx + 1]))


def _map_modes(task, modes, workers):
    """Apply ``task`` to each mode; results come back in input order."""
    if workers and workers > 1 and len(modes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(task, modes))
    return [task(md) for md in modes]


def disk_roots(a, L, m_max=8, n_ell_max=8, lambda_max=None, step=0.01, workers=None):
    """Antisymmetric (ell != 0) disk-tube eigenvalues up to ``lambda_max``, ascending."""
    if not (a > 0 and L > 0):
        raise ValueError("need a > 0 and L > 0")
    if lambda_max is None:
        lambda_max = 8.0 / a

    def task(mode):
        m, n_ell = mode
        ell = 2.0 * math.pi * n_ell / L
        if abs(ell) >= lambda_max:
            return []
        alpha = a * ell
        rho_max = a * math.sqrt(lambda_max**2 - ell**2)

        def fun(rho):
            return F(m, alpha, np.sqrt(rho * rho + alpha * alpha))

        return [
            DiskRoot(m, n_ell, ell, math.sqrt((rho / a) ** 2 + ell**2), a)
            for rho in _scan_mu(fun, rho_max, step)
        ]

    found = _map_modes(task, _mode_list(m_max, n_ell_max), workers)
    roots = [r for chunk in found for r in chunk]
    roots.sort(key=lambda r: (r.lam, r.m, r.n_ell))
    return roots


# --- annulus ------------------------------------------------------------------


def _annulus_rows(a, b, m, ell, lam, reduced):
    lam = np.asarray(lam, dtype=float)
    mu = _mu_of(lam, ell)
    rows = []
    for c in (a, b):
        x = mu * c
        entries = []
        for kind in ("J", "Y"):
            zm1, zm, zp1 = _orders(kind, (m - 1, m, m + 1), x)
            if reduced:
                entries.append((lam + ell) * zm1 + (lam - ell) * zp1)
            else:
                entries.append((lam * m / c) * zm + ell * mu * 0.5 * (zm1 - zp1))
        rows.append(entries)
    return rows, mu


def annulus_determinant(a, b, mode: ModeIndex, lam):
    """Raw 2x2 boundary determinant built from ``(lam m/c) Z_m + ell mu Z_m'``."""
    if not (0 < a < b):
        raise ValueError("annulus needs 0 < a < b")
    (r1, r2), _ = _annulus_rows(a, b, mode.m, mode.ell, lam, reduced=False)
    return _out(r1[0] * r2[1] - r1[1] * r2[0], lam)


def reduced_annulus_determinant(a, b, mode: ModeIndex, lam):
    """Determinant with entries ``(lam+ell) Z_{m-1} + (lam-ell) Z_{m+1}``.

    Equals the raw determinant divided by ``(mu/2)^2``.
    """
    if not (0 < a < b):
        raise ValueError("annulus needs 0 < a < b")
    (r1, r2), _ = _annulus_rows(a, b, mode.m, mode.ell, lam, reduced=True)
    return _out(r1[0] * r2[1] - r1[1] * r2[0], lam)


def annulus_determinant_terms(a, b, mode: ModeIndex, lam, reduced=False):
    """(determinant, |d11 d22| + |d12 d21|); the second is the cancellation scale."""
    (r1, r2), _ = _annulus_rows(a, b, mode.m, mode.ell, lam, reduced=reduced)
    return r1[0] * r2[1] - r1[1] * r2[0], np.abs(r1[0] * r2[1]) + np.abs(r1[1] * r2[0])


@dataclass(frozen=True)
class AnnulusRoot:
    m: int
    n_ell: int
    ell: float
    lam: float
    a: float
    b: float


def annulus_roots(a, b, L, m_max=8, n_ell_max=8, lambda_max=None, step=0.01, workers=None):
    """Antisymmetric annulus-tube eigenvalues up to ``lambda_max``, ascending.

    The scan runs in ``mu`` with lattice ``step / b`` on the reduced
    determinant divided by its cancellation scale, which keeps the sign test
    well conditioned where Y_m is large.
    """
    if not (0 < a < b and L > 0):
        raise ValueError("need 0 < a < b and L > 0")
    if lambda_max is None:
        lambda_max = 8.0 / (b - a)

    def task(mode):
        m, n_ell = mode
        ell = 2.0 * math.pi * n_ell / L
        if abs(ell) >= lambda_max:
            return []
        mu_max = math.sqrt(lambda_max**2 - ell**2)

        def fun(mu):
            lam = np.sqrt(mu * mu + ell * ell)
            (r1, r2), _ = _annulus_rows(a, b, m, ell, lam, reduced=True)
            p, q = r1[0] * r2[1], r1[1] * r2[0]
            return (p - q) / (np.abs(p) + np.abs(q))

        return [
            AnnulusRoot(m, n_ell, ell, math.sqrt(mu * mu + ell * ell), a, b)
            for mu in _scan_mu(fun, mu_max, step / b)
        ]

    found = _map_modes(task, _mode_list(m_max, n_ell_max), workers)
    roots = [r for chunk in found for r in chunk]
    roots.sort(key=lambda r: (r.lam, r.m, r.n_ell))
    return roots


# --- the function g_r -----------------------------------------------------------


def g(r, b, a):
    """``g_r(a)``: the m = 1 reduced determinant at ``lam = pi/(b-a)``, ``ell = r lam``,
    divided by ``lam^2``. Vectorised over ``a``.
    """
    a_arr = np.asarray(a, dtype=float)
    if not (0 < r < 1):
        raise ValueError("r must lie in (0, 1)")
    if not (b > 0) or np.any(a_arr <= 0) or np.any(a_arr >= b):
        raise ValueError("need 0 < a < b")
    mu = math.sqrt(1.0 - r * r) * math.pi / (b - a_arr)

    def combo(kind, x):
        z0, z2 = _orders(kind, (0, 2), x)
        return (1 + r) * z0 + (1 - r) * z2

    val = combo("J", mu * a_arr) * combo("Y", mu * b) - combo("Y", mu * a_arr) * combo("J", mu * b)
    return _out(val, a)


def g_slope_limit(r, b):
    """``lim_{a -> b-} g_r(a) / (b - a)``."""
    s = math.sqrt(1.0 - r * r)
    return 8.0 * r * r * math.sin(math.pi * s) / (math.pi**2 * s * b)


@dataclass
class Theorem2Parameters:
    r: float
    a: float
    b: float
    L: float
    lam: float
    g_residual: float
    bracket: tuple[float, float]
    alternatives: list[float] = field(default_factory=list)

    @property
    def ell(self):
        return 2.0 * math.pi / self.L

    def mode(self, n=1):
        """Mode index realising ``ell`` on the tube of length ``n L``."""
        return ModeIndex(n_ell=n, m=1, L=n * self.L)


class RootNotFoundError(RuntimeError):
    def __init__(self, message, brackets):
        super().__init__(message)
        self.brackets = brackets


def find_theorem2_parameters(b, r=R0, samples=400) -> Theorem2Parameters:
    """Smallest root ``a`` of ``g_r`` on (0, b), bracketed negative-to-positive.

    Returns the tube data ``L = 2(b-a)/r`` and ``lam = pi/(b-a)``.
    """
    if not (b > 0):
        raise ValueError("b must be positive")
    a_grid = b * np.arange(1, samples) / samples
    vals = g(r, b, a_grid)
    s = np.sign(vals)
    changes = np.nonzero(s[:-1] * s[1:] <= 0)[0]
    up = [i for i in changes if s[i] < 0]
    if not up:
        raise RootNotFoundError(
            f"no negative-to-positive sign change of g_r on (0, {b})",
            [(float(a_grid[i]), float(a_grid[i + 1])) for i in changes],
        )

    def solve(i):
        lo, hi = float(a_grid[i]), float(a_grid[i + 1])
        if vals[i] == 0:
            return lo
        if vals[i + 1] == 0:
            return hi
        return brentq(lambda t: g(r, b, t), lo, hi, xtol=1e-15 * b, rtol=4 * np.finfo(float).eps)

    i0 = up[0]
    a_root = solve(i0)
    others = [solve(i) for i in changes if i != i0]
    return Theorem2Parameters(
        r=r,
        a=a_root,
        b=b,
        L=2.0 * (b - a_root) / r,
        lam=math.pi / (b - a_root),
        g_residual=float(g(r, b, a_root)),
        bracket=(float(a_grid[i0]), float(a_grid[i0 + 1])),
        alternatives=others,
    )
