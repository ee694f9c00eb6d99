"""Decide whether the first curl eigenfield of a torus family is symmetric.

The first positive eigenvalue is the smaller of the symmetric and the
antisymmetric first eigenvalues. The decider never computes either one; it
compares one-sided bounds. Symmetric needs (symmetric upper bound) <
(antisymmetric lower bound); Asymmetric needs (symmetric lower bound) >
(antisymmetric upper bound). Anything else is Inconclusive.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import asdict, dataclass, field

from .antisym_tube import (
    ModeIndex,
    Theorem2Parameters,
    annulus_determinant_terms,
    g,
    j_star,
)
from .bessel import bessel_zero
from .sections import Disk, Rectangle

MARGIN_FLOOR = 1e-6
G_RESIDUAL_TOL = 1e-8
DET_RELATIVE_TOL = 1e-6


class Verdict(str, enum.Enum):
    SYMMETRIC = "Symmetric"
    ASYMMETRIC = "Asymmetric"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class StandardTorus:
    """Solid torus of revolution with disk cross-section of radius a at distance R."""

    a: float
    R: float

    def __post_init__(self):
        if not (0 < self.a < self.R):
            raise ValueError(f"standard torus needs 0 < a < R, got a={self.a}, R={self.R}")

    @property
    def cross_section(self):
        return Disk(self.R, self.a)


@dataclass(frozen=True)
class AnnularCylinderFamily:
    """Annulus ``a < |x| < b`` times a circle of length ``n L``."""

    a: float
    b: float
    L: float
    n: int = 1

    def __post_init__(self):
        if not (0 < self.a < self.b):
            raise ValueError("annular cylinder needs 0 < a < b")
        if not (self.L > 0):
            raise ValueError("L must be positive")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError("n must be a positive integer")

    @property
    def L_n(self):
        return self.n * self.L

    @property
    def cross_section(self):
        # rotation axis sits along the circle factor, so the (r, z) picture is a band
        return Rectangle.centered(self.a, self.b, self.L_n)


@dataclass
class SymmetryVerdict:
    verdict: Verdict
    sym_bound: float
    antisym_bound: float
    margin: float
    inputs: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def to_json_dict(self):
        out = asdict(self)
        out["verdict"] = self.verdict.value
        return out

    def to_json(self):
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True) + "\n"


# --- thin standard tori ---------------------------------------------------------


@dataclass(frozen=True)
class Theorem1Bounds:
    a: float
    R: float
    sym_upper: float
    antisym_lower: float
    j_star_used: float


def theorem1_bounds(a, R, jstar=None) -> Theorem1Bounds:
    """Upper bound for the symmetric and lower bound for the antisymmetric eigenvalue.

    ``jstar`` defaults to the conservative scan value (estimate minus error bar).
    """
    if not (0 < a < R):
        raise ValueError(f"need 0 < a < R, got a={a}, R={R}")
    if jstar is None:
        jstar = j_star().lower
    j01 = bessel_zero(0, 1)
    sym_upper = math.sqrt(j01**2 / a**2 + 0.75 / (R + a) ** 2)
    antisym_lower = math.sqrt((R - a) / (R + a)) * jstar / a
    return Theorem1Bounds(a, R, sym_upper, antisym_lower, jstar)


def theorem1_crossover(R, jstar=None, xtol=1e-12):
    """Radius ``a*(R)`` where ``sym_upper = antisym_lower``.

    ``a * sym_upper`` increases and ``a * antisym_lower`` decreases in a,
    so there is exactly one crossing; bisection locates it.
    """
    if not (R > 0):
        raise ValueError("R must be positive")
    if jstar is None:
        jstar = j_star().lower

    def gap(a):
        b = theorem1_bounds(a, R, jstar)
        return a * (b.sym_upper - b.antisym_lower)

    lo, hi = 1e-12 * R, R * (1 - 1e-12)
    if gap(lo) >= 0:
        return lo
    while hi - lo > xtol * R:
        mid = 0.5 * (lo + hi)
        if gap(mid) < 0:
            lo = mid
        else:
            hi = mid
    return hi


# --- long annular cylinders ------------------------------------------------------


@dataclass(frozen=True)
class Theorem2Bounds:
    a: float
    b: float
    L: float
    r: float
    sym_lower: float
    limit: float
    N_threshold: int

    def antisym_upper(self, n):
        return antisym_upper(self.a, self.b, self.L, n)


def antisym_upper(a, b, L, n):
    """``(pi^2 b^2 / (n L)^2 + 1) * pi / (b - a)``."""
    if int(n) != n or n < 1:
        raise ValueError("n must be a positive integer")
    return (math.pi**2 * b**2 / (n * L) ** 2 + 1.0) * math.pi / (b - a)


def sym_lower(a, b):
    return math.sqrt(math.pi**2 / (b - a) ** 2 + 0.75 / b**2)


def implied_ratio(a, b, L):
    """``r = 2 (b - a) / L``, the ratio that makes ``ell = r lam`` for ``lam = pi/(b-a)``."""
    return 2.0 * (b - a) / L


def check_theorem2_consistency(a, b, L):
    """Return (ok, diagnostics) for the root condition behind the antisymmetric bound."""
    r = implied_ratio(a, b, L)
    diag = {"r": r}
    if not (0 < r < 1):
        diag["reason"] = "implied ratio r = 2(b-a)/L outside (0, 1)"
        return False, diag
    res = float(g(r, b, a))
    diag["g_residual"] = res
    lam = math.pi / (b - a)
    det, scale = annulus_determinant_terms(a, b, ModeIndex(1, 1, L), lam)
    diag["determinant"] = float(det)
    diag["determinant_relative"] = float(abs(det) / scale) if scale > 0 else math.inf
    if abs(res) > G_RESIDUAL_TOL:
        diag["reason"] = f"|g_r(a)| = {abs(res):.3e} exceeds {G_RESIDUAL_TOL}"
        return False, diag
    if diag["determinant_relative"] > DET_RELATIVE_TOL:
        diag["reason"] = "annulus determinant does not vanish at pi/(b-a)"
        return False, diag
    return True, diag


def theorem2_bounds(a, b, L, n_cap=10**7) -> Theorem2Bounds:
    """Closed-form bounds at the root parameters and the least separating n."""
    ok, diag = check_theorem2_consistency(a, b, L)
    if not ok:
        raise ValueError(f"parameters inconsistent with the g-root condition: {diag['reason']}")
    low = sym_lower(a, b)
    limit = math.pi / (b - a)
    # (pi^2 b^2/(nL)^2 + 1) limit <= low  <=>  n >= pi b / (L sqrt(low/limit - 1))
    n = max(1, math.ceil(math.pi * b / (L * math.sqrt(low / limit - 1.0))))
    while n > 1 and antisym_upper(a, b, L, n - 1) <= low:
        n -= 1
    while antisym_upper(a, b, L, n) > low:
        n += 1
        if n > n_cap:
            raise RuntimeError("no separating n below the cap")
    return Theorem2Bounds(a, b, L, diag["r"], low, limit, n)


def theorem2_bounds_from(params: Theorem2Parameters) -> Theorem2Bounds:
    return theorem2_bounds(params.a, params.b, params.L)


# --- combinator --------------------------------------------------------------------


def _classify(sym_bound, antisym_bound, symmetric_possible, asymmetric_possible, floor):
    margin = abs(sym_bound - antisym_bound)
    if margin <= floor:
        return Verdict.INCONCLUSIVE, margin
    if symmetric_possible and sym_bound < antisym_bound:
        return Verdict.SYMMETRIC, margin
    if asymmetric_possible and sym_bound > antisym_bound:
        return Verdict.ASYMMETRIC, margin
    return Verdict.INCONCLUSIVE, margin


def decide(torus, margin_floor=MARGIN_FLOOR, jstar=None) -> SymmetryVerdict:
    """Verdict from one-sided bounds; ``jstar`` is a ``JStar`` record (default scan if None)."""
    if isinstance(torus, StandardTorus):
        js = jstar if jstar is not None else j_star()
        b = theorem1_bounds(torus.a, torus.R, js.lower)
        verdict, margin = _classify(b.sym_upper, b.antisym_lower, True, False, margin_floor)
        # no antisymmetric upper bound exists for standard tori
        assert verdict is not Verdict.ASYMMETRIC
        return SymmetryVerdict(
            verdict,
            b.sym_upper,
            b.antisym_lower,
            margin,
            inputs={"family": "StandardTorus", "a": torus.a, "R": torus.R},
            provenance=js.provenance(),
        )
    if isinstance(torus, AnnularCylinderFamily):
        inputs = {"family": "AnnularCylinderFamily", "a": torus.a, "b": torus.b,
                  "L": torus.L, "n": torus.n}
        ok, diag = check_theorem2_consistency(torus.a, torus.b, torus.L)
        low = sym_lower(torus.a, torus.b)
        up = antisym_upper(torus.a, torus.b, torus.L, torus.n)
        if not ok:
            return SymmetryVerdict(Verdict.INCONCLUSIVE, low, up, abs(low - up),
                                   inputs=inputs, provenance=diag, notes=[diag["reason"]])
        verdict, margin = _classify(low, up, False, True, margin_floor)
        return SymmetryVerdict(verdict, low, up, margin, inputs=inputs, provenance=diag)
    raise TypeError(f"unsupported torus description {type(torus).__name__}")

