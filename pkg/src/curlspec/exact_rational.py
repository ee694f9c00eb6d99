"""Exact-rational certificate that (1+r) J_0(s) + (1-r) J_2(s) < 0.

Here ``r = sqrt(1 - s^2/pi^2)``. Every quantity is a ``fractions.Fraction``
(always in lowest terms, positive denominator), so the verdict is
bit-reproducible. The only place pi enters is the hypothesis ``r >= 2/5``,
which is checked with the rational under-estimate 314/100 of pi.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .bessel import taylor_partial_sum, taylor_remainder_bound

PI_LOWER = Fraction(314, 100)
R_FLOOR = Fraction(2, 5)
# r >= 2/5 gives 1 + r >= 7/5 and 1 - r <= 3/5
COEF_J0 = 1 + R_FLOOR
COEF_J2 = 1 - R_FLOOR

DEFAULT_S = Fraction(287, 100)
DEFAULT_M = 5


@dataclass(frozen=True)
class Hypothesis:
    name: str
    statement: str
    holds: bool


@dataclass(frozen=True)
class NegativityCertificate:
    s: Fraction
    M: int
    r_lower_check: Fraction
    sum_J0: Fraction
    sum_J2: Fraction
    remainder: Fraction
    combined: Fraction
    hypotheses: tuple[Hypothesis, ...] = field(default=())

    @property
    def verdict(self) -> bool:
        return all(h.holds for h in self.hypotheses) and self.combined < 0

    def values(self) -> dict[str, Fraction]:
        return {
            "r_lower_check": self.r_lower_check,
            "sum_J0": self.sum_J0,
            "sum_J2": self.sum_J2,
            "remainder": self.remainder,
            "combined": self.combined,
        }

    def to_json_dict(self) -> dict:
        return {
            "s": _frac_record(self.s),
            "M": self.M,
            "hypotheses": [
                {"name": h.name, "statement": h.statement, "holds": h.holds}
                for h in self.hypotheses
            ],
            "values": [
                {"name": name, **_frac_record(val)} for name, val in self.values().items()
            ],
            "verdict": self.verdict,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2) + "\n"


def _frac_record(value: Fraction) -> dict:
    return {
        "num": str(value.numerator),
        "den": str(value.denominator),
        "value": f"{value.numerator}/{value.denominator}",
    }


def fraction_from_record(rec: dict) -> Fraction:
    return Fraction(int(rec["num"]), int(rec["den"]))


def factorial_bound_holds(m_max: int = 200) -> bool:
    """Check m! >= (2/9) 3^m for every integer 2 <= m <= m_max."""
    return all(
        9 * math.factorial(m) >= 2 * 3**m for m in range(2, m_max + 1)
    )


def certify_negativity(s, M: int) -> NegativityCertificate:
    """Run the rational chain for a given argument ``s`` and truncation ``M``.

    A certificate is always returned; ``verdict`` is False when any
    hypothesis fails or the combined bound is not negative.
    """
    s = Fraction(s)
    if not (0 < s <= 3):
        raise ValueError(f"s must lie in (0, 3], got {s}")
    if int(M) != M or M < 1:
        raise ValueError("M must be an integer >= 1")
    M = int(M)

    r_lower_check = 1 - (s / PI_LOWER) ** 2 - R_FLOOR**2
    sum_j0 = taylor_partial_sum(0, M, s)
    sum_j2 = taylor_partial_sum(2, M, s)
    remainder = 2 * taylor_remainder_bound(M)
    combined = COEF_J0 * sum_j0 + COEF_J2 * sum_j2 + remainder

    hyps = (
        Hypothesis("s_range", "0 < s <= 3", True),
        Hypothesis(
            "factorial_bound",
            "m! >= (2/9) 3^m for 2 <= m <= 200",
            factorial_bound_holds(),
        ),
        Hypothesis(
            "r_at_least_2_5",
            "1 - s^2/(314/100)^2 - (2/5)^2 > 0, hence r^2 > (2/5)^2",
            r_lower_check > 0,
        ),
        Hypothesis("sum_J0_negative", "Taylor partial sum of J_0(s) < 0", sum_j0 < 0),
        Hypothesis("sum_J2_positive", "Taylor partial sum of J_2(s) > 0", sum_j2 > 0),
        Hypothesis(
            "combined_negative",
            "7/5 sum_J0 + 3/5 sum_J2 + 36 (3/4)^(M+1)/(M+1)! < 0",
            combined < 0,
        ),
    )
    return NegativityCertificate(
        s=s,
        M=M,
        r_lower_check=r_lower_check,
        sum_J0=sum_j0,
        sum_J2=sum_j2,
        remainder=remainder,
        combined=combined,
        hypotheses=hyps,
    )


def verify_appendix_d() -> NegativityCertificate:
    """The certificate at s = 287/100, M = 5."""
    return certify_negativity(DEFAULT_S, DEFAULT_M)


def compare_with_golden(cert: NegativityCertificate, golden: dict) -> list[str]:
    """Return a list of mismatch messages (empty when everything agrees).

    Golden values depend on (s, M); entries are only compared when the
    golden file was produced for the same parameters. ``r_lower_check``
    depends on ``s`` alone.
    """
    problems = []
    same_s = fraction_from_record(golden["s"]) == cert.s
    same_m = int(golden["M"]) == cert.M
    computed = cert.values()
    for rec in golden["values"]:
        name = rec["name"]
        if name not in computed:
            problems.append(f"{name}: unknown field in golden file")
            continue
        if not same_s or (name != "r_lower_check" and not same_m):
            continue
        try:
            want = fraction_from_record(rec)
        except (KeyError, ValueError, ZeroDivisionError) as exc:
            problems.append(f"{name}: unreadable golden value ({exc})")
            continue
        got = computed[name]
        if got != want:
            problems.append(f"{name}: computed {got} but golden file has {want}")
    if "verdict" in golden and same_s and same_m and bool(golden["verdict"]) != cert.verdict:
        problems.append(f"verdict: computed {cert.verdict} but golden file has {golden['verdict']}")
    return problems
