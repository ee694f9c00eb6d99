import json
import math

import pytest

from curlspec import antisym_tube as at
from curlspec import symmetry_decider as sd

J01 = 2.404825557695773


@pytest.fixture(scope="module")
def params():
    return at.find_theorem2_parameters(1.0)


def test_geometry_validation():
    with pytest.raises(ValueError):
        sd.StandardTorus(1.0, 1.0)
    with pytest.raises(ValueError):
        sd.AnnularCylinderFamily(1.0, 0.5, 1.0)
    with pytest.raises(ValueError):
        sd.AnnularCylinderFamily(0.5, 1.0, 1.0, 0)
    with pytest.raises(ValueError):
        sd.theorem1_bounds(0.0, 1.0)
    fam = sd.AnnularCylinderFamily(0.5, 1.0, 2.0, 3)
    assert fam.L_n == 6.0
    assert fam.cross_section.r_min == 0.5


def test_theorem1_closed_forms():
    b = sd.theorem1_bounds(0.5, 1.0, jstar=3.0)
    assert b.sym_upper == pytest.approx(math.sqrt(J01**2 / 0.25 + 0.75 / 2.25))
    assert b.antisym_lower == pytest.approx(math.sqrt(1 / 3) * 3.0 / 0.5)


def test_theorem1_limits():
    js = at.j_star()
    a = 1e-6
    b = sd.theorem1_bounds(a, 1.0)
    assert abs(a * b.sym_upper - J01) < 1e-10
    # the antisymmetric bound carries the factor sqrt((R-a)/(R+a)) = 1 - a/R + ...
    assert abs(a * b.antisym_lower - js.lower) < 1.01 * js.lower * a


def test_conservative_j_star_is_used():
    js = at.j_star()
    b = sd.theorem1_bounds(0.1, 1.0)
    assert b.j_star_used == js.lower < js.value


def test_crossover_separates_verdicts():
    a_star = sd.theorem1_crossover(1.0)
    assert 0.2 < a_star < 0.3
    below = sd.decide(sd.StandardTorus(a_star * (1 - 1e-3), 1.0))
    above = sd.decide(sd.StandardTorus(a_star * (1 + 1e-3), 1.0))
    assert below.verdict is sd.Verdict.SYMMETRIC
    assert below.margin < 0.01
    assert above.verdict is sd.Verdict.INCONCLUSIVE


def test_thin_torus_is_symmetric_and_json_record():
    v = sd.decide(sd.StandardTorus(0.05, 1.0))
    assert v.verdict is sd.Verdict.SYMMETRIC
    assert v.margin == pytest.approx(abs(v.sym_bound - v.antisym_bound))
    rec = json.loads(v.to_json())
    assert rec["verdict"] == "Symmetric"
    assert {"sym_bound", "antisym_bound", "margin", "inputs", "provenance"} <= set(rec)
    assert rec["provenance"]["j_star_lower"] < rec["provenance"]["j_star"]


def test_standard_torus_never_asymmetric():
    for a in (0.01, 0.1, 0.3, 0.6, 0.9):
        assert sd.decide(sd.StandardTorus(a, 1.0)).verdict is not sd.Verdict.ASYMMETRIC


def test_verdict_stability_under_tiny_perturbation():
    for a in (0.02, 0.1, 0.2, 0.3):
        v0 = sd.decide(sd.StandardTorus(a, 1.0))
        v1 = sd.decide(sd.StandardTorus(a * (1 + 1e-9), 1.0 * (1 - 1e-9)))
        if v0.margin > 1e-6:
            assert v0.verdict is v1.verdict


def test_theorem2_bounds(params):
    tb = sd.theorem2_bounds_from(params)
    assert tb.sym_lower == pytest.approx(math.sqrt(math.pi**2 / (1 - params.a) ** 2 + 0.75))
    ups = [tb.antisym_upper(n) for n in range(1, 30)]
    assert all(x > y for x, y in zip(ups, ups[1:]))
    assert ups[-1] > tb.limit
    assert tb.limit < tb.sym_lower
    n = tb.N_threshold
    assert tb.antisym_upper(n) <= tb.sym_lower
    assert n == 1 or tb.antisym_upper(n - 1) > tb.sym_lower


def test_asymmetric_from_threshold_on(params):
    tb = sd.theorem2_bounds_from(params)
    for n in range(tb.N_threshold, tb.N_threshold + 20):
        v = sd.decide(sd.AnnularCylinderFamily(params.a, 1.0, params.L, n))
        assert v.verdict is sd.Verdict.ASYMMETRIC
        assert v.sym_bound > v.antisym_bound
        assert abs(v.provenance["g_residual"]) < 1e-8
        assert v.provenance["determinant_relative"] < 1e-6
    if tb.N_threshold > 1:
        v = sd.decide(sd.AnnularCylinderFamily(params.a, 1.0, params.L, 1))
        assert v.verdict is sd.Verdict.INCONCLUSIVE


def test_inconsistent_parameters_are_inconclusive(params):
    v = sd.decide(sd.AnnularCylinderFamily(params.a * 0.9, 1.0, params.L, 50))
    assert v.verdict is sd.Verdict.INCONCLUSIVE
    assert v.notes
    with pytest.raises(ValueError):
        sd.theorem2_bounds(params.a * 0.9, 1.0, params.L)
    # ratio 2(b-a)/L >= 1 is outside the ansatz
    v = sd.decide(sd.AnnularCylinderFamily(0.2, 1.0, 1.0, 50))
    assert v.verdict is sd.Verdict.INCONCLUSIVE


def test_unsupported_torus_kind():
    with pytest.raises(TypeError):
        sd.decide(object())
