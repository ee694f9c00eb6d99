import math

import numpy as np
import pytest

from curlspec.grad_shafranov import (
    discrete_potential,
    fluxfree_eigenpair,
    grad_shafranov_lambda1,
    laplacian_dirichlet_lambda1,
    richardson,
    richardson_study,
    schrodinger_matrix,
    symmetric_amperian_lambda1,
    weighted_forms,
)
from curlspec.sections import (
    DegenerateSectionError,
    Disk,
    GridMask,
    Rectangle,
    build_grid,
    node_areas,
)

J01 = 2.404825557695773
DISK = Disk(1.0, 0.1)
RECT = Rectangle(1.0, 2.0, -1.0, 1.0)


def test_unit_square_matches_closed_form():
    # first Dirichlet eigenvalue of [1,2]x[0,1] for the plain Laplacian is 2 pi^2
    sec = Rectangle(1.0, 2.0, 0.0, 1.0)
    h = 1 / 32
    lam = laplacian_dirichlet_lambda1(sec, h).value
    discrete = 2 * (4 / h**2) * math.sin(math.pi * h / 2) ** 2
    assert abs(lam - discrete) < 1e-9 * discrete


def test_unit_disk_laplacian_converges_at_second_order():
    st = richardson_study(laplacian_dirichlet_lambda1, Disk(2.0, 1.0), 1 / 16)
    assert 1.5 <= st.order <= 2.5
    assert abs(st.finest - J01**2) / J01**2 < 5e-3


def test_schrodinger_matrix_is_symmetric_and_potential_close_to_three_quarters():
    grid = build_grid(RECT, 1 / 16)
    A = schrodinger_matrix(grid)
    assert abs(A - A.T).max() < 1e-10
    V = discrete_potential(grid)
    r = grid.node_r()
    inner = (r > 1 + 1.5 / 16) & (r < 2 - 1.5 / 16)
    z = grid.node_z()
    inner &= np.abs(z) < 1 - 1.5 / 16
    assert np.max(np.abs(V[inner] - 0.75 / r[inner] ** 2)) < 0.02


@pytest.mark.parametrize("sec,h", [(DISK, 0.1 / 16), (RECT, 1 / 16)])
def test_gs_eigenvalue_within_bracket(sec, h):
    est = grad_shafranov_lambda1(sec, h)
    assert est.bracket_low <= est.value <= est.bracket_high
    assert est.laplacian_value < est.value


def test_rayleigh_quotient_reproduces_eigenvalue():
    h = 1 / 16
    est = grad_shafranov_lambda1(RECT, h, with_bracket=False)
    energy, mass = weighted_forms(RECT, h, est.field.u)
    assert abs(energy / mass - est.value) < 1e-8 * est.value


def test_eigenfunction_positive_and_v_relation():
    est = grad_shafranov_lambda1(DISK, 0.1 / 16, with_bracket=False)
    f = est.field
    assert np.all(f.u[f.interior] > 0)
    rr = np.broadcast_to(f.r[None, :], f.u.shape)
    assert np.allclose(f.u[f.interior], np.sqrt(rr[f.interior]) * f.v[f.interior])
    assert np.all(f.u[~f.interior] == 0)


def test_symmetric_value_is_square_root():
    lam = grad_shafranov_lambda1(RECT, 1 / 16, with_bracket=False).value
    assert symmetric_amperian_lambda1(RECT, 1 / 16) == pytest.approx(math.sqrt(lam), rel=1e-12)


def test_far_from_axis_approaches_laplacian():
    # 3/(4 r^2) becomes negligible for R >> a
    sec = Disk(100.0, 1.0)
    est = grad_shafranov_lambda1(sec, 1 / 32)
    assert abs(est.value - est.laplacian_value) < 1e-3


@pytest.mark.parametrize("sec,h", [(DISK, 0.1 / 16), (RECT, 1 / 16)])
def test_fluxfree_exceeds_symmetric(sec, h):
    ff = fluxfree_eigenpair(sec, h)
    assert ff.lam > symmetric_amperian_lambda1(sec, h)
    assert abs(ff.weighted_mean) < 1e-8
    f = ff.field
    assert np.allclose(f.u[~f.interior], ff.boundary_value)


def test_fluxfree_rectangle_converges():
    st = richardson_study(lambda s, h: fluxfree_eigenpair(s, h).lam, RECT, 1 / 8)
    assert 1.5 <= st.order <= 2.5


def test_node_areas_sum_to_section_area():
    h = 0.1 / 16
    grid = build_grid(DISK, h)
    a_in, a_out, _ = node_areas(DISK, grid)
    assert abs(a_in.sum() + a_out.sum() - math.pi * 0.01) < 1e-4 * math.pi * 0.01
    grid = build_grid(RECT, 1 / 16)
    a_in, a_out, _ = node_areas(RECT, grid)
    assert a_in.sum() + a_out.sum() == pytest.approx(2.0, rel=1e-12)


def test_richardson_on_exact_power_law():
    hs = [0.1, 0.05, 0.025]
    vals = [3.0 + 2.0 * h**2 for h in hs]
    st = richardson(vals, hs)
    assert st.order == pytest.approx(2.0, abs=1e-9)
    assert st.error == pytest.approx(2.0 * 0.025**2, rel=1e-6)
    with pytest.raises(ValueError):
        richardson([1.0, 2.0], hs[:2])


def test_grid_mask_from_rectangle_uses_staircase():
    mask = GridMask.from_shape(RECT, 1 / 16)
    lam_mask = laplacian_dirichlet_lambda1(mask).value
    lam_rect = laplacian_dirichlet_lambda1(RECT, 1 / 16).value
    # nodes on the rectangle sides are exterior in both, so the problems coincide
    assert lam_mask == pytest.approx(lam_rect, rel=1e-10)
    with pytest.raises(ValueError):
        richardson_study(laplacian_dirichlet_lambda1, mask, 1 / 16)


def test_mask_roundtrip_and_containment():
    mask = GridMask.from_shape(DISK, 0.1 / 8)
    again = GridMask.parse(mask.dumps())
    assert np.array_equal(again.occupied, mask.occupied)
    smaller = GridMask.from_shape(Disk(1.0, 0.06), 0.1 / 8)
    assert mask.contains(smaller)
    assert not smaller.contains(mask)


def test_domain_monotonicity_on_masks():
    big = GridMask.from_shape(DISK, 0.1 / 8)
    small = GridMask.from_shape(Disk(1.0, 0.06), 0.1 / 8)
    assert big.contains(small)
    assert grad_shafranov_lambda1(big).value < grad_shafranov_lambda1(small).value


def test_degenerate_and_invalid_sections():
    with pytest.raises(DegenerateSectionError):
        build_grid(Rectangle(1.0, 1.05, 0.0, 1.0), 0.1)
    with pytest.raises(ValueError):
        Disk(0.1, 0.2)
    with pytest.raises(ValueError):
        Rectangle(0.0, 1.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        GridMask(0.0, 0.0, 0.1, np.ones((3, 3), dtype=bool))
    with pytest.raises(DegenerateSectionError):
        GridMask(1.0, 0.0, 0.1, np.zeros((3, 3), dtype=bool))
    with pytest.raises(ValueError):
        GridMask.parse("1 0 0.1 3 2\n0 1 0\n")
    with pytest.raises(ValueError):
        build_grid(RECT, -1.0)


def test_small_grid_uses_dense_path_and_matches_closed_form():
    sec = Rectangle(1.0, 1.3, 0.0, 0.3)
    h = 0.05
    lam = laplacian_dirichlet_lambda1(sec, h).value
    discrete = 2 * (4 / h**2) * math.sin(math.pi * h / (2 * 0.3)) ** 2
    assert abs(lam - discrete) < 1e-10 * discrete
    est = grad_shafranov_lambda1(sec, h)
    assert est.bracket_low <= est.value <= est.bracket_high
