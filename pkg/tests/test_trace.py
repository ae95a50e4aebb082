import numpy as np
import pytest

from fracshape.constants import ball_torsion_psi, ell_s
from fracshape.geometry import Ball, BallMinusBall, Interval
from fracshape.operator import Grid, GridField, assemble
from fracshape.solver import solve_eigen, solve_torsion
from fracshape.trace import FAILED, OK, extract_psi, fill_failed


@pytest.mark.parametrize("s", [0.25, 0.5, 0.75])
def test_shift_fit_is_exact_on_the_interval_profile(s):
    # u^{1/s} = ell^{1/s} (1 - x)(1 + x) is a quadratic in the distance
    dom = Interval(-1.0, 1.0)
    grid = Grid.for_domain(dom, 128)
    u = GridField.from_function(grid, lambda x: ell_s(s) * (1 - x * x) ** s)
    tr = extract_psi(u, dom, s, dom.boundary_quadrature())
    assert np.allclose(tr.psi, ell_s(s) * 2**s, rtol=1e-10)
    assert np.all(tr.flags == OK)
    assert np.allclose(tr.offset, 0.0, atol=1e-8)


def test_shift_fit_recovers_a_shifted_profile():
    # a profile vanishing a quarter cell inside the boundary
    s, n = 0.4, 128
    dom = Interval(-1.0, 1.0)
    grid = Grid.for_domain(dom, n)
    a = 0.25 * grid.h
    u = GridField.from_function(grid, lambda x: np.clip(1 - a - np.abs(x), 0, None) ** s)
    tr = extract_psi(u, dom, s, dom.boundary_quadrature())
    assert np.allclose(tr.psi, 1.0, rtol=1e-10)
    assert np.allclose(tr.offset, 0.25, atol=1e-8)


@pytest.mark.parametrize("s", [0.25, 0.5, 0.75])
def test_discrete_torsion_trace_in_1d(s):
    dom = Interval(-1.0, 1.0)
    res = solve_torsion(assemble(Grid.for_domain(dom, 1024), None, s))
    tr = extract_psi(res.u, dom, s, dom.boundary_quadrature())
    assert np.allclose(tr.psi, ball_torsion_psi(1, s), rtol=1e-2)


def test_discrete_torsion_trace_on_the_disc():
    s = 0.5
    disc = Ball((0.0, 0.0), 1.0)
    res = solve_torsion(assemble(Grid.for_domain(disc, 50), None, s))
    tr = extract_psi(res.u, disc, s, disc.boundary_quadrature(64))
    assert np.nanmean(tr.psi) == pytest.approx(ball_torsion_psi(2, s), rel=3e-2)
    assert tr.spread() < 5e-2
    assert tr.n_failed == 0


def test_ratio_method_scales_with_the_field():
    s = 0.5
    disc = Ball((0.0, 0.0), 1.0)
    op = assemble(Grid.for_domain(disc, 30), None, s)
    w = solve_torsion(op).u
    quad = disc.boundary_quadrature(32)
    base = extract_psi(w, disc, s, quad, method="ratio", reference=w)
    double = extract_psi(w * 2.0, disc, s, quad, method="ratio", reference=w)
    assert np.allclose(double.psi, 2 * base.psi, rtol=1e-12)
    assert np.allclose(base.psi, extract_psi(w, disc, s, quad).psi, rtol=1e-10)


def test_ratio_method_eigenfunction_trace_is_radial():
    s = 0.5
    disc = Ball((0.0, 0.0), 1.0)
    op = assemble(Grid.for_domain(disc, 40), None, s)
    w = solve_torsion(op).u
    quad = disc.boundary_quadrature(64)
    tr = extract_psi(solve_eigen(op).u, disc, s, quad, method="ratio", reference=w)
    # the staircase noise comes from the torsion trace; dividing by w adds none
    assert tr.spread() <= extract_psi(w, disc, s, quad).spread()
    assert tr.spread() < 8e-2


def test_ratio_method_argument_errors():
    dom = Interval(-1.0, 1.0)
    op = assemble(Grid.for_domain(dom, 32), None, 0.5)
    other = assemble(Grid.for_domain(dom, 32), None, 0.5)
    u = solve_torsion(op).u
    q = dom.boundary_quadrature()
    with pytest.raises(ValueError):
        extract_psi(u, dom, 0.5, q, method="ratio")
    with pytest.raises(ValueError):
        extract_psi(u, dom, 0.5, q, method="ratio", reference=solve_torsion(other).u)
    with pytest.raises(ValueError):
        extract_psi(u, dom, 0.5, q, method="spline")


def test_thin_gap_flags_points():
    s = 0.5
    dom = BallMinusBall(Ball((0.0, 0.0), 1.0), Ball((0.6, 0.0), 0.3))
    op = assemble(Grid.for_domain(dom, 40), None, s)
    tr = extract_psi(solve_torsion(op).u, dom, s, dom.boundary_quadrature(128))
    thin = np.abs(tr.quad.points[:, 1]) < 0.05
    assert np.any(tr.flags[thin] != OK)
    assert np.all(tr.flags[~thin & (tr.quad.points[:, 0] < 0)] == OK)


def test_fill_failed_interpolates_periodically():
    disc = Ball((0.0, 0.0), 1.0)
    op = assemble(Grid.for_domain(disc, 24), None, 0.5)
    tr = extract_psi(solve_torsion(op).u, disc, 0.5, disc.boundary_quadrature(16))
    ref = tr.psi.copy()
    tr.psi[[0, 5]] = np.nan
    tr.flags[[0, 5]] = FAILED
    filled = fill_failed(tr)
    assert np.all(np.isfinite(filled))
    assert filled[5] == pytest.approx((ref[4] + ref[6]) / 2)
    assert filled[0] == pytest.approx((ref[15] + ref[1]) / 2)
