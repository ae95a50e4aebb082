import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fracshape.geometry import (Ball, BallMinusBall, Dilation, Interval, NormalField, Rotation,
                                Translation)

coords = st.floats(min_value=-2.0, max_value=2.0)


def test_interval_signed_distance_and_normals():
    dom = Interval(-1.0, 1.0)
    assert np.allclose(dom.signed_distance(np.array([0.0, 0.5, 1.5])), [1.0, 0.5, -0.5])
    assert dom.normal(-1.0)[0] == 1.0 and dom.normal(1.0)[0] == -1.0
    with pytest.raises(ValueError):
        dom.normal(0.2)
    with pytest.raises(ValueError):
        Interval(1.0, 1.0)


@given(coords, coords)
def test_disc_signed_distance(x, y):
    disc = Ball((0.2, -0.1), 0.8)
    d = disc.signed_distance(np.array([[x, y]]))[0]
    assert d == pytest.approx(0.8 - math.hypot(x - 0.2, y + 0.1), abs=1e-14)


def test_disc_quadrature_normals_point_inward_and_integrate_length():
    disc = Ball((0.0, 0.0), 1.5)
    q = disc.boundary_quadrature(128)
    assert np.allclose(np.linalg.norm(q.normals, axis=1), 1.0)
    assert np.allclose(np.abs(disc.signed_distance(q.points)), 0.0, atol=1e-14)
    # a small step along the normal enters the domain
    assert np.all(disc.signed_distance(q.points + 1e-3 * q.normals) > 0)
    assert q.total_measure == pytest.approx(2 * math.pi * 1.5)
    # divergence theorem: int X . nu = -int div X for X = x
    assert np.sum(q.weights * np.sum(q.points * q.normals, axis=1)) == pytest.approx(
        -2 * disc.volume)


@given(st.floats(min_value=-0.5, max_value=0.5))
@settings(max_examples=30)
def test_ball_minus_ball_distance_is_min_of_spheres(t):
    dom = BallMinusBall(Ball((0.0, 0.0), 1.0), Ball((t, 0.0), 0.3))
    pts = np.array([[0.0, 0.9], [t + 0.35, 0.0], [t, 0.0]])
    d = dom.signed_distance(pts)
    assert d[0] == pytest.approx(min(0.1, math.hypot(t, 0.9) - 0.3))
    assert d[1] == pytest.approx(min(1 - abs(t + 0.35), 0.05))
    assert d[2] == pytest.approx(-0.3)


def test_ball_minus_ball_quadrature_labels_and_normals():
    dom = BallMinusBall(Ball((0.0, 0.0), 1.0), Ball((0.2, 0.0), 0.3))
    q = dom.boundary_quadrature(200)
    assert set(np.unique(q.labels)) == {0, 1}
    assert np.all(dom.signed_distance(q.points + 1e-3 * q.normals) > 0)
    assert np.array_equal(dom.boundary_label(q.points + 1e-3 * q.normals), q.labels)
    assert q.total_measure == pytest.approx(2 * math.pi * 1.3, rel=1e-12)
    inner = q.points[q.labels == 1][0]
    assert np.allclose(dom.normal(inner), q.normals[q.labels == 1][0])


def test_ball_minus_ball_rejects_touching():
    with pytest.raises(ValueError):
        BallMinusBall(Ball((0.0, 0.0), 1.0), Ball((0.7, 0.0), 0.3))


def test_dilation_maps_domains_and_has_constant_jacobian():
    D = Dilation(2)
    disc = Ball((0.0, 0.0), 1.0)
    assert D.apply_to_domain(disc, 0.1).radius == pytest.approx(1.1)
    x = np.array([[0.3, -0.2]])
    assert np.allclose(D.deform(0.1, x), 1.1 * x)
    assert D.jacobian(0.1, x)[0] == pytest.approx(1.21)
    assert D.divergence(x)[0] == 2.0
    assert Dilation(1).apply_to_domain(Interval(-1.0, 1.0), -0.2) == Interval(-0.8, 0.8)
    with pytest.raises(ValueError):
        D.deform(1.0, x)


def test_translation_moves_inner_ball_only():
    dom = BallMinusBall(Ball((0.0, 0.0), 1.0), Ball((0.1, 0.0), 0.3))
    T = Translation.for_domain(dom)
    q = dom.boundary_quadrature(64)
    X = T.velocity(q.points)
    assert np.allclose(X[q.labels == 1], [1.0, 0.0])
    assert np.allclose(X[q.labels == 0], 0.0)
    moved = T.apply_to_domain(dom, 0.05)
    assert np.allclose(moved.inner.c, [0.15, 0.0])


@given(st.floats(min_value=-0.9, max_value=0.9), st.floats(min_value=-0.9, max_value=0.9))
@settings(max_examples=30)
def test_translation_divergence_matches_numeric(x, y):
    T = Translation((0.0, 0.0), 0.3, 0.8)
    p = np.array([[x, y]])
    step = 1e-6
    num = sum((T.velocity(p + step * e)[0, k] - T.velocity(p - step * e)[0, k]) / (2 * step)
              for k, e in enumerate(np.eye(2)))
    assert T.divergence(p)[0] == pytest.approx(num, abs=1e-6)
    assert T.jacobian(0.01, p)[0] == pytest.approx(1 + 0.01 * num, abs=1e-8)


def test_translation_in_one_dimension():
    T = Translation((0.0,), 0.2, 0.8, (1.0,))
    x = np.array([[0.1], [0.5], [0.9]])
    X = T.velocity(x)[:, 0]
    assert X[0] == 1.0 and X[2] == 0.0 and 0.0 < X[1] < 1.0


def test_rotation_is_tangent_and_volume_preserving():
    R = Rotation()
    q = Ball((0.0, 0.0), 1.0).boundary_quadrature(32)
    assert np.allclose(np.sum(R.velocity(q.points) * q.normals, axis=1), 0.0)
    assert np.allclose(R.jacobian(0.3, q.points), 1.0)
    assert np.allclose(np.linalg.norm(R.deform(0.3, q.points), axis=1), 1.0)


def test_normal_field_on_boundary_and_mean_flux():
    disc = Ball((0.0, 0.0), 1.0)
    X = NormalField(disc, lambda p: np.cos(np.arctan2(p[:, 1], p[:, 0])))
    q = disc.boundary_quadrature(256)
    V = X.velocity(q.points)
    assert np.allclose(np.sum(V * q.normals, axis=1), X.boundary_values(q.points))
    assert abs(X.mean_flux(q)) < 1e-12
    # vanishes outside the collar
    assert np.allclose(X.velocity(np.array([[0.0, 0.0], [0.5, 0.0]])), 0.0)
