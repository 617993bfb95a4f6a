import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from catvisc import model_spaces as ms
from catvisc.errors import DomainError, InfeasibleError, NonUniqueGeodesicError
from catvisc.model_spaces import Plane, Sphere

from conftest import cap_point, plane_point, unit_interval


def test_model_diameter():
    assert ms.model_diameter(0.0) == math.inf
    assert ms.model_diameter(1.0) == math.pi
    assert ms.model_diameter(4.0) == pytest.approx(math.pi / 2, abs=1e-15)


def test_plane_basics():
    P = Plane()
    assert P.dist(P.point(0, 0), P.point(3, 4)) == 5.0
    mid = P.combine(0.5, P.point(0, 0), P.point(2, 0))
    np.testing.assert_array_equal(mid, [1.0, 0.0])


@given(plane_point, plane_point, unit_interval)
def test_plane_combination_convention(x, y, alpha):
    P = Plane()
    z = P.combine(alpha, x, y)
    d = P.dist(x, y)
    assert P.dist(x, z) == pytest.approx((1 - alpha) * d, abs=1e-12)
    assert P.dist(z, y) == pytest.approx(alpha * d, abs=1e-12)


@given(cap_point(1.2), cap_point(1.2), unit_interval)
def test_sphere_combination_convention(x, y, alpha):
    S = Sphere(radius=0.7)
    z = S.combine(alpha, x, y)
    d = S.dist(x, y)
    assert abs(np.linalg.norm(z) - 1.0) < 1e-14
    assert S.dist(x, z) == pytest.approx((1 - alpha) * d, abs=1e-12)
    assert S.dist(z, y) == pytest.approx(alpha * d, abs=1e-12)


def test_sphere_combine_exact_endpoints():
    x = np.array([1.0, 0.0, 0.0])
    y = np.array([0.0, 1.0, 0.0])
    np.testing.assert_array_equal(ms.sphere_combine(1.0, x, y), x)
    np.testing.assert_array_equal(ms.sphere_combine(0.0, x, y), y)


def test_sphere_dist_matches_arccos_for_separated_points(rng):
    v = rng.normal(size=(1000, 2, 3))
    v /= np.linalg.norm(v, axis=-1, keepdims=True)
    oracle = np.arccos(np.clip(np.sum(v[:, 0] * v[:, 1], axis=-1), -1, 1))
    got = ms.sphere_dist(v[:, 0], v[:, 1])
    keep = (oracle > 1e-3) & (oracle < math.pi - 1e-3)
    np.testing.assert_allclose(got[keep], oracle[keep], rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("angle", [1e-12, 1e-9, 1e-5, 0.3, 1.5])
def test_sphere_dist_keeps_relative_accuracy(angle):
    p = np.array([0.0, 0.0, 1.0])
    q = ms.exp_map(p, np.array([1.0, 0.0, 0.0]), angle)
    assert ms.sphere_dist(p, q) == pytest.approx(angle, rel=1e-12)


def test_scalar_and_batch_kernels_agree(rng):
    v = rng.normal(size=(200, 2, 3))
    v /= np.linalg.norm(v, axis=-1, keepdims=True)
    batch = ms.sphere_dist(v[:, 0], v[:, 1])
    single = np.array([ms.sphere_dist(a, b) for a, b in v])
    np.testing.assert_allclose(single, batch, rtol=1e-14, atol=1e-15)
    alpha = 0.3
    cb = ms.sphere_combine(alpha, v[:, 0], v[:, 1])
    cs = np.array([ms.sphere_combine(alpha, a, b) for a, b in v])
    np.testing.assert_allclose(cs, cb, atol=1e-14)


def test_antipodal_combine_raises():
    x = np.array([0.0, 0.0, 1.0])
    with pytest.raises(NonUniqueGeodesicError):
        ms.sphere_combine(0.5, x, -x)


@pytest.mark.parametrize("kappa", [0.25, 1.0, 4.0, 9.0])
def test_scaled_sphere_distance(kappa):
    S = Sphere(kappa=kappa, radius=0.7 / math.sqrt(kappa))
    p = np.array([0.0, 0.0, 1.0])
    q = np.array([math.sin(0.5), 0.0, math.cos(0.5)])
    assert S.dist(p, q) == pytest.approx(0.5 / math.sqrt(kappa), rel=1e-15)
    assert S.kind == ("sphere" if kappa == 1.0 else "scaled-sphere")


def test_sphere_cap_validation():
    with pytest.raises(DomainError):
        Sphere(radius=0.8)  # diameter 1.6 is not below pi/2
    with pytest.raises(DomainError):
        Sphere(center=(0.0, 0.0, 2.0))
    with pytest.raises(DomainError):
        Sphere(kappa=0.0)


def test_point_validation():
    S = Sphere()
    with pytest.raises(DomainError):
        S.check_point([1.0, 1.0, 0.0])
    with pytest.raises(DomainError):
        Plane().check_point([1.0, 2.0, 3.0])


def test_module_level_combine_validates_alpha():
    P = Plane()
    with pytest.raises(DomainError):
        ms.combine(P, 1.5, P.point(0, 0), P.point(1, 0))


def test_samples_lie_in_region(rng):
    S = Sphere(radius=0.5)
    pts = S.sample(rng, 2000)
    assert np.all(ms.sphere_dist(np.array(S.center), pts) <= 0.5 + 1e-12)
    D = Plane(radius=2.0, center=(1.0, 1.0))
    assert np.all(ms.plane_dist(D.sample(rng, 2000), np.array([1.0, 1.0])) <= 2.0 + 1e-12)


def test_tangent_angle_special_values():
    n = np.array([0.0, 0.0, 1.0])
    x = np.array([1.0, 0.0, 0.0])
    y = np.array([0.0, 1.0, 0.0])
    assert ms.tangent_angle(n, x, y) == pytest.approx(math.pi / 2, abs=1e-15)
    assert ms.tangent_angle(n, x, x) == 0.0
    assert ms.tangent_angle(n, x, -x) == pytest.approx(math.pi, abs=1e-15)


@given(cap_point(), cap_point(), cap_point())
def test_tangent_angle_agrees_with_law_of_cosines(x, y, z):
    if min(ms.sphere_dist(x, y), ms.sphere_dist(x, z), ms.sphere_dist(y, z)) < 1e-3:
        return
    a = ms.tangent_angle(x, y, z)
    if 1e-3 < a < math.pi - 1e-3:
        assert a == pytest.approx(ms.spherical_angle(x, y, z), abs=1e-8)


@given(st.floats(0.01, 1.0), st.floats(0.01, 1.0), st.floats(0.01, 1.0),
       st.sampled_from([0.0, 1.0, 4.0]))
def test_comparison_triangle_reproduces_sides(a, b, c, kappa):
    if max(a, b, c) > 0.999 * (a + b + c - max(a, b, c)):
        return
    p1, p2, p3 = ms.comparison_triangle(a, b, c, kappa)
    if kappa == 0:
        d = ms.plane_dist
        assert d(p1, p2) == pytest.approx(a, abs=1e-12)
        assert d(p2, p3) == pytest.approx(b, abs=1e-9)
        assert d(p3, p1) == pytest.approx(c, abs=1e-12)
    else:
        s = 1.0 / math.sqrt(kappa)
        for (u, v), side in (((p1, p2), a), ((p2, p3), b), ((p3, p1), c)):
            assert s * ms.sphere_dist(u, v) == pytest.approx(side, abs=1e-9)


def test_comparison_triangle_infeasible():
    with pytest.raises(InfeasibleError):
        ms.comparison_triangle(1.0, 1.0, 3.0, 0.0)
    with pytest.raises(InfeasibleError):
        ms.comparison_triangle(3.0, 3.0, 3.0, 1.0)  # perimeter beyond 2 pi
    with pytest.raises(InfeasibleError):
        ms.comparison_triangle(-1.0, 1.0, 1.0, 0.0)


@given(cap_point(), cap_point(), cap_point(), unit_interval, unit_interval)
def test_model_spaces_satisfy_their_own_comparison(x1, x2, x3, s, t):
    # a model space is its own comparison space: equality up to rounding
    S = Sphere()
    try:
        margin = ms.cat_comparison_check(S, x1, x2, x3, s, t)
    except InfeasibleError:
        return
    assert margin >= -1e-9


def test_sphere_violates_flat_comparison():
    # positive curvature: the flat comparison is violated for a large enough triangle
    S = Sphere()
    n = np.array([0.0, 0.0, 1.0])
    x = np.array([math.sin(0.7), 0.0, math.cos(0.7)])
    y = np.array([0.0, math.sin(0.7), math.cos(0.7)])
    assert ms.cat_comparison_check(S, n, x, y, 0.5, 0.5, kappa=0.0) < 0
