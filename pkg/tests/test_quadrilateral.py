import math

import numpy as np
import pytest
from hypothesis import given

from catvisc.errors import DegenerateError, DomainError, OutOfRangeError
from catvisc.glued import GluedSpace
from catvisc.lemmas import limit_configurations
from catvisc.model_spaces import Plane, Sphere, exp_map, sphere_dist
from catvisc.quadrilateral import (
    Quadruple,
    h,
    h_additivity_margin,
    h_decompose_margin,
    h_from_distances,
    h_limit_check,
    h_sphere_batch,
    limit_formula,
    limit_points,
    same_side,
)

from conftest import cap_point

S = Sphere(radius=0.7)
P = Plane()
POLE = np.array([0.0, 0.0, 1.0])


def _at(theta, phi=0.0):
    return np.array([math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi),
                     math.cos(theta)])


def test_self_pair_value():
    # h(A, B; A, B) = 4 sin^2(r/2) / r^2; frozen value at r = pi/3
    A, B = POLE, _at(math.pi / 3)
    val = h(Quadruple(A, B, A, B, Sphere(radius=0.7)))
    assert val == pytest.approx(0.9118906528, abs=1e-10)
    r = math.pi / 3
    assert val == pytest.approx(4 * math.sin(r / 2) ** 2 / r**2, rel=1e-13)


def test_inner_product_form_matches_cosines():
    A, B, C, D = _at(0.3, 0.1), _at(0.5, 2.0), _at(0.2, 4.0), _at(0.6, 5.5)
    d = {k: sphere_dist(*v) for k, v in
         {"ac": (A, C), "bd": (B, D), "ad": (A, D), "bc": (B, C), "ab": (A, B), "cd": (C, D)}.items()}
    via_cos = h_from_distances(d["ac"], d["bd"], d["ad"], d["bc"], d["ab"], d["cd"])
    assert h(Quadruple(A, B, C, D, S)) == pytest.approx(via_cos, abs=1e-13)


@given(cap_point(), cap_point(), cap_point(), cap_point())
def test_swap_symmetry_and_bound(A, B, C, D):
    if min(sphere_dist(A, B), sphere_dist(C, D)) < 1e-6:
        return
    v = h(Quadruple(A, B, C, D, S))
    assert v == h(Quadruple(C, D, A, B, S))
    assert abs(v) <= 1 + 1e-9


def test_scaled_sphere_uses_unit_distances():
    S4 = Sphere(kappa=4.0, radius=0.35)
    A, B, C, D = _at(0.3, 0.1), _at(0.5, 2.0), _at(0.2, 4.0), _at(0.6, 5.5)
    assert h(Quadruple(A, B, C, D, S4)) == pytest.approx(h(Quadruple(A, B, C, D, S)), abs=1e-14)


def test_plane_scale_moves_into_the_regime():
    A, B, C, D = (np.array(v, dtype=float) for v in ([0, 0], [3, 0], [0, 1], [3, 1]))
    with pytest.raises(OutOfRangeError):
        h(Quadruple(A, B, C, D, P))
    v = h(Quadruple(A, B, C, D, P, scale=0.3))
    assert abs(v) <= 1 + 1e-9


def test_glued_quadruple_rescaled():
    G = GluedSpace()
    pts = [G.vertex(n) for n in "ABCE"]
    largest = max(G.dist(p, q) for p in pts for q in pts)
    v = h(Quadruple(*pts, G, scale=1.0 / largest))
    assert abs(v) <= 1 + 1e-9


def test_degenerate_and_out_of_regime():
    with pytest.raises(DegenerateError):
        h(Quadruple(POLE, POLE, _at(0.1), _at(0.2), S))
    with pytest.raises(OutOfRangeError):
        h(Quadruple(_at(0.8, 0.0), _at(0.8, math.pi), _at(0.1), _at(0.2), Sphere(radius=0.7)))
    tiny = np.array([1e-5, 0.0])
    with pytest.raises(DegenerateError):
        h(Quadruple(np.zeros(2), tiny, np.zeros(2), tiny, P))


def test_decomposition_plane_midpoint_exact():
    A, B, C, D = (np.array(v, dtype=float) for v in ([0, 0], [0.4, 0.1], [0.1, 0.5], [0.6, 0.3]))
    q = Quadruple(A, B, C, D, P)
    assert h_decompose_margin(q, P.combine(0.5, A, B)) <= 1e-12


def test_decomposition_on_sphere():
    A, B, C, D = _at(0.3, 0.1), _at(0.5, 2.0), _at(0.2, 4.0), _at(0.6, 5.5)
    q = Quadruple(A, B, C, D, S)
    assert h_decompose_margin(q, S.combine(0.7, A, B)) <= 1e-9
    with pytest.raises(DegenerateError):
        h_decompose_margin(q, A)


@given(cap_point(), cap_point(), cap_point(), cap_point())
def test_decomposition_property(A, B, C, D):
    if min(sphere_dist(A, B), sphere_dist(C, D)) < 1e-3:
        return
    q = Quadruple(A, B, C, D, S)
    assert h_decompose_margin(q, S.combine(0.3, A, B)) <= 1e-9


def test_nested_decomposition_equals_four_way_partition():
    A, B, C, D = _at(0.3, 0.1), _at(0.5, 2.0), _at(0.2, 4.0), _at(0.6, 5.5)
    q = Quadruple(A, B, C, D, S)
    assert h_additivity_margin(q, 4, 1) <= 1e-9


@pytest.mark.parametrize("n", [1, 2, 4, 8, 16])
@pytest.mark.parametrize("m", [1, 2, 4, 8, 16])
def test_additivity(n, m):
    A, B, C, D = _at(0.3, 0.1), _at(0.5, 2.0), _at(0.2, 4.0), _at(0.6, 5.5)
    margin = h_additivity_margin(Quadruple(A, B, C, D, S), n, m)
    assert margin <= 1e-8
    if n == m == 1:
        assert margin == 0.0


def test_additivity_rejects_empty_partition():
    A, B, C, D = _at(0.3, 0.1), _at(0.5, 2.0), _at(0.2, 4.0), _at(0.6, 5.5)
    with pytest.raises(ValueError):
        h_additivity_margin(Quadruple(A, B, C, D, S), 0, 1)


def test_batch_matches_scalar(rng):
    pts = S.sample(rng, 400).reshape(4, 100, 3)
    batch, _ = h_sphere_batch(*pts)
    single = [h(Quadruple(*(p[i] for p in pts), S)) for i in range(100)]
    np.testing.assert_allclose(batch, single, atol=1e-14)


# -- limit formula -----------------------------------------------------------

def _config(d, xi_x, xi_y, arm=0.3):
    e1 = np.array([1.0, 0.0, 0.0])
    Pp, Q = exp_map(POLE, e1, -d / 2), exp_map(POLE, e1, d / 2)
    n = np.array([0.0, 1.0, 0.0])
    tP, tQ = e1 * math.cos(d / 2) + POLE * math.sin(d / 2), -(e1 * math.cos(d / 2) - POLE * math.sin(d / 2))
    X = exp_map(Pp, math.cos(xi_x) * tP + math.sin(xi_x) * n, arm)
    Y = exp_map(Q, -math.cos(xi_y) * tQ + math.sin(xi_y) * n, arm)
    return Pp, X, Q, Y


def test_limit_formula_special_cases():
    d = 0.8
    assert limit_formula(*_config(d, math.pi / 2, math.pi / 2)) == pytest.approx(1.0, abs=1e-14)
    assert limit_formula(*_config(d, math.pi / 2, 0.0)) == pytest.approx(0.0, abs=1e-14)
    assert limit_formula(*_config(d, 0.0, 0.0)) == pytest.approx(math.cos(d), abs=1e-14)


def test_limit_check_converges():
    Pp, X, Q, Y = _config(0.6, 0.7, 1.1)
    errs = [abs(np.subtract(*h_limit_check(Pp, X, Q, Y, x, x))) for x in (1e-2, 1e-3, 1e-4, 1e-5)]
    assert errs == sorted(errs, reverse=True)
    assert errs[-1] < 1e-4


def test_limit_points_lie_on_the_arms():
    Pp, X, Q, Y = _config(0.6, 0.7, 1.1)
    px, qy = limit_points(Pp, X, Q, Y, 0.01, 0.02)
    assert sphere_dist(Pp, px) == pytest.approx(0.01, rel=1e-12)
    assert sphere_dist(Q, qy) == pytest.approx(0.02, rel=1e-12)
    assert sphere_dist(Pp, px) + sphere_dist(px, X) == pytest.approx(sphere_dist(Pp, X), abs=1e-14)


def test_limit_check_domain():
    Pp, X, Q, Y = _config(0.6, 0.7, 1.1)
    Y_flip = Y * np.array([1.0, -1.0, 1.0])
    assert not same_side(Pp, Q, X, Y_flip)
    with pytest.raises(DomainError):
        h_limit_check(Pp, X, Q, Y_flip, 1e-3, 1e-3)
    with pytest.raises(DomainError):
        h_limit_check(Pp, Pp, Q, Y, 1e-3, 1e-3)
    with pytest.raises(DomainError):
        h_limit_check(Pp, X, Q, Y, 0.0, 1e-3)


def test_twenty_fixed_configurations_cover_the_special_cases():
    configs = limit_configurations()
    assert len(configs) == 20
    values = [limit_formula(*c) for c in configs]
    assert sum(abs(v - 1.0) < 1e-12 for v in values) >= 4
    assert sum(abs(v) < 1e-12 for v in values) >= 4
