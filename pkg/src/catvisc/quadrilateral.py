"""The normalised four-point cosine combination ``h`` and its identities.

For points ``A, B, C, D`` at CAT(1) scale (all pairwise distances below
``pi/2``)::

    h(A, B; C, D) = (cos AC + cos BD - cos AD - cos BC) / (AB * CD)

On the unit sphere the numerator equals ``<A - B, C - D>``; that form is
used there because it avoids the cancellation between cosines of nearby
points. Other spaces go through distances, optionally rescaled by a factor
``scale`` so that a flat configuration can be put into the CAT(1) regime.
"""

import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from catvisc.errors import DegenerateError, DomainError, OutOfRangeError
from catvisc.model_spaces import (
    Sphere,
    cross,
    dot,
    exp_map,
    tangent_angle,
    sphere_dist,
    tangent_at,
)

MIN_DENOMINATOR = 1e-8
REGIME = math.pi / 2


@dataclass(frozen=True, eq=False)
class Quadruple:
    A: Any
    B: Any
    C: Any
    D: Any
    space: Any
    scale: float = 1.0

    def points(self):
        return (self.A, self.B, self.C, self.D)


def h_from_distances(ac, bd, ad, bc, ab, cd):
    """``h`` from the six pairwise distances (already at CAT(1) scale)."""
    return (np.cos(ac) + np.cos(bd) - np.cos(ad) - np.cos(bc)) / (ab * cd)


def _unit_scale(q):
    if isinstance(q.space, Sphere):
        return math.sqrt(q.space.kappa)
    return q.scale


def _checked_distances(q):
    pts = q.points()
    s = _unit_scale(q)
    d = {}
    names = "ABCD"
    for i in range(4):
        for j in range(i + 1, 4):
            d[names[i] + names[j]] = s * q.space.dist(pts[i], pts[j])
    if d["AB"] == 0.0 or d["CD"] == 0.0:
        raise DegenerateError("h needs A != B and C != D")
    # the inner-product form on spheres has no cancellation problem
    if not isinstance(q.space, Sphere) and d["AB"] * d["CD"] < MIN_DENOMINATOR:
        raise DegenerateError("denominator too close to zero for a stable evaluation")
    if max(d.values()) >= REGIME:
        raise OutOfRangeError("pairwise distance at or beyond pi/2 at CAT(1) scale")
    return d


def h(q):
    """Evaluate ``h`` for a quadruple, checking the regime."""
    d = _checked_distances(q)
    if isinstance(q.space, Sphere):
        A, B, C, D = (np.asarray(p, dtype=float) for p in q.points())
        return float(dot(A - B, C - D) / (d["AB"] * d["CD"]))
    return float(h_from_distances(d["AC"], d["BD"], d["AD"], d["BC"], d["AB"], d["CD"]))


def _replace(q, **kw):
    pts = dict(A=q.A, B=q.B, C=q.C, D=q.D)
    pts.update(kw)
    return Quadruple(space=q.space, scale=q.scale, **pts)


def h_decompose_margin(q, X):
    """``|h(A,B;C,D) - (AX/AB) h(A,X;C,D) - (XB/AB) h(X,B;C,D)|`` for ``X`` on ``[A, B]``."""
    sp = q.space
    ax, xb, ab = sp.dist(q.A, X), sp.dist(X, q.B), sp.dist(q.A, q.B)
    if ax < 1e-12 or xb < 1e-12:
        raise DegenerateError("X must lie strictly between A and B")
    lhs = h(q)
    rhs = ax / ab * h(_replace(q, B=X)) + xb / ab * h(_replace(q, A=X))
    return abs(lhs - rhs)


def h_additivity_margin(q, n, m):
    """Gap between ``h`` and the mean of ``h`` over an ``n x m`` equal partition."""
    if n < 1 or m < 1:
        raise ValueError("partition counts must be positive")
    sp = q.space
    As = [sp.combine(1.0 - i / n, q.A, q.B) for i in range(n + 1)]
    Cs = [sp.combine(1.0 - j / m, q.C, q.D) for j in range(m + 1)]
    As[0], As[n], Cs[0], Cs[m] = q.A, q.B, q.C, q.D
    total = 0.0
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            sub = Quadruple(As[i - 1], As[i], Cs[j - 1], Cs[j], sp, q.scale)
            total += h(sub)
    return abs(h(q) - total / (n * m))


def same_side(P, Q, X, Y):
    """True unless ``X`` and ``Y`` lie strictly on opposite sides of the great circle PQ."""
    n = cross(np.asarray(P, float), np.asarray(Q, float))
    return float(dot(n, X)) * float(dot(n, Y)) >= -1e-15


def limit_formula(P, X, Q, Y):
    """``sin a sin b + cos a cos b cos d(P, Q)`` with the two direction angles.

    ``a`` is the angle at ``P`` between ``Q`` and ``X``; ``b`` is ``pi``
    minus the angle at ``Q`` between ``Y`` and ``P``. Valid when ``X`` and
    ``Y`` are on the same side of the great circle through ``P`` and ``Q``.
    """
    xi_x = tangent_angle(P, Q, X)
    xi_y = math.pi - tangent_angle(Q, Y, P)
    return (
        math.sin(xi_x) * math.sin(xi_y)
        + math.cos(xi_x) * math.cos(xi_y) * math.cos(sphere_dist(P, Q))
    )


def h_limit_check(P, X, Q, Y, x, y):
    """Return ``(h(P, P_x; Q, Q_y), limit formula)`` on the unit sphere.

    ``P_x`` is the point of ``[P, X]`` at arc length ``x`` from ``P``, and
    likewise ``Q_y``.
    """
    P, X, Q, Y = (np.asarray(v, dtype=float) for v in (P, X, Q, Y))
    if min(sphere_dist(P, X), sphere_dist(Q, Y), sphere_dist(P, Q)) < 1e-12:
        raise DomainError("degenerate direction: coincident points")
    if not same_side(P, Q, X, Y):
        raise DomainError("X and Y on opposite sides of the great circle through P and Q")
    if not (0.0 < x < REGIME / 2 and 0.0 < y < REGIME / 2):
        raise DomainError("arc lengths must be small and positive")
    u, v = tangent_at(P, X), tangent_at(Q, Y)
    # P - P_x and Q - Q_y formed without subtracting nearby unit vectors
    dp = 2.0 * math.sin(x / 2) ** 2 * P - math.sin(x) * u
    dq = 2.0 * math.sin(y / 2) ** 2 * Q - math.sin(y) * v
    hval = float(dot(dp, dq)) / (x * y)
    return hval, limit_formula(P, X, Q, Y)


def limit_points(P, X, Q, Y, x, y):
    """The points ``P_x`` and ``Q_y`` used by :func:`h_limit_check`."""
    P, X, Q, Y = (np.asarray(v, dtype=float) for v in (P, X, Q, Y))
    return exp_map(P, tangent_at(P, X), x), exp_map(Q, tangent_at(Q, Y), y)


def random_cap_quadruples(rng, n, space):
    """``n`` quadruples sampled uniformly from the space's cap, as a (4, n, 3) array."""
    pts = space.sample(rng, 4 * n)
    return pts.reshape(4, n, 3)


def h_sphere_batch(A, B, C, D):
    """Batch evaluation on unit vectors; also returns the denominators."""
    ab = sphere_dist(A, B)
    cd = sphere_dist(C, D)
    return dot(A - B, C - D) / (ab * cd), ab * cd

