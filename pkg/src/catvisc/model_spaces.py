"""Model surfaces of constant curvature: the plane, the unit sphere and its rescalings.

Points are plain numpy arrays: shape ``(2,)`` in the plane and unit
3-vectors on (scaled) spheres. The low-level kernels broadcast over
leading axes so the randomized checks can run on whole batches at once.

A scaled sphere of curvature ``kappa`` stores its points as unit vectors and
divides unit-sphere distances by ``sqrt(kappa)``.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from catvisc.errors import (
    DegenerateError,
    DomainError,
    InfeasibleError,
    NonUniqueGeodesicError,
)

CLAMP_SLACK = 1e-12
UNIT_SLACK = 1e-12
ANTIPODAL_GAP = 1e-9


def model_diameter(kappa):
    """``pi / sqrt(kappa)`` for positive curvature, infinity otherwise."""
    return math.pi / math.sqrt(kappa) if kappa > 0 else math.inf


def safe_arccos(c):
    """arccos that clamps rounding noise but refuses real domain errors."""
    c = np.asarray(c, dtype=float)
    if np.any(np.abs(c) > 1.0 + CLAMP_SLACK):
        raise DomainError(f"arccos argument out of range: {np.max(np.abs(c))!r}")
    out = np.arccos(np.clip(c, -1.0, 1.0))
    return out if out.ndim else float(out)


# -- kernels -----------------------------------------------------------------

def dot(a, b):
    return np.sum(a * b, axis=-1)


def cross(a, b):
    if np.ndim(a) == 1 and np.ndim(b) == 1:
        a0, a1, a2 = a.tolist()
        b0, b1, b2 = b.tolist()
        return np.array((a1 * b2 - a2 * b1, a2 * b0 - a0 * b2, a0 * b1 - a1 * b0))
    return np.stack(
        (
            a[..., 1] * b[..., 2] - a[..., 2] * b[..., 1],
            a[..., 2] * b[..., 0] - a[..., 0] * b[..., 2],
            a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0],
        ),
        axis=-1,
    )


def norm(a):
    return np.sqrt(dot(a, a))


def plane_dist(p, q):
    if np.ndim(p) == 1 and np.ndim(q) == 1:
        (p0, p1), (q0, q1) = p, q
        return math.hypot(float(p0) - float(q0), float(p1) - float(q1))
    d = np.asarray(p, dtype=float) - np.asarray(q, dtype=float)
    out = np.hypot(d[..., 0], d[..., 1])
    return out if out.ndim else float(out)


def plane_combine(alpha, x, y):
    if np.ndim(alpha) == 0:
        return alpha * x + (1.0 - alpha) * y
    alpha = np.asarray(alpha, dtype=float)[..., None]
    return alpha * x + (1.0 - alpha) * y


def sphere_dist(p, q):
    """Great-circle distance on the unit sphere.

    Equal to ``arccos <p, q>`` but evaluated as ``atan2(|p x q|, <p, q>)``,
    which keeps full relative accuracy for nearby points.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.ndim == 1 and q.ndim == 1:
        return _sphere_dist1(p.tolist(), q.tolist())
    out = np.arctan2(norm(cross(p, q)), dot(p, q))
    return out if out.ndim else float(out)


def _sphere_dist1(p, q):
    # single pair in plain floats; numpy call overhead dominates otherwise
    a0, a1, a2 = p
    b0, b1, b2 = q
    c0 = a1 * b2 - a2 * b1
    c1 = a2 * b0 - a0 * b2
    c2 = a0 * b1 - a1 * b0
    return math.atan2(math.sqrt(c0 * c0 + c1 * c1 + c2 * c2), a0 * b0 + a1 * b1 + a2 * b2)


def sphere_combine(alpha, x, y):
    """Slerp: the point of ``[x, y]`` at arc fraction ``1 - alpha`` from ``x``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim == 1 and y.ndim == 1 and np.ndim(alpha) == 0:
        return _sphere_combine1(float(alpha), x, y)
    alpha = np.asarray(alpha, dtype=float)
    theta = np.asarray(sphere_dist(x, y))
    if np.any(theta > math.pi - ANTIPODAL_GAP):
        raise NonUniqueGeodesicError("antipodal points have no unique geodesic")
    s = 1.0 - alpha
    sin_t = np.sin(theta)
    small = sin_t < 1e-300
    sin_t = np.where(small, 1.0, sin_t)
    wx = np.where(small, alpha, np.sin(alpha * theta) / sin_t)
    wy = np.where(small, s, np.sin(s * theta) / sin_t)
    # exact endpoints
    wx = np.where(alpha == 1.0, 1.0, np.where(alpha == 0.0, 0.0, wx))
    wy = np.where(alpha == 1.0, 0.0, np.where(alpha == 0.0, 1.0, wy))
    return wx[..., None] * x + wy[..., None] * y


def _sphere_combine1(alpha, x, y):
    if alpha == 1.0:
        return x.copy()
    if alpha == 0.0:
        return y.copy()
    theta = _sphere_dist1(x.tolist(), y.tolist())
    if theta > math.pi - ANTIPODAL_GAP:
        raise NonUniqueGeodesicError("antipodal points have no unique geodesic")
    sin_t = math.sin(theta)
    if sin_t < 1e-300:
        return alpha * x + (1.0 - alpha) * y
    wx = math.sin(alpha * theta) / sin_t
    wy = math.sin((1.0 - alpha) * theta) / sin_t
    return wx * x + wy * y


def rotate(v, axis, angle):
    """Rodrigues rotation of ``v`` about the unit ``axis``."""
    v = np.asarray(v, dtype=float)
    k = np.asarray(axis, dtype=float)
    c, s = math.cos(angle), math.sin(angle)
    return v * c + cross(k, v) * s + k * (dot(k, v)[..., None] * (1.0 - c))


def tangent_at(p, q):
    """Unit tangent at ``p`` pointing along the great circle towards ``q``."""
    w = q - dot(p, q)[..., None] * p
    n = norm(w)
    if np.any(n < 1e-15):
        raise DegenerateError("direction undefined for coincident or antipodal points")
    return w / n[..., None]


def exp_map(p, direction, length):
    """Point at arc length ``length`` from ``p`` along the unit tangent ``direction``."""
    return math.cos(length) * p + math.sin(length) * direction


# -- spaces ------------------------------------------------------------------

@dataclass(frozen=True)
class Plane:
    """The Euclidean plane, optionally restricted to a closed disk."""

    radius: float = math.inf
    center: tuple = (0.0, 0.0)

    kind = "plane"
    kappa = 0.0
    dim = 2

    @property
    def diameter_cap(self):
        return 2.0 * self.radius

    @property
    def model_diameter(self):
        return math.inf

    def point(self, x, y):
        return np.array([x, y], dtype=float)

    def check_point(self, p):
        p = np.asarray(p, dtype=float)
        if p.shape[-1:] != (2,):
            raise DomainError(f"planar point expected, got shape {p.shape}")
        return p

    def dist(self, p, q):
        return plane_dist(p, q)

    def combine(self, alpha, x, y):
        return plane_combine(alpha, x, y)

    def contains(self, p, slack=1e-12):
        if math.isinf(self.radius):
            return True
        return plane_dist(p, np.asarray(self.center)) <= self.radius + slack

    def sample(self, rng, n):
        """Uniform samples in the admissible disk (a 4x4 box if unbounded)."""
        c = np.asarray(self.center, dtype=float)
        if math.isinf(self.radius):
            return c + rng.uniform(-2.0, 2.0, size=(n, 2))
        r = self.radius * np.sqrt(rng.uniform(size=n))
        phi = rng.uniform(0.0, 2.0 * math.pi, size=n)
        return c + np.stack((r * np.cos(phi), r * np.sin(phi)), axis=-1)

    def coords(self, p):
        return tuple(float(v) for v in p)


@dataclass(frozen=True)
class Sphere:
    """Unit sphere (``kappa == 1``) or the sphere with distances scaled by ``1/sqrt(kappa)``.

    ``center`` and ``radius`` describe the admissible cap, with ``radius`` in
    the space's own (scaled) units. The cap diameter must stay below half
    the model diameter.
    """

    kappa: float = 1.0
    center: tuple = (0.0, 0.0, 1.0)
    radius: float = 0.7
    scale: float = field(init=False, repr=False, compare=False)

    dim = 3

    def __post_init__(self):
        if not self.kappa > 0:
            raise DomainError("sphere curvature must be positive")
        c = np.asarray(self.center, dtype=float)
        if abs(float(norm(c)) - 1.0) > UNIT_SLACK:
            raise DomainError("cap center must be a unit vector")
        object.__setattr__(self, "scale", 1.0 / math.sqrt(self.kappa))
        if not 2.0 * self.radius < self.model_diameter / 2.0:
            raise DomainError(
                f"cap diameter {2 * self.radius} must be below D_kappa/2 = {self.model_diameter / 2}"
            )

    @property
    def kind(self):
        return "sphere" if self.kappa == 1.0 else "scaled-sphere"

    @property
    def diameter_cap(self):
        return 2.0 * self.radius

    @property
    def model_diameter(self):
        return model_diameter(self.kappa)

    def point(self, x, y, z):
        return np.array([x, y, z], dtype=float)

    def check_point(self, p):
        p = np.asarray(p, dtype=float)
        if p.shape[-1:] != (3,):
            raise DomainError(f"spherical point expected, got shape {p.shape}")
        if np.any(np.abs(norm(p) - 1.0) > UNIT_SLACK):
            raise DomainError("spherical point is not a unit vector")
        return p

    def dist(self, p, q):
        d = sphere_dist(p, q)
        return d if self.kappa == 1.0 else d * self.scale

    def combine(self, alpha, x, y):
        return sphere_combine(alpha, x, y)

    def contains(self, p, slack=1e-12):
        return self.dist(np.asarray(self.center), p) <= self.radius + slack

    def sample(self, rng, n):
        """Uniform samples in the cap, by rejection from the whole sphere."""
        c = np.asarray(self.center, dtype=float)
        cos_r = math.cos(self.radius * math.sqrt(self.kappa))
        out = []
        have = 0
        while have < n:
            v = rng.normal(size=(max(2 * (n - have), 64) * 8, 3))
            v /= norm(v)[:, None]
            v = v[v @ c >= cos_r]
            out.append(v)
            have += len(v)
        return np.concatenate(out)[:n]

    def coords(self, p):
        return tuple(float(v) for v in p)


def _space_of(space, p):
    if isinstance(space, (Plane, Sphere)):
        return space.check_point(p)
    return p


def dist(space, p, q):
    """Validated distance between two points of ``space``."""
    p = _space_of(space, p)
    q = _space_of(space, q)
    return space.dist(p, q)


def combine(space, alpha, x, y):
    """Validated geodesic combination ``alpha x + (1 - alpha) y``.

    The result ``z`` satisfies ``dist(x, z) = (1 - alpha) dist(x, y)``.
    """
    if not 0.0 <= alpha <= 1.0:
        raise DomainError(f"alpha must lie in [0, 1], got {alpha}")
    x = _space_of(space, x)
    y = _space_of(space, y)
    if space.dist(x, y) >= space.model_diameter:
        raise NonUniqueGeodesicError("endpoints at or beyond the model diameter")
    return space.combine(alpha, x, y)


def spherical_angle(x, y, z):
    """Angle at ``x`` between the great-circle arcs ``[x, y]`` and ``[x, z]``.

    Solves the spherical law of cosines for the angle.
    """
    x, y, z = (np.asarray(v, dtype=float) for v in (x, y, z))
    a = sphere_dist(x, y)
    b = sphere_dist(x, z)
    c = sphere_dist(y, z)
    sa, sb = math.sin(a), math.sin(b)
    if a < 1e-15 or b < 1e-15 or sa * sb < 1e-15:
        raise DomainError("degenerate vertex: angle undefined")
    cos_alpha = (math.cos(c) - math.cos(a) * math.cos(b)) / (sa * sb)
    return safe_arccos(cos_alpha)


def tangent_angle(x, y, z):
    """Same angle as :func:`spherical_angle`, from tangent vectors via atan2.

    Accurate near 0 and pi, where the law-of-cosines form loses half the
    digits.
    """
    x, y, z = (np.asarray(v, dtype=float) for v in (x, y, z))
    t1 = y - dot(x, y) * x
    t2 = z - dot(x, z) * x
    if float(norm(t1)) < 1e-15 or float(norm(t2)) < 1e-15:
        raise DomainError("degenerate vertex: angle undefined")
    return float(np.arctan2(norm(cross(t1, t2)), dot(t1, t2)))


def comparison_triangle(d12, d23, d31, kappa):
    """Canonical triangle in the model surface with the given side lengths.

    Vertex 1 sits at the origin (``kappa == 0``) or the north pole, vertex 2
    along the first axis and vertex 3 in the upper half. For ``kappa > 0``
    the points are unit vectors of the scaled sphere.
    """
    sides = (d12, d23, d31)
    if min(sides) < 0:
        raise InfeasibleError("negative side length")
    slack = 1e-12 * max(1.0, max(sides))
    if d12 > d23 + d31 + slack or d23 > d12 + d31 + slack or d31 > d12 + d23 + slack:
        raise InfeasibleError("triangle inequality violated")
    if sum(sides) >= 2.0 * model_diameter(kappa):
        raise InfeasibleError("perimeter at or above 2 D_kappa")

    if kappa == 0:
        p1 = np.zeros(2)
        p2 = np.array([d12, 0.0])
        if d12 == 0.0 or d31 == 0.0:
            return p1, p2, np.array([d31, 0.0])
        cos_g = (d12**2 + d31**2 - d23**2) / (2.0 * d12 * d31)
        g = math.acos(min(1.0, max(-1.0, cos_g)))
        return p1, p2, np.array([d31 * math.cos(g), d31 * math.sin(g)])

    s = math.sqrt(kappa)
    a12, a23, a31 = d12 * s, d23 * s, d31 * s
    p1 = np.array([0.0, 0.0, 1.0])
    p2 = np.array([math.sin(a12), 0.0, math.cos(a12)])
    if math.sin(a12) < 1e-15 or math.sin(a31) < 1e-15:
        g = 0.0
    else:
        cos_g = (math.cos(a23) - math.cos(a12) * math.cos(a31)) / (math.sin(a12) * math.sin(a31))
        g = math.acos(min(1.0, max(-1.0, cos_g)))
    p3 = np.array([math.sin(a31) * math.cos(g), math.sin(a31) * math.sin(g), math.cos(a31)])
    return p1, p2, p3


def cat_comparison_check(space, x1, x2, x3, s, t, kappa=None):
    """Signed slack of the CAT(kappa) inequality for one pair of edge points.

    ``y1`` lies on ``[x1, x2]`` at arc fraction ``s`` from ``x1`` and ``y2``
    on ``[x1, x3]`` at fraction ``t``. Returns ``d(y1', y2') - rho(y1, y2)``
    where primes denote comparison points in the model of curvature
    ``kappa`` (the space's own curvature by default).
    """
    kappa = space.kappa if kappa is None else kappa
    d12, d23, d31 = space.dist(x1, x2), space.dist(x2, x3), space.dist(x3, x1)
    c1, c2, c3 = comparison_triangle(d12, d23, d31, kappa)
    y1 = space.combine(1.0 - s, x1, x2)
    y2 = space.combine(1.0 - t, x1, x3)
    if kappa == 0:
        m1 = plane_combine(1.0 - s, c1, c2)
        m2 = plane_combine(1.0 - t, c1, c3)
        model_d = plane_dist(m1, m2)
    else:
        m1 = sphere_combine(1.0 - s, c1, c2)
        m2 = sphere_combine(1.0 - t, c1, c3)
        model_d = sphere_dist(m1, m2) / math.sqrt(kappa)
    return float(model_d - space.dist(y1, y2))
