"""Metric projection onto geodesic segments and onto fixed-point sets."""

import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from catvisc._golden import golden_section, parabolic_refine
from catvisc.errors import OutOfRangeError
from catvisc.glued import GluedSpace
from catvisc.model_spaces import (
    Plane,
    Sphere,
    cross,
    dot,
    norm,
    plane_combine,
    sphere_combine,
    sphere_dist,
    tangent_angle,
)

ANGLE_PROBE = 1e-6


@dataclass(frozen=True, eq=False)
class Segment:
    a: Any
    b: Any


@dataclass(frozen=True, eq=False)
class ProjectionResult:
    point: Any
    parameter: float  # arc fraction from seg.a
    distance: float


@dataclass(frozen=True, eq=False)
class Singleton:
    space: Any
    point: Any
    kind = "singleton"


@dataclass(frozen=True, eq=False)
class SegmentSet:
    space: Any
    segment: Segment
    kind = "segment"


@dataclass(frozen=True, eq=False)
class WholeSpace:
    space: Any
    kind = "whole-space"


# -- closed forms --------------------------------------------------------------

def plane_project(a, b, x):
    """Clamped orthogonal projection; broadcasts over leading axes of ``x``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    d = b - a
    dd = float(d @ d)
    if np.ndim(x) == 1 and dd > 0.0:
        lam = float((x[0] - a[0]) * d[0] + (x[1] - a[1]) * d[1]) / dd
        lam = min(1.0, max(0.0, lam))
        return plane_combine(1.0 - lam, a, b), lam
    if dd == 0.0:
        lam = np.zeros(np.shape(x)[:-1])
    else:
        lam = np.clip(dot(np.asarray(x, dtype=float) - a, d) / dd, 0.0, 1.0)
    return plane_combine(1.0 - lam, a, b), lam


def sphere_project(a, b, x):
    """Nearest point of the minor arc ``[a, b]`` on the unit sphere.

    Projects onto the great circle through ``a`` and ``b``, then clamps to
    the arc by comparing endpoint distances. Broadcasts over ``x``.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    x = np.asarray(x, dtype=float)
    theta_ab = sphere_dist(a, b)
    shape = x.shape[:-1]
    if theta_ab == 0.0:
        lam = np.zeros(shape)
        return sphere_combine(1.0 - lam, a, b), lam
    n = cross(a, b)
    n = n / norm(n)
    xp = x - dot(x, n)[..., None] * n
    xn = norm(xp)
    c = xp / np.where(xn > 0, xn, 1.0)[..., None]
    theta = np.arctan2(dot(cross(a, c), n), dot(a, c))
    inside = (xn > 1e-15) & (theta >= 0.0) & (theta <= theta_ab)
    lam_in = np.clip(theta / theta_ab, 0.0, 1.0)
    da, db = sphere_dist(x, a), sphere_dist(x, b)
    lam_end = np.where(db < da, 1.0, 0.0)
    lam = np.where(inside, lam_in, lam_end)
    return sphere_combine(1.0 - lam, a, b), lam


def _on_face(p, face):
    return p.face == face or (p.face == 2 and p.u == 0.0)


def _glued_segment_chart(a, b):
    """Face holding the segment and the sign of its chart side, or ``None``.

    Face 2 charts have ``u >= 0``. A face-1 segment qualifies when it stays
    in one half of face 1, so that unfolding across the shared edge is a
    reflection of a single half-plane.
    """
    if a.face == 2 and b.face == 2:
        return 2, 1.0
    if not (_on_face(a, 1) and _on_face(b, 1)):
        return None
    signs = {math.copysign(1.0, p.u) for p in (a, b) if p.u != 0.0}
    if len(signs) != 1:
        return None
    return 1, signs.pop()


def glued_project_arrays(space, seg, face, u, w):
    """Arc parameters of the projections of many glued points onto ``seg``.

    Points on the far face are unfolded across the shared edge and
    projected in the plane. The unfolded distance is a lower bound for the
    true one, so the planar foot is the exact projection whenever the two
    distances agree; entries where they do not are returned as NaN.
    """
    face = np.asarray(face, dtype=float)
    u = np.asarray(u, dtype=float)
    w = np.asarray(w, dtype=float)
    chart = _glued_segment_chart(seg.a, seg.b)
    if chart is None:
        return np.full(face.shape, np.nan)
    sf, sigma = chart
    same = (face == sf) | (u == 0.0)
    xu = np.where(same, u, -sigma * np.abs(u))
    feet, lam = plane_project((seg.a.u, seg.a.w), (seg.b.u, seg.b.w), np.stack((xu, w), axis=-1))
    lam = np.broadcast_to(lam, face.shape)
    zu, zw = feet[..., 0], feet[..., 1]
    chord = np.hypot(xu - zu, w - zw)
    zface = np.where(zu == 0.0, 2.0, float(sf))
    true = space.dist_arrays(face, u, w, zface, zu, zw)
    ok = same | (np.abs(true - chord) <= 1e-12 * np.maximum(1.0, chord))
    return np.where(ok, lam, np.nan)


def golden_project(space, seg, x):
    """Projection by golden-section search on the arc parameter.

    Works in any space offering ``dist`` and ``combine``.
    """
    a, b = seg.a, seg.b

    def g(lam):
        return space.dist(x, space.combine(1.0 - lam, a, b))

    if space.dist(a, b) == 0.0:
        return 0.0
    lam = golden_section(g, 0.0, 1.0, tol=1e-12)
    lam = parabolic_refine(g, lam, 1e-4, 0.0, 1.0)
    g0, g1, gl = g(0.0), g(1.0), g(lam)
    if g0 <= gl and g0 <= g1:
        return 0.0
    if g1 <= gl:
        return 1.0
    return lam


# -- public operations -----------------------------------------------------------

def project_segment(space, seg, x, method="auto"):
    """Metric projection of ``x`` onto the geodesic segment ``seg``.

    ``method="auto"`` uses a closed form where one exists (plane, sphere,
    glued segments inside one face, via unfolding) and golden-section
    search otherwise;
    ``method="golden"`` forces the search.
    """
    if method not in ("auto", "golden"):
        raise ValueError(f"unknown method {method!r}")
    a, b = seg.a, seg.b
    lam = None
    if method == "auto":
        if isinstance(space, Plane):
            _, lam = plane_project(a, b, x)
        elif isinstance(space, Sphere):
            _, lam = sphere_project(a, b, x)
        elif isinstance(space, GluedSpace):
            lam = float(glued_project_arrays(space, seg, x.face, x.u, x.w))
            if math.isnan(lam):
                lam = None
    if lam is None:
        lam = golden_project(space, seg, x)
    lam = float(lam)
    point = space.combine(1.0 - lam, a, b)
    d = float(space.dist(x, point))
    if d >= space.model_diameter / 2.0:
        raise OutOfRangeError(f"distance {d} to the segment is not below D_kappa/2")
    return ProjectionResult(point=point, parameter=lam, distance=d)


def project_fixset(fs, x):
    """Nearest point of a fixed-point set."""
    if fs.kind == "singleton":
        return fs.point
    if fs.kind == "whole-space":
        return x
    return project_segment(fs.space, fs.segment, x).point


def _comparison_angle(space, q, p1, p2, probe=ANGLE_PROBE):
    """Euclidean comparison angle at ``q`` of a small sub-triangle."""
    d1, d2 = space.dist(q, p1), space.dist(q, p2)
    y = space.combine(1.0 - min(1.0, probe / d1), q, p1)
    z = space.combine(1.0 - min(1.0, probe / d2), q, p2)
    a, b, c = space.dist(q, y), space.dist(q, z), space.dist(y, z)
    cos_g = (a * a + b * b - c * c) / (2.0 * a * b)
    return math.acos(min(1.0, max(-1.0, cos_g)))


def angle_at(space, q, p1, p2):
    """Angle at ``q`` between the geodesics towards ``p1`` and ``p2``."""
    if isinstance(space, Plane):
        v1 = np.asarray(p1) - q
        v2 = np.asarray(p2) - q
        return math.atan2(abs(v1[0] * v2[1] - v1[1] * v2[0]), float(v1 @ v2))
    if isinstance(space, Sphere):
        return tangent_angle(q, p1, p2)
    return _comparison_angle(space, q, p1, p2)


def projection_angle_check(space, fs, x):
    """Smallest angle at the foot ``q`` between ``x`` and the rest of ``fs``.

    Returns ``None`` (not applicable) when no direction into the set
    exists: singletons, whole space, or ``x`` already in the set.
    """
    if fs.kind != "segment":
        return None
    q = project_fixset(fs, x)
    if space.dist(q, x) < 1e-12:
        return None
    seg = fs.segment
    angles = []
    for end in (seg.a, seg.b):
        if space.dist(q, end) > 1e-9:
            angles.append(angle_at(space, q, x, end))
    if not angles:
        return None
    return min(angles)


def point_to_segment_distance(space, seg, x):
    return project_segment(space, seg, x).distance
