"""Two flat triangles glued along a common segment, with the intrinsic metric.

Face 1 is the triangle A, B, C in the plane ``y = 0`` and face 2 the
triangle C, D, E in the plane ``x = 0``; they share the segment ``[C, D]``
on the z-axis (a median of face 1, an edge of face 2). Each face has a
planar chart: face 1 uses ``(x, z)``, face 2 uses ``(y, z)``, so the shared
segment is ``u = 0, w in [0, 4]`` in both. Points on the shared segment are
stored as face-2 points.

The resulting space is CAT(0), yet metric projection onto ``[C, E]`` fails
the N-property: the midpoint D of ``[A, B]`` projects to F, the midpoint of
``[C, E]``, while both A and B project to C.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from catvisc._golden import golden_section
from catvisc.errors import DomainError

EDGE_LENGTH = 4.0
FACE_SLACK = 1e-12

# chart coordinates (u, w) of the fixed vertices
A_UW = (-1.0, 4.0)
B_UW = (1.0, 4.0)
C_UW = (0.0, 0.0)
D_UW = (0.0, 4.0)
E_UW = (3.0 * math.sqrt(7.0) / 8.0, 1.0 / 8.0)


class GluedPoint(NamedTuple):
    face: int
    u: float
    w: float


def _in_triangle(u, w, tri, slack=FACE_SLACK):
    (x1, y1), (x2, y2), (x3, y3) = tri
    det = (y2 - y3) * (x1 - x3) + (x3 - x2) * (y1 - y3)
    l1 = ((y2 - y3) * (u - x3) + (x3 - x2) * (w - y3)) / det
    l2 = ((y3 - y1) * (u - x3) + (x1 - x3) * (w - y3)) / det
    l3 = 1.0 - l1 - l2
    return (l1 >= -slack) & (l2 >= -slack) & (l3 >= -slack)


def _leg(a, ws, s):
    return np.hypot(a, ws - s)


@dataclass(frozen=True)
class GluedSpace:
    """The glued complex. ``e`` overrides the chart position of vertex E."""

    e: tuple = E_UW

    kind = "glued-example"
    kappa = 0.0

    @property
    def face1(self):
        return (A_UW, B_UW, C_UW)

    @property
    def face2(self):
        return (C_UW, D_UW, tuple(self.e))

    @property
    def model_diameter(self):
        return math.inf

    @property
    def diameter_cap(self):
        verts = [self.point(1, *A_UW), self.point(1, *B_UW), self.point(2, *self.e)]
        return max(self.dist(p, q) for p in verts for q in verts)

    # -- points ---------------------------------------------------------------

    def point(self, face, u, w):
        """Validated, canonical point. Shared-edge points become face 2."""
        u, w = float(u), float(w)
        if face not in (1, 2):
            raise DomainError(f"unknown face {face!r}")
        tri = self.face1 if face == 1 else self.face2
        if not _in_triangle(u, w, tri):
            raise DomainError(f"({u}, {w}) lies outside face {face}")
        if face == 1 and u == 0.0:
            return GluedPoint(2, 0.0, w)
        return GluedPoint(face, u, w)

    def check_point(self, p):
        if not isinstance(p, GluedPoint):
            raise DomainError(f"glued point expected, got {type(p).__name__}")
        return self.point(*p)

    def vertex(self, name):
        uw = {"A": A_UW, "B": B_UW, "C": C_UW, "D": D_UW, "E": tuple(self.e)}[name]
        return self.point(1 if name in "AB" else 2, *uw)

    def to_ambient(self, p):
        """3-vector of a point in the ambient space."""
        if p.face == 1:
            return np.array([p.u, 0.0, p.w])
        return np.array([0.0, p.u, p.w])

    def from_ambient(self, v):
        x, y, z = (float(c) for c in v)
        if abs(y) <= FACE_SLACK and _in_triangle(x, z, self.face1):
            return self.point(1, x, z)
        if abs(x) <= FACE_SLACK:
            return self.point(2, y, z)
        raise DomainError(f"{v!r} is not on the complex")

    def contains(self, p, slack=FACE_SLACK):
        tri = self.face1 if p.face == 1 else self.face2
        return bool(_in_triangle(p.u, p.w, tri, slack))

    def coords(self, p):
        return (float(p.face), float(p.u), float(p.w))

    def sample(self, rng, n):
        """Uniform points on the complex, as arrays ``(face, u, w)``."""
        a1 = 0.5 * 2.0 * EDGE_LENGTH
        a2 = 0.5 * EDGE_LENGTH * self.e[0]
        face = np.where(rng.uniform(size=n) < a1 / (a1 + a2), 1, 2)
        r1 = np.sqrt(rng.uniform(size=n))
        r2 = rng.uniform(size=n)
        uv = np.empty((n, 2))
        for f, tri in ((1, self.face1), (2, self.face2)):
            m = face == f
            p1, p2, p3 = (np.asarray(v) for v in tri)
            a, b = r1[m, None], r2[m, None]
            uv[m] = (1 - a) * p1 + a * (1 - b) * p2 + a * b * p3
        face = np.where((face == 1) & (uv[:, 0] == 0.0), 2, face)
        return face, uv[:, 0], uv[:, 1]

    def sample_points(self, rng, n):
        face, u, w = self.sample(rng, n)
        return [GluedPoint(int(f), float(a), float(b)) for f, a, b in zip(face, u, w)]

    # -- metric ---------------------------------------------------------------

    def crossing(self, p, q):
        """Edge height where the shortest path from face-1 ``p`` to face-2 ``q`` crosses.

        Uses the unfolded chord when it meets the edge inside ``[0, 4]``,
        otherwise golden-section minimisation of the convex path length.
        """
        s = _chord_crossing(abs(p.u), p.w, abs(q.u), q.w)
        if 0.0 <= s <= EDGE_LENGTH:
            return s
        return _golden_crossing(abs(p.u), p.w, abs(q.u), q.w)

    def dist(self, p, q):
        if p.face == q.face:
            return math.hypot(p.u - q.u, p.w - q.w)
        if p.face == 2:
            p, q = q, p
        a, b = abs(p.u), abs(q.u)
        s = _chord_crossing(a, p.w, b, q.w)
        if 0.0 <= s <= EDGE_LENGTH:
            return math.hypot(a + b, q.w - p.w)
        s = _golden_crossing(a, p.w, b, q.w)
        return math.hypot(a, p.w - s) + math.hypot(b, q.w - s)

    def dist_by_minimisation(self, p, q):
        """Cross-face distance by golden section over the crossing height only."""
        if p.face == q.face:
            return self.dist(p, q)
        if p.face == 2:
            p, q = q, p
        a, b = abs(p.u), abs(q.u)
        s = _golden_crossing(a, p.w, b, q.w)
        return math.hypot(a, p.w - s) + math.hypot(b, q.w - s)

    def dist_arrays(self, f1, u1, w1, f2, u2, w2):
        """Vectorised ``dist`` over arrays of chart coordinates."""
        f1, u1, w1, f2, u2, w2 = np.broadcast_arrays(
            *(np.asarray(v, dtype=float) for v in (f1, u1, w1, f2, u2, w2))
        )
        shape = f1.shape
        f1, u1, w1, f2, u2, w2 = (v.ravel() for v in (f1, u1, w1, f2, u2, w2))
        out = np.hypot(u1 - u2, w1 - w2)
        cross = f1 != f2
        if not np.any(cross):
            return out.reshape(shape)
        swap = cross & (f1 == 2)
        a = np.abs(np.where(swap, u2, u1))[cross]
        wa = np.where(swap, w2, w1)[cross]
        b = np.abs(np.where(swap, u1, u2))[cross]
        wb = np.where(swap, w1, w2)[cross]
        s = _chord_crossing(a, wa, b, wb)
        ok = (s >= 0.0) & (s <= EDGE_LENGTH)
        res = np.hypot(a + b, wb - wa)
        if np.any(~ok):
            aa, wwa, bb, wwb = a[~ok], wa[~ok], b[~ok], wb[~ok]
            sg = _golden_crossing(aa, wwa, bb, wwb)
            res[~ok] = _leg(aa, wwa, sg) + _leg(bb, wwb, sg)
        out[cross] = res
        return out.reshape(shape)

    def combine(self, alpha, p, q):
        """Point of the shortest path at distance ``(1 - alpha) d(p, q)`` from ``p``."""
        if alpha == 1.0:
            return p
        if alpha == 0.0:
            return q
        frac = 1.0 - alpha
        if p.face == q.face:
            return self._canonical(p.face, p.u + frac * (q.u - p.u), p.w + frac * (q.w - p.w))
        first, second = (p, q) if p.face == 1 else (q, p)
        s = self.crossing(first, second)
        l1 = math.hypot(first.u, first.w - s)
        l2 = math.hypot(second.u, second.w - s)
        if p.face == 1:
            l_p, l_q = l1, l2
        else:
            l_p, l_q = l2, l1
        target = frac * (l_p + l_q)
        if target <= l_p:
            r = target / l_p if l_p > 0 else 0.0
            return self._canonical(p.face, p.u * (1 - r), p.w + r * (s - p.w))
        r = (target - l_p) / l_q if l_q > 0 else 1.0
        return self._canonical(q.face, q.u * r, s + r * (q.w - s))

    def _canonical(self, face, u, w):
        if face == 1 and u == 0.0:
            return GluedPoint(2, 0.0, w)
        if face == 2 and u == 0.0:
            return GluedPoint(2, 0.0, w)
        return GluedPoint(face, u, w)


def _chord_crossing(a, wa, b, wb):
    """Edge height of the straight chord between the unfolded points.

    Unfolding places the face-1 point at ``(-a, wa)`` and the face-2 point at
    ``(b, wb)``.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    total = a + b
    safe = np.where(total > 0, total, 1.0)
    s = np.where(total > 0, wa + (wb - wa) * a / safe, 0.5 * (wa + wb))
    return s if s.ndim else float(s)


def _golden_crossing(a, wa, b, wb):
    def length(s):
        return _leg(a, wa, s) + _leg(b, wb, s)

    shape = np.shape(a)
    lo = np.zeros(shape)
    hi = np.full(shape, EDGE_LENGTH)
    s = np.asarray(golden_section(length, lo, hi, tol=1e-12))
    # ties at the ends of the edge resolve to the end itself
    s = np.where(length(np.zeros(shape)) <= length(s), 0.0, s)
    s = np.where(length(np.full(shape, EDGE_LENGTH)) <= length(s), EDGE_LENGTH, s)
    return s if s.ndim else float(s)


def n_property_witness(space=None):
    """Projections onto ``[C, E]`` showing that the N-property fails.

    A and B both project to the same point while their midpoint D projects
    elsewhere, so the projection of ``[A, B]`` is not contained in the
    segment spanned by the projections of its endpoints.
    """
    # imported here: projections depends on this module
    from catvisc.projections import Segment, project_segment

    sp = GluedSpace() if space is None else space
    A, B, C, D, E = (sp.vertex(n) for n in "ABCDE")
    F = sp.combine(0.5, C, E)
    seg = Segment(C, E)
    pa = project_segment(sp, seg, A)
    pb = project_segment(sp, seg, B)
    pd = project_segment(sp, seg, D)
    mid = sp.combine(0.5, A, B)
    pm = project_segment(sp, seg, mid)

    # the image of [P(A), P(B)] under the arc parameter is [lo, hi]
    lo, hi = sorted((pa.parameter, pb.parameter))
    gap = max(lo - pm.parameter, pm.parameter - hi, 0.0) * sp.dist(C, E)
    checks = {
        "P(D) = F": sp.dist(pd.point, F) <= 1e-9,
        "P(A) = P(B)": sp.dist(pa.point, pb.point) <= 1e-9,
        "P(A) != F": sp.dist(pa.point, F) > 1e-9,
        "F not in [P(A), P(B)]": gap > 1e-9,
        "d(A, F) > d(A, C)": sp.dist(A, F) > sp.dist(A, C),
    }
    pts = {"A": A, "B": B, "C": C, "D": D, "E": E, "F": F}
    return {
        "points": {k: {"face": p.face, "chart": [p.u, p.w], "ambient": sp.to_ambient(p).tolist()}
                   for k, p in pts.items()},
        "projections": {
            name: {"point": sp.to_ambient(r.point).tolist(), "parameter": r.parameter,
                   "distance": r.distance}
            for name, r in (("P(A)", pa), ("P(B)", pb), ("P(D)", pd), ("P(midpoint AB)", pm))
        },
        "distances": {"d(A,C)": sp.dist(A, C), "d(A,F)": sp.dist(A, F)},
        "checks": checks,
        "gap": gap,
        "verdict": "VIOLATED" if gap > 1e-9 else "HOLDS",
    }
