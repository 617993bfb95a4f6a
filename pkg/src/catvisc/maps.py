"""Built-in nonexpansive maps and contractions with known fixed-point sets."""

import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from catvisc.errors import DomainError
from catvisc.glued import GluedSpace
from catvisc.model_spaces import Plane, Sphere, norm, rotate
from catvisc.projections import (
    Segment,
    SegmentSet,
    Singleton,
    WholeSpace,
    glued_project_arrays,
    plane_project,
    project_segment,
)

def _unit_diameter(space):
    """Diameter of the admissible region measured on the unit sphere."""
    return space.diameter_cap * math.sqrt(space.kappa)


@dataclass(frozen=True, eq=False)
class Identity:
    space: Any
    kind = "identity"

    def __call__(self, x):
        return x

    def many(self, xs):
        return xs

    def fix_set(self):
        return WholeSpace(self.space)

    def lipschitz_bound(self):
        return 1.0


@dataclass(frozen=True, eq=False)
class Rotation:
    """Rotation of a (scaled) sphere about ``axis`` by ``angle`` radians."""

    space: Any
    axis: Any
    angle: float
    kind = "rotation"

    def __post_init__(self):
        if not isinstance(self.space, Sphere):
            raise DomainError("rotations act on spheres only")
        axis = np.asarray(self.axis, dtype=float)
        if abs(float(norm(axis)) - 1.0) > 1e-12:
            raise DomainError("rotation axis must be a unit vector")
        object.__setattr__(self, "axis", axis)

    def __call__(self, x):
        return rotate(x, self.axis, self.angle)

    def many(self, xs):
        return rotate(xs, self.axis, self.angle)

    def fix_set(self):
        if math.remainder(self.angle, 2 * math.pi) == 0.0:
            return WholeSpace(self.space)
        for pole in (self.axis, -self.axis):
            if self.space.contains(pole):
                return Singleton(self.space, pole)
        raise DomainError("neither rotation pole lies in the admissible cap")

    def lipschitz_bound(self):
        return 1.0


@dataclass(frozen=True, eq=False)
class SegmentProjection:
    """Nearest-point map onto a geodesic segment.

    Offered on the plane and the glued complex only. On a sphere the map
    stretches distances parallel to the segment by ``1 / cos(r)`` at
    distance ``r`` from it, so it is never nonexpansive.
    """

    space: Any
    segment: Segment
    kind = "segment-projection"

    def __post_init__(self):
        sp = self.space
        if isinstance(sp, Sphere):
            raise DomainError("projection onto a geodesic is not nonexpansive on a sphere")
        if not isinstance(sp, (Plane, GluedSpace)):
            raise DomainError(f"segment projection unsupported on {sp!r}")

    def __call__(self, x):
        return project_segment(self.space, self.segment, x).point

    def many(self, xs):
        sp, seg = self.space, self.segment
        if isinstance(sp, Plane):
            return plane_project(seg.a, seg.b, xs)[0]
        arr = np.array([sp.coords(x) for x in xs]).reshape(-1, 3)
        lam = glued_project_arrays(sp, seg, arr[:, 0], arr[:, 1], arr[:, 2])
        out = []
        for x, l in zip(xs, lam):
            if np.isnan(l):
                out.append(self(x))
            else:
                out.append(sp.combine(1.0 - float(l), seg.a, seg.b))
        return out

    def fix_set(self):
        return SegmentSet(self.space, self.segment)

    def lipschitz_bound(self):
        return 1.0


@dataclass(frozen=True, eq=False)
class Homothety:
    """Pulls every point towards ``anchor``: ``rho(c, f(x)) = k rho(c, x)``."""

    space: Any
    anchor: Any
    k: float
    kind = "homothety"

    def __post_init__(self):
        if not 0.0 < self.k < 1.0:
            raise DomainError(f"homothety ratio must lie in (0, 1), got {self.k}")
        if not self.space.contains(self.anchor):
            raise DomainError("homothety anchor outside the admissible region")

    def __call__(self, x):
        return self.space.combine(1.0 - self.k, self.anchor, x)

    def many(self, xs):
        if isinstance(self.space, GluedSpace):
            return [self(x) for x in xs]
        return self.space.combine(1.0 - self.k, self.anchor, xs)

    def fix_set(self):
        return Singleton(self.space, self.anchor)

    def lipschitz_bound(self, M=None):
        """Actual contraction constant on the admissible region.

        Exactly ``k`` in flat spaces. On spheres it is bounded by
        ``sin(k M) / sin(M)`` with ``M`` the unit-sphere diameter of the
        region.
        """
        if isinstance(self.space, Sphere):
            M = _unit_diameter(self.space) if M is None else M
            return math.sin(self.k * M) / math.sin(M)
        return self.k


@dataclass(frozen=True, eq=False)
class Constant:
    """The constant map ``x -> value``; a 0-contraction."""

    space: Any
    value: Any
    kind = "constant"

    def __call__(self, x):
        return self.value

    def many(self, xs):
        if isinstance(self.space, GluedSpace):
            return [self.value for _ in xs]
        return np.broadcast_to(self.value, np.shape(xs)).copy()

    def fix_set(self):
        return Singleton(self.space, self.value)

    def lipschitz_bound(self, M=None):
        return 0.0


def apply(mapping, x):
    """Apply ``mapping`` after checking that ``x`` is admissible."""
    if not mapping.space.contains(x):
        raise DomainError("point outside the map's admissible region")
    return mapping(x)


def fix_set(mapping):
    return mapping.fix_set()


def empirical_lipschitz(mapping, trials, seed=0):
    """Largest observed ``rho(f x, f y) / rho(x, y)`` over random pairs."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    rng = np.random.default_rng(seed)
    space = mapping.space
    if isinstance(space, GluedSpace):
        xs = space.sample_points(rng, trials)
        ys = space.sample_points(rng, trials)
        fx = np.array([space.coords(p) for p in mapping.many(xs)])
        fy = np.array([space.coords(p) for p in mapping.many(ys)])
        cx = np.array([space.coords(p) for p in xs])
        cy = np.array([space.coords(p) for p in ys])
        num = space.dist_arrays(*fx.T, *fy.T)
        den = space.dist_arrays(*cx.T, *cy.T)
    else:
        xs = space.sample(rng, trials)
        ys = space.sample(rng, trials)
        num = np.asarray(space.dist(mapping.many(xs), mapping.many(ys)))
        den = np.asarray(space.dist(xs, ys))
    keep = den > 1e-9
    if not np.any(keep):
        return 0.0
    return float(np.max(num[keep] / den[keep]))


def theorem_k_bound(M):
    """Largest admissible contraction constant for diameter parameter ``M``.

    ``2 sin^2(M/2) cos(M) / M^2``, decreasing on ``(0, pi/2)`` from 1/2 to 0.
    """
    if not 0.0 < M < math.pi / 2:
        raise DomainError(f"M must lie in (0, pi/2), got {M}")
    return 2.0 * math.sin(M / 2) ** 2 * math.cos(M) / M**2
