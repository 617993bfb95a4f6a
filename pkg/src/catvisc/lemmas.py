"""Seeded randomized drivers for the spherical inequalities and identities.

Each driver samples admissible configurations in a cap of radius 0.7
about the north pole of the unit sphere (so all pairwise distances are
below 1.4 < pi/2), evaluates the inequality in vectorized form and
reports the signed margin ``RHS - LHS``. ``mutate=True`` flips one sign in
the inequality; a working suite must then report failures.
"""

import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from catvisc.glued import GluedSpace
from catvisc.model_spaces import Sphere, exp_map, sphere_combine, sphere_dist, tangent_at
from catvisc.quadrilateral import MIN_DENOMINATOR, h_limit_check, h_sphere_batch

CAP_RADIUS = 0.7
MIN_SEPARATION = 1e-6
MAX_REPORTED_FAILURES = 10
ADDITIVITY_PARTITIONS = (1, 2, 4, 8, 16)

TOLERANCES = {
    "chord-convexity": 1e-10,
    "geodesic-contraction": 1e-10,
    "four-point": 1e-10,
    "h-bound-sphere": 1e-9,
    "h-bound-glued": 1e-9,
    "h-decomposition": 1e-9,
    "h-additivity": 1e-8,
    "h-limit": 1e-4,
}


@dataclass
class SuiteReport:
    name: str
    trials: int
    seed: int
    tolerance: float
    worst_margin: float
    failures: list = field(default_factory=list)
    failure_count: int = 0
    elapsed: float = 0.0
    parts: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.worst_margin >= -self.tolerance

    def to_dict(self, timing=False):
        d = asdict(self)
        d["passed"] = self.passed
        if not timing:
            del d["elapsed"]
            for part in d["parts"].values():
                part.pop("elapsed", None)
        return d


def _cap():
    return Sphere(kappa=1.0, center=(0.0, 0.0, 1.0), radius=CAP_RADIUS)


def _sample_separated(rng, n, k):
    """``k`` cap points per trial, pairwise at least ``MIN_SEPARATION`` apart."""
    cap = _cap()
    pts = cap.sample(rng, k * n).reshape(k, n, 3)
    while True:
        bad = np.zeros(n, dtype=bool)
        for i in range(k):
            for j in range(i + 1, k):
                bad |= sphere_dist(pts[i], pts[j]) < MIN_SEPARATION
        if not bad.any():
            return pts
        m = int(bad.sum())
        pts[:, bad] = cap.sample(rng, k * m).reshape(k, m, 3)


def _report(name, trials, seed, margins, inputs, start, tolerance=None, parts=None):
    tol = TOLERANCES[name] if tolerance is None else tolerance
    margins = np.asarray(margins, dtype=float)
    bad = np.flatnonzero(~(margins >= -tol))
    failures = [
        (inputs(int(i)), float(margins[i])) for i in bad[:MAX_REPORTED_FAILURES]
    ]
    worst = float(np.min(margins)) if margins.size else 0.0
    if np.isnan(margins).any():
        worst = -math.inf
    return SuiteReport(
        name=name, trials=trials, seed=seed, tolerance=tol, worst_margin=worst,
        failures=failures, failure_count=int(bad.size),
        elapsed=time.perf_counter() - start, parts=parts or {},
    )


def _rows(*arrays):
    def get(i):
        return [a[i].tolist() if np.ndim(a) > 1 else float(a[i]) for a in arrays]
    return get


def check_chord_convexity(trials=100_000, seed=0, mutate=False):
    """``sin^2(d13/2) <= (d23/d24) sin^2(d14/2) + (d34/d24) sin^2(d12/2)`` for x3 on [x2, x4]."""
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    x1, x2, x4 = _sample_separated(rng, trials, 3)
    alpha = rng.uniform(0.0, 1.0, trials)
    x3 = sphere_combine(alpha, x2, x4)
    d12, d13, d14 = sphere_dist(x1, x2), sphere_dist(x1, x3), sphere_dist(x1, x4)
    d23, d34, d24 = sphere_dist(x2, x3), sphere_dist(x3, x4), sphere_dist(x2, x4)
    sgn = -1.0 if mutate else 1.0
    rhs = d23 / d24 * np.sin(d14 / 2) ** 2 + sgn * d34 / d24 * np.sin(d12 / 2) ** 2
    margins = rhs - np.sin(d13 / 2) ** 2
    return _report("chord-convexity", trials, seed, margins, _rows(x1, x2, x4, alpha), start)


def check_geodesic_contraction(trials=100_000, seed=0, mutate=False):
    """``rho(D, E) <= sin((1 - t) M) / sin(M) * rho(A, B)`` with ``M`` the longest side."""
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    A, B, C = _sample_separated(rng, trials, 3)
    t = rng.uniform(0.0, 1.0, trials)
    D = sphere_combine(t, C, A)  # rho(D, C) = (1 - t) rho(A, C)
    E = sphere_combine(t, C, B)
    ab, bc, ca = sphere_dist(A, B), sphere_dist(B, C), sphere_dist(C, A)
    M = np.maximum(ab, np.maximum(bc, ca))
    sgn = -1.0 if mutate else 1.0
    margins = np.sin(sgn * (1.0 - t) * M) / np.sin(M) * ab - sphere_dist(D, E)
    return _report("geodesic-contraction", trials, seed, margins, _rows(A, B, C, t), start)


def check_four_point(trials=100_000, seed=0, mutate=False):
    """Four-point bound for ``x3`` on ``[x2, x4]`` with ``rho(x3, x4) = t rho(x2, x4)``.

    ``sin^2(d13/2) <= s((1-t)M) sin^2(d14/2) + s(tM) max(cos d24 - cos d12, 0)/2 + sin^2(tM/2)``
    where ``s(a) = sin(a) / sin(M)`` and ``M`` is the largest pairwise distance.
    """
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    x1, x2, x4 = _sample_separated(rng, trials, 3)
    t = rng.uniform(0.0, 1.0, trials)
    x3 = sphere_combine(1.0 - t, x4, x2)
    pts = (x1, x2, x3, x4)
    M = np.zeros(trials)
    for i in range(4):
        for j in range(i + 1, 4):
            M = np.maximum(M, sphere_dist(pts[i], pts[j]))
    d12, d13, d14, d24 = (sphere_dist(x1, x2), sphere_dist(x1, x3),
                          sphere_dist(x1, x4), sphere_dist(x2, x4))
    sgn = -1.0 if mutate else 1.0
    sM = np.sin(M)
    rhs = (
        np.sin((1.0 - t) * M) / sM * np.sin(d14 / 2) ** 2
        + np.sin(t * M) / sM * np.maximum(np.cos(d24) - np.cos(d12), 0.0) / 2
        + sgn * np.sin(t * M / 2) ** 2
    )
    margins = rhs - np.sin(d13 / 2) ** 2
    return _report("four-point", trials, seed, margins, _rows(x1, x2, x4, t), start)


# -- h suite -------------------------------------------------------------------

def _h_sphere(A, B, C, D, mutate):
    if not mutate:
        return h_sphere_batch(A, B, C, D)
    # cos(BD) with the wrong sign
    ac, bd, ad, bc = sphere_dist(A, C), sphere_dist(B, D), sphere_dist(A, D), sphere_dist(B, C)
    ab, cd = sphere_dist(A, B), sphere_dist(C, D)
    return (np.cos(ac) - np.cos(bd) - np.cos(ad) - np.cos(bc)) / (ab * cd), ab * cd


def _h_bound_sphere(trials, rng, mutate):
    start = time.perf_counter()
    A, B, C, D = _sample_separated(rng, trials, 4)
    hv, den = _h_sphere(A, B, C, D, mutate)
    keep = den >= MIN_DENOMINATOR
    margins = np.where(keep, 1.0 - np.abs(hv), np.inf)
    return _report("h-bound-sphere", trials, None, margins, _rows(A, B, C, D), start)


def _h_bound_glued(trials, rng, mutate):
    start = time.perf_counter()
    g = GluedSpace()
    pts = [g.sample(rng, trials) for _ in range(4)]
    names = "ABCD"
    d = {}
    for i in range(4):
        for j in range(i + 1, 4):
            d[names[i] + names[j]] = g.dist_arrays(*pts[i], *pts[j])
    largest = np.max(np.stack(list(d.values())), axis=0)
    scale = 1.0 / largest
    s = {k: v * scale for k, v in d.items()}
    bd_sign = -1.0 if mutate else 1.0
    num = np.cos(s["AC"]) + bd_sign * np.cos(s["BD"]) - np.cos(s["AD"]) - np.cos(s["BC"])
    den = s["AB"] * s["CD"]
    keep = den >= MIN_DENOMINATOR
    hv = num / np.where(keep, den, 1.0)
    margins = np.where(keep, 1.0 - np.abs(hv), np.inf)
    stacked = [np.stack(p, axis=-1) for p in pts]
    rep = _report("h-bound-glued", trials, None, margins, _rows(*stacked), start)
    rep.parts = {"scale_min": float(scale.min()), "scale_max": float(scale.max()),
                 "rejected": int((~keep).sum())}
    return rep


def _h_decomposition(trials, rng, mutate):
    start = time.perf_counter()
    A, B, C, D = _sample_separated(rng, trials, 4)
    alpha = rng.uniform(0.05, 0.95, trials)
    X = sphere_combine(alpha, A, B)
    ab, ax, xb = sphere_dist(A, B), sphere_dist(A, X), sphere_dist(X, B)
    whole, _ = _h_sphere(A, B, C, D, False)
    left, _ = _h_sphere(A, X, C, D, False)
    right, _ = _h_sphere(X, B, C, D, False)
    sgn = -1.0 if mutate else 1.0
    margins = -np.abs(whole - (ax / ab * left + sgn * xb / ab * right))
    return _report("h-decomposition", trials, None, margins, _rows(A, B, C, D, alpha), start)


def _h_additivity(trials, rng, mutate):
    start = time.perf_counter()
    A, B, C, D = _sample_separated(rng, trials, 4)
    whole, _ = _h_sphere(A, B, C, D, False)
    worst = np.full(trials, np.inf)
    for n in ADDITIVITY_PARTITIONS:
        As = [sphere_combine(1.0 - i / n, A, B) for i in range(n + 1)]
        for m in ADDITIVITY_PARTITIONS:
            Cs = [sphere_combine(1.0 - j / m, C, D) for j in range(m + 1)]
            total = np.zeros(trials)
            for i in range(1, n + 1):
                for j in range(1, m + 1):
                    total += _h_sphere(As[i - 1], As[i], Cs[j - 1], Cs[j], False)[0]
            mean = total / (n * m)
            gap = whole + mean if mutate else whole - mean
            worst = np.minimum(worst, -np.abs(gap))
    return _report("h-additivity", trials, None, worst, _rows(A, B, C, D), start)


LIMIT_DISTANCES = (0.3, 0.6, 0.9, 1.2)
LIMIT_ANGLES = (
    (math.pi / 2, math.pi / 2),  # both directions perpendicular to PQ
    (math.pi / 2, 0.0),  # one perpendicular, one along PQ
    (0.0, 0.0),  # both along PQ
    (0.7, 1.1),
    (1.3, 0.4),
)
LIMIT_ARM = 0.3


def limit_configurations():
    """Twenty fixed ``(P, X, Q, Y)`` spanning the three special direction cases."""
    north = np.array([0.0, 0.0, 1.0])
    e1 = np.array([1.0, 0.0, 0.0])
    out = []
    for d in LIMIT_DISTANCES:
        P = exp_map(north, e1, -d / 2)
        Q = exp_map(north, e1, d / 2)
        n = np.cross(P, Q)
        n /= np.linalg.norm(n)
        tP, tQ = tangent_at(P, Q), tangent_at(Q, P)
        for xi_x, xi_y in LIMIT_ANGLES:
            X = exp_map(P, math.cos(xi_x) * tP + math.sin(xi_x) * n, LIMIT_ARM)
            Y = exp_map(Q, -math.cos(xi_y) * tQ + math.sin(xi_y) * n, LIMIT_ARM)
            out.append((P, X, Q, Y))
    return out


def limit_steps():
    return [1e-2 / 2**k for k in range(10)] + [1e-5]


def limit_errors(P, X, Q, Y):
    errs = []
    for x in limit_steps():
        hv, formula = h_limit_check(P, X, Q, Y, x, x)
        errs.append(abs(hv - formula))
    return errs


def limit_monotone(errs, slack=0.10):
    return all(b <= (1.0 + slack) * a for a, b in zip(errs, errs[1:]))


def _h_limit(mutate):
    start = time.perf_counter()
    configs = limit_configurations()
    margins, detail = [], []
    for P, X, Q, Y in configs:
        errs = limit_errors(P, X, Q, Y)
        if mutate:
            errs = errs[::-1]
        ok = limit_monotone(errs)
        # a non-monotone sequence fails regardless of its final size
        margins.append(-errs[-1] if ok else -math.inf)
        detail.append({"errors": errs, "monotone": ok})
    return _report("h-limit", len(configs), None, margins, lambda i: detail[i], start)


def check_h_suite(trials=100_000, seed=0, mutate=False, decomposition_trials=10_000,
                  additivity_trials=200):
    """Bound, decomposition, additivity and limit checks of ``h``.

    Each part keeps its own tolerance; the aggregate margin is each part's
    margin divided by its tolerance, so the suite passes iff every part
    does (aggregate tolerance 1).
    """
    start = time.perf_counter()
    ss = np.random.SeedSequence(seed)
    rngs = [np.random.default_rng(s) for s in ss.spawn(4)]
    parts = [
        _h_bound_sphere(trials, rngs[0], mutate),
        _h_bound_glued(trials, rngs[1], mutate),
        _h_decomposition(min(trials, decomposition_trials), rngs[2], mutate),
        _h_additivity(min(trials, additivity_trials), rngs[3], mutate),
        _h_limit(mutate),
    ]
    normalized = []
    failures = []
    count = 0
    for p in parts:
        normalized.append(p.worst_margin / p.tolerance)
        failures.extend((p.name, f) for f in p.failures)
        count += p.failure_count
    return SuiteReport(
        name="h", trials=trials, seed=seed, tolerance=1.0,
        worst_margin=float(min(normalized)),
        failures=failures[:MAX_REPORTED_FAILURES], failure_count=count,
        elapsed=time.perf_counter() - start,
        parts={p.name: _part_dict(p) for p in parts},
    )


def _part_dict(p):
    return {
        "trials": p.trials, "tolerance": p.tolerance, "worst_margin": p.worst_margin,
        "failure_count": p.failure_count, "passed": p.passed, "elapsed": p.elapsed,
        **p.parts,
    }


SUITES = {
    "chord-convexity": check_chord_convexity,
    "geodesic-contraction": check_geodesic_contraction,
    "four-point": check_four_point,
    "h": check_h_suite,
}


def run_suites(names, trials, seed, mutate=False):
    if names == "all":
        names = list(SUITES)
    elif isinstance(names, str):
        names = [names]
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise KeyError(f"unknown suite(s): {', '.join(unknown)}")
    return [SUITES[n](trials=trials, seed=seed, mutate=mutate) for n in names]
