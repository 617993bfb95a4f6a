"""Two-step viscosity iteration and the supporting scalar machinery.

One step, for weights ``t_n`` and ``b_n``::

    y_n     = t_n f(x_n) + (1 - t_n) T(x_n)
    x_{n+1} = b_n x_n    + (1 - b_n) y_n

where ``a x + (1 - a) y`` is the point of ``[x, y]`` at distance
``(1 - a) rho(x, y)`` from ``x``. The limit ``q`` is the fixed point of
``p -> P_Fix(f(p))`` on ``Fix T``; :func:`solve_q_oracle` computes it
independently of the iteration.
"""

import csv
import io
import math
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

from catvisc.errors import ConfigError, DivergenceError, InvariantError
from catvisc.glued import GluedPoint, GluedSpace
from catvisc.maps import Constant, theorem_k_bound
from catvisc.model_spaces import Sphere
from catvisc.projections import project_fixset

CONTAINMENT_SLACK = 1e-12
EQ_TAIL_SLACK = 1e-3


# -- scalar sequences ----------------------------------------------------------

@dataclass(frozen=True)
class Harmonic:
    """``c / (n + 1) ** p`` for ``n = 1, 2, ...``."""

    c: float = 1.0
    p: float = 1.0
    kind = "harmonic"

    def values(self, N):
        n = np.arange(1, N + 1, dtype=float)
        return self.c / (n + 1.0) ** self.p


@dataclass(frozen=True)
class ConstantSeq:
    value: float
    kind = "constant"

    def values(self, N):
        return np.full(N, float(self.value))


@dataclass(frozen=True)
class Table:
    """Explicit finite prefix; only checkable on the entries given."""

    entries: tuple
    kind = "table"

    def values(self, N):
        if len(self.entries) < N:
            raise ConfigError(f"table has {len(self.entries)} entries, {N} needed", "table-length")
        return np.asarray(self.entries[:N], dtype=float)


UNVERIFIABLE = "unverifiable-in-the-limit"


@dataclass(frozen=True)
class SequencePair:
    t: Any
    b: Any

    def conditions(self, N=1000):
        """Status of the four weight conditions: ``ok``, ``violated`` or unverifiable."""
        out = {}
        t, b = self.t, self.b
        tv, bv = t.values(N), b.values(N)
        prefix_ok = bool(np.all((tv > 0) & (tv < 1)) and np.all((bv > 0) & (bv < 1)))
        if t.kind == "harmonic" and b.kind == "constant":
            # harmonic terms decrease, so n = 1 is the largest
            first = t.c / 2.0**t.p
            out["(i)"] = "ok" if t.c > 0 and first < 1 and 0 < b.value < 1 else "violated"
        else:
            out["(i)"] = "ok" if prefix_ok else "violated"
            if prefix_ok and (t.kind == "table" or b.kind == "table"):
                out["(i)"] = UNVERIFIABLE
        if b.kind == "constant":
            out["(ii)"] = "ok" if 0 < b.value < 1 else "violated"
        elif b.kind == "harmonic":
            out["(ii)"] = "violated"
        else:
            out["(ii)"] = UNVERIFIABLE
        if t.kind == "harmonic":
            out["(iii)"] = "ok" if t.p > 0 else "violated"
            out["(iv)"] = "ok" if 0 < t.p <= 1 and t.c > 0 else "violated"
        elif t.kind == "constant":
            out["(iii)"] = "ok" if t.value == 0 else "violated"
            out["(iv)"] = "ok" if t.value > 0 else "violated"
        else:
            out["(iii)"] = out["(iv)"] = UNVERIFIABLE
        return out


# -- configuration ---------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class IterationConfig:
    space: Any
    T: Any
    f: Any
    u: Any
    sequences: SequencePair
    max_iter: int = 1000
    report_every: int = 1
    M: float = None
    seed: int = 0


def _unit_scale(space):
    return math.sqrt(space.kappa) if space.kappa > 0 else 1.0


def effective_M(cfg):
    """Diameter parameter on the unit-sphere scale: config value capped by the region."""
    sp = cfg.space
    cap = sp.diameter_cap * _unit_scale(sp)
    return cap if cfg.M is None else min(cfg.M, cap)


def contraction_constant(f, M=None):
    if isinstance(f.space, Sphere):
        return f.lipschitz_bound(M)
    return f.lipschitz_bound()


def _fix_samples(fs, n=1000, seed=0):
    sp = fs.space
    if fs.kind == "singleton":
        return [fs.point]
    if fs.kind == "segment":
        a, b = fs.segment.a, fs.segment.b
        return [sp.combine(1.0 - lam, a, b) for lam in np.linspace(0.0, 1.0, n)]
    rng = np.random.default_rng(seed)
    if isinstance(sp, GluedSpace):
        return sp.sample_points(rng, n)
    return list(sp.sample(rng, n))


def validate_config(cfg, q=None, explore=False):
    """Check every hypothesis of the convergence theorem; raise on violation.

    Returns a report dict naming each hypothesis and its status.
    """
    sp = cfg.space
    report = {}
    if isinstance(sp, GluedSpace) and not explore:
        raise ConfigError(
            "the glued example fails the N-property; enable exploration (--explore-no-N) to run it",
            "n-property",
        )
    if cfg.max_iter < 1 or cfg.report_every < 1:
        raise ConfigError("max_iter and report_every must be positive", "counts")

    conds = cfg.sequences.conditions(min(cfg.max_iter, 1000))
    for name, status in conds.items():
        report[f"sequence-condition-{name}"] = status
        if status == "violated":
            raise ConfigError(f"weight sequences violate condition {name}", f"sequence-condition-{name}")

    if not sp.contains(cfg.u):
        raise ConfigError("start point outside the admissible region", "start-admissible")

    if sp.kappa > 0:
        M = effective_M(cfg)
        if not 0 < M < math.pi / 2:
            raise ConfigError(f"M = {M} must lie in (0, pi/2)", "diameter-bound")
        k_eff = contraction_constant(cfg.f, M)
        bound = theorem_k_bound(M)
        report["M"] = M
        report["k-bound"] = {"k_effective": k_eff, "bound": bound}
        if not k_eff < bound:
            raise ConfigError(
                f"k-bound violated: effective contraction {k_eff:.6g} >= {bound:.6g}", "k-bound"
            )
        ball = M / (4.0 * math.sqrt(sp.kappa))
    else:
        M = None
        k_eff = contraction_constant(cfg.f)
        report["k-bound"] = {"k_effective": k_eff, "bound": 0.5}
        if not k_eff < 0.5:
            raise ConfigError(f"k-bound violated: contraction {k_eff:.6g} >= 1/2", "k-bound")
        ball = None

    fs = cfg.T.fix_set()
    if q is None:
        q = solve_q_oracle(fs, cfg.f)
    samples = _fix_samples(fs, seed=cfg.seed)
    displacement = max(sp.dist(p, cfg.f(p)) for p in samples)
    report["fixed-point-displacement"] = {
        "max": displacement,
        "limit": ball,
        "samples": len(samples),
    }
    start = sp.dist(cfg.u, q)
    report["start-distance"] = {"value": start, "limit": ball}
    if ball is not None:
        if displacement > ball + CONTAINMENT_SLACK:
            raise ConfigError(
                f"fixed-point-displacement violated: rho(p, f(p)) = {displacement:.6g} > {ball:.6g}",
                "fixed-point-displacement",
            )
        if start > ball + CONTAINMENT_SLACK:
            raise ConfigError(
                f"start-distance violated: rho(u, q) = {start:.6g} > {ball:.6g}", "start-distance"
            )
        radius = ball / (1.0 - k_eff)
    else:
        # flat case: smallest M for which both ball hypotheses hold
        M_flat = 4.0 * max(start, sp.dist(q, cfg.f(q)))
        radius = M_flat / (4.0 * (1.0 - k_eff))
    report["containment-radius"] = radius
    report["q-residual"] = eq_limit_residual(fs, cfg.f, q)
    return report, q, radius


# -- fixed-point oracle ---------------------------------------------------------

def solve_q_oracle(fs, f, tol=1e-12, max_steps=100_000):
    """Fixed point of ``p -> P_Fix(f(p))`` by Picard iteration from three starts."""
    sp = fs.space
    if fs.kind == "singleton":
        return fs.point
    if fs.kind == "segment":
        a, b = fs.segment.a, fs.segment.b
        starts = [a, b, sp.combine(0.5, a, b)]
    else:
        starts = _fix_samples(fs, 3)

    limits = [_picard(fs, f, p, tol, max_steps) for p in starts]
    for other in limits[1:]:
        if sp.dist(limits[0], other) > 10 * tol + 1e-12:
            raise DivergenceError("oracle limit depends on the start point")
    return limits[0]


def _picard(fs, f, p, tol, max_steps):
    sp = fs.space
    steps = []
    for m in range(max_steps):
        nxt = project_fixset(fs, f(p))
        step = sp.dist(nxt, p)
        p = nxt
        if step < tol:
            return p
        steps.append(step)
        if m >= 100 and steps[-1] >= steps[-101]:
            raise DivergenceError("no contraction over 100 oracle steps")
    raise DivergenceError(f"oracle did not reach tol {tol} in {max_steps} steps")


def eq_limit_residual(fs, f, q):
    """``rho(q, P_Fix(f(q)))``; zero at the exact limit."""
    return fs.space.dist(q, project_fixset(fs, f(q)))


# -- trace -----------------------------------------------------------------------

@dataclass(eq=False)
class Trace:
    """Per-step record of a run. Row ``i`` holds iteration ``n = i + 1``."""

    space: Any
    q: Any
    t: np.ndarray
    b: np.ndarray
    xs: np.ndarray  # coordinates of x_n
    ys: np.ndarray  # coordinates of y_n
    r_fix: np.ndarray
    r_xy: np.ndarray
    d_q: np.ndarray
    eq_gap: np.ndarray  # rho(f(q), q) - rho(f(q), T x_n)
    report_every: int = 1
    hypotheses: dict = field(default_factory=dict)
    mode: str = "viscosity"

    @property
    def N(self):
        return len(self.t)

    def recorded(self):
        idx = list(range(0, self.N, self.report_every))
        if idx[-1] != self.N - 1:
            idx.append(self.N - 1)
        return idx

    def csv_text(self):
        dim = self.xs.shape[1]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "t_n", "b_n"] + [f"x_{i}" for i in range(dim)] + ["r_fix", "r_xy", "d_q"])
        for i in self.recorded():
            row = [i + 1, self.t[i], self.b[i], *self.xs[i], self.r_fix[i], self.r_xy[i], self.d_q[i]]
            w.writerow([v if isinstance(v, int) else repr(float(v)) for v in row])
        return buf.getvalue()

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            fh.write(self.csv_text())


def _pair_dists(space, P, Q):
    if isinstance(space, GluedSpace):
        return space.dist_arrays(P[:, 0], P[:, 1], P[:, 2], Q[:, 0], Q[:, 1], Q[:, 2])
    return np.asarray(space.dist(P, Q))


def _as_point(space, row):
    if isinstance(space, GluedSpace):
        return GluedPoint(int(row[0]), float(row[1]), float(row[2]))
    return np.array(row)


# -- iteration -------------------------------------------------------------------

def run_viscosity(cfg, explore=False, q=None):
    """Run the two-step iteration for ``cfg.max_iter`` steps and return the trace."""
    report, q, radius = validate_config(cfg, q=q, explore=explore)
    sp, T, f = cfg.space, cfg.T, cfg.f
    N = cfg.max_iter
    tv = cfg.sequences.t.values(N)
    bv = cfg.sequences.b.values(N)
    fq = f(q)
    d_fq_q = sp.dist(fq, q)
    limit = radius * (1.0 + 1e-9) + CONTAINMENT_SLACK

    dim = 3 if isinstance(sp, GluedSpace) else sp.dim
    xs = np.empty((N, dim))
    ys = np.empty((N, dim))
    r_fix = np.empty(N)
    r_xy = np.empty(N)
    d_q = np.empty(N)
    gap = np.empty(N)
    dist, comb, coords = sp.dist, sp.combine, sp.coords

    x = cfg.u
    for i in range(N):
        tn, bn = float(tv[i]), float(bv[i])
        fx = f(x)
        Tx = T(x)
        y = comb(tn, fx, Tx)
        dxq = dist(x, q)
        dyq = dist(y, q)
        if dxq > limit or dyq > limit:
            raise InvariantError(
                f"iterate left the ball of radius {radius:.6g} about q at n = {i + 1}", step=i + 1
            )
        if not (sp.contains(x) and sp.contains(y)):
            raise InvariantError(f"iterate left the admissible region at n = {i + 1}", step=i + 1)
        xs[i] = coords(x)
        ys[i] = coords(y)
        r_fix[i] = dist(x, Tx)
        r_xy[i] = dist(x, y)
        d_q[i] = dxq
        gap[i] = d_fq_q - dist(fq, Tx)
        x = comb(bn, x, y)

    return Trace(
        space=sp, q=q, t=tv, b=bv, xs=xs, ys=ys, r_fix=r_fix, r_xy=r_xy, d_q=d_q,
        eq_gap=gap, report_every=cfg.report_every, hypotheses=report,
    )


def halpern_config(cfg):
    """Same configuration with ``f`` replaced by the constant map onto ``u``."""
    return replace(cfg, f=Constant(cfg.space, cfg.u))


def run_halpern(cfg, explore=False):
    trace = run_viscosity(halpern_config(cfg), explore=explore)
    trace.mode = "halpern"
    return trace


# -- diagnostics -------------------------------------------------------------------

def dyadic_block_maxima(values, start=1):
    """Maxima of ``values[n - 1]`` over blocks ``[2^j, 2^(j+1))`` with ``2^j >= start``."""
    N = len(values)
    out = []
    j = max(0, math.ceil(math.log2(max(start, 1))))
    while 2**j <= N:
        lo, hi = 2**j, min(2 ** (j + 1), N + 1)
        out.append((lo, float(np.max(values[lo - 1 : hi - 1]))))
        j += 1
    return out


def suzuki_check(trace, tail=0.1):
    """Tail maxima of the step-one quantities of the convergence proof."""
    N = trace.N
    start = max(0, int(N * (1.0 - tail)) - 1)
    sp = trace.space
    dy = _pair_dists(sp, trace.ys[start + 1 :], trace.ys[start:-1])
    dx = _pair_dists(sp, trace.xs[start + 1 :], trace.xs[start:-1])
    return {
        "tail_start": start + 1,
        "max_r_xy": float(np.max(trace.r_xy[start:])),
        "max_step_gap": float(np.max(dy - dx)) if len(dy) else 0.0,
        "max_r_fix": float(np.max(trace.r_fix[start:])),
    }


def trace_summary(trace):
    """JSON-ready summary of a finished run."""
    N = trace.N
    blocks = dyadic_block_maxima(trace.d_q, start=max(1, N // 10))
    maxima = [m for _, m in blocks]
    tail = suzuki_check(trace)
    start = max(0, int(0.9 * N))
    tail["max_eq_gap"] = float(np.max(trace.eq_gap[start:]))
    tail["eq_gap_ok"] = tail["max_eq_gap"] <= EQ_TAIL_SLACK
    tail["envelope"] = [[lo, m] for lo, m in blocks]
    tail["envelope_nonincreasing"] = all(b <= a for a, b in zip(maxima, maxima[1:]))
    sp = trace.space
    return {
        "mode": trace.mode,
        "space": sp.kind,
        "kappa": sp.kappa,
        "iterations": N,
        "q": list(sp.coords(trace.q)),
        "final": {
            "x": [float(v) for v in trace.xs[-1]],
            "d_q": float(trace.d_q[-1]),
            "r_fix": float(trace.r_fix[-1]),
            "r_xy": float(trace.r_xy[-1]),
        },
        "tail": tail,
        "hypotheses": _jsonable(trace.hypotheses),
    }


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


# -- Xu's recursion ----------------------------------------------------------------

@dataclass
class XuResult:
    s_final: float
    s: np.ndarray  # s_1 .. s_N
    envelope: list  # dyadic block maxima (block start, max)
    tail_running_max: np.ndarray  # sup_{m >= n} s_m for n = N/2 .. N
    clamped: bool


def validate_xu(alpha, beta, gamma):
    """Reject sequence families that break the hypotheses of Xu's lemma."""
    if alpha.kind == "harmonic":
        if not (alpha.c > 0 and 0 < alpha.p <= 1 and alpha.c / 2.0**alpha.p <= 1):
            raise ConfigError("alpha must lie in [0, 1] with divergent sum", "xu-(i)")
    elif alpha.kind == "constant":
        if not 0 < alpha.value <= 1:
            raise ConfigError("alpha must lie in (0, 1] for a divergent sum", "xu-(i)")
    if beta.kind == "constant" and beta.value > 0:
        raise ConfigError("limsup beta must be <= 0", "xu-(ii)")
    if beta.kind == "harmonic" and beta.p <= 0:
        raise ConfigError("limsup beta must be <= 0", "xu-(ii)")
    if gamma.kind == "harmonic":
        if not (gamma.c >= 0 and gamma.p > 1):
            raise ConfigError("gamma must be nonnegative and summable", "xu-(iii)")
    elif gamma.kind == "constant":
        if gamma.value != 0:
            raise ConfigError("gamma must be nonnegative and summable", "xu-(iii)")


def xu_simulate(s1, alpha, beta, gamma, N):
    """Iterate ``s_{n+1} = (1 - a_n) s_n + a_n b_n + g_n`` up to ``s_N``."""
    validate_xu(alpha, beta, gamma)
    if s1 < 0:
        raise ValueError("s_1 must be nonnegative")
    a = alpha.values(N)
    bb = beta.values(N)
    g = gamma.values(N)
    s = np.empty(N)
    s[0] = s1
    clamped = False
    cur = float(s1)
    for i in range(N - 1):
        cur = (1.0 - a[i]) * cur + a[i] * bb[i] + g[i]
        if cur < 0.0:
            cur, clamped = 0.0, True
        s[i + 1] = cur
    half = N // 2
    tail = np.maximum.accumulate(s[half - 1 :][::-1])[::-1] if N > 1 else s.copy()
    return XuResult(
        s_final=float(s[-1]),
        s=s,
        envelope=dyadic_block_maxima(s, start=2),
        tail_running_max=tail,
        clamped=clamped,
    )
