"""Golden-section minimisation of convex functions of one variable.

Works elementwise: ``lo`` and ``hi`` may be arrays and ``fn`` must then
accept arrays of the same shape.
"""

import math

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section(fn, lo, hi, tol=1e-12):
    """Return the approximate minimiser of a unimodal ``fn`` on ``[lo, hi]``.

    The iteration count is fixed by the widest bracket, so vectorised calls
    are deterministic and shape-stable.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    width = float(np.max(hi - lo)) if lo.size else 0.0
    if width <= tol:
        return 0.5 * (lo + hi)
    n_iter = int(math.ceil(math.log(tol / width) / math.log(INV_PHI))) + 1

    a, b = lo.copy(), hi.copy()
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(n_iter):
        left = fc < fd
        # keep [a, d] where fc < fd, else [c, b]
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        new_c = b - INV_PHI * (b - a)
        new_d = a + INV_PHI * (b - a)
        c, d = np.where(left, new_c, d), np.where(left, c, new_d)
        fc_old, fd_old = fc, fd
        probe = np.where(left, c, d)
        fp = fn(probe)
        fc = np.where(left, fp, fd_old)
        fd = np.where(left, fc_old, fp)
    x = 0.5 * (a + b)
    return x if x.ndim else float(x)


def parabolic_refine(fn, x, h, lo, hi):
    """One step of parabolic interpolation through ``x - h, x, x + h``.

    The step is only taken if it lowers ``fn`` and stays in ``[lo, hi]``.
    Scalar only.
    """
    a, b = max(lo, x - h), min(hi, x + h)
    if not a < x < b:
        return x
    fa, fx, fb = fn(a), fn(x), fn(b)
    denom = (x - a) * (fx - fb) - (x - b) * (fx - fa)
    if denom == 0.0:
        return x
    num = (x - a) ** 2 * (fx - fb) - (x - b) ** 2 * (fx - fa)
    cand = x - 0.5 * num / denom
    if lo <= cand <= hi and fn(cand) < fx:
        return cand
    return x
