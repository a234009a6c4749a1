"""Pure-Python versions of the hot loops.

Mirrors ``_kernels.pyx`` line for line; used when the extension is not built
or when ``CHATTERLAB_PURE=1``.
"""
from __future__ import annotations

import math

import numpy as np

GOLDEN = 0.5 * (math.sqrt(5.0) - 1.0)


def _arc(x, y, u, d):
    """End state and exact cost 1/2 int x^2 of one constant-control arc."""
    # x(s) = x + y s + u s^2 / 2
    c = 0.5 * u
    d2 = d * d
    d3 = d2 * d
    integral = (x * x * d + x * y * d2 + (y * y + 2.0 * x * c) * d3 / 3.0
                + y * c * d2 * d2 / 2.0 + c * c * d3 * d2 / 5.0)
    return x + y * d + c * d2, y + u * d, 0.5 * integral


def arc_chain(x, y, controls, durations):
    """Propagate through arcs; returns (x, y, cost)."""
    cost = 0.0
    for u, d in zip(controls, durations):
        x, y, j = _arc(x, y, u, d)
        cost += j
    return x, y, cost


def landing(x, y):
    """Time-optimal two-arc landing at the origin: (u_first, d1, d2)."""
    s = x + 0.5 * y * abs(y)
    if s > 0.0 or (s == 0.0 and y > 0.0):
        X = x + 0.5 * y * y
        r = math.sqrt(max(X, 0.0))
        return -1.0, max(y + r, 0.0), r
    X = -x + 0.5 * y * y
    r = math.sqrt(max(X, 0.0))
    return 1.0, max(-y + r, 0.0), r


def _block(x, y, s, durations):
    """Free alternating arcs from (x, y), then the landing.  Returns (time, cost)."""
    cost = 0.0
    t = 0.0
    u = s
    for d in durations:
        x, y, j = _arc(x, y, u, d)
        cost += j
        t += d
        u = -u
    ul, d1, d2 = landing(x, y)
    x, y, j1 = _arc(x, y, ul, d1)
    _, _, j2 = _arc(x, y, -ul, d2)
    return t + d1 + d2, cost + j1 + j2


def candidate_objective(p, d, kf, t1, weight):
    """Penalised cost of a two-block candidate.

    ``p`` = (x0, y0, sf, xm, ym, sb, active_f, active_b) where (xm, ym) is the
    mirrored terminal point; ``d`` holds kf forward then kb backward durations.
    Returns (objective, cost, overrun).
    """
    x0, y0, sf, xm, ym, sb, af, ab = p
    tf, jf = _block(x0, y0, sf, d[:kf]) if af else (0.0, 0.0)
    tb, jb = _block(xm, ym, sb, d[kf:]) if ab else (0.0, 0.0)
    over = tf + tb - t1
    if over < 0.0:
        over = 0.0
    cost = jf + jb
    return cost + weight * over * over, cost, over


def coordinate_descent(p, d0, kf, t1, weights, sweeps, golden_iters, hi_scale):
    """Golden-section coordinate descent over durations, one round per weight."""
    d = np.array(d0, dtype=float)
    n = d.size
    for w in weights:
        best = candidate_objective(p, d, kf, t1, w)[0]
        for _ in range(sweeps):
            improved = False
            for i in range(n):
                keep = d[i]
                a = 0.0
                b = 2.0 * keep + hi_scale
                c1 = b - GOLDEN * (b - a)
                c2 = a + GOLDEN * (b - a)
                d[i] = c1
                f1 = candidate_objective(p, d, kf, t1, w)[0]
                d[i] = c2
                f2 = candidate_objective(p, d, kf, t1, w)[0]
                for _ in range(golden_iters):
                    if f1 <= f2:
                        b, c2, f2 = c2, c1, f1
                        c1 = b - GOLDEN * (b - a)
                        d[i] = c1
                        f1 = candidate_objective(p, d, kf, t1, w)[0]
                    else:
                        a, c1, f1 = c1, c2, f2
                        c2 = a + GOLDEN * (b - a)
                        d[i] = c2
                        f2 = candidate_objective(p, d, kf, t1, w)[0]
                trial, ft = (c1, f1) if f1 <= f2 else (c2, f2)
                d[i] = 0.0
                f0 = candidate_objective(p, d, kf, t1, w)[0]
                if f0 < ft:
                    trial, ft = 0.0, f0
                if ft < best:
                    d[i] = trial
                    if best - ft > 1e-15 * (1.0 + abs(best)):
                        improved = True
                    best = ft
                else:
                    d[i] = keep
            if not improved:
                break
    return d


def propagate_uv(state, us, vs, h, want_jac=False):
    """Exact flow of x'=v y, y'=u, z'=v x^2/2, w'=v under piecewise-constant (u, v).

    Returns the end state and, if asked, the 4 x 2N Jacobian with respect to
    (u_0..u_{N-1}, v_0..v_{N-1}).
    """
    n = len(us)
    x, y, z, w = (float(s) for s in state)
    hist = np.empty((n, 4)) if want_jac else None
    h2, h3 = h * h, h * h * h
    h4, h5 = h2 * h2, h3 * h2
    for k in range(n):
        u, v = us[k], vs[k]
        if want_jac:
            hist[k] = (x, y, z, w)
        b = v * y
        c = 0.5 * v * u
        integral = x * x * h + x * b * h2 + (b * b + 2.0 * x * c) * h3 / 3.0 + b * c * h4 / 2.0 + c * c * h5 / 5.0
        z += 0.5 * v * integral
        x += v * (y * h + 0.5 * u * h2)
        y += u * h
        w += v * h
    end = np.array([x, y, z, w])
    if not want_jac:
        return end, None
    jac = np.zeros((4, 2 * n))
    M = np.eye(4)
    for k in range(n - 1, -1, -1):
        x, y, _, _ = hist[k]
        u, v = us[k], vs[k]
        a, b, c = x, v * y, 0.5 * v * u
        I = a * a * h + a * b * h2 + (b * b + 2.0 * a * c) * h3 / 3.0 + b * c * h4 / 2.0 + c * c * h5 / 5.0
        Ia = 2.0 * a * h + b * h2 + 2.0 * c * h3 / 3.0
        Ib = a * h2 + 2.0 * b * h3 / 3.0 + c * h4 / 2.0
        Ic = 2.0 * a * h3 / 3.0 + b * h4 / 2.0 + 2.0 * c * h5 / 5.0
        du = np.array([0.5 * v * h2, h, 0.5 * v * Ic * 0.5 * v, 0.0])
        dv = np.array([y * h + 0.5 * u * h2, 0.0, 0.5 * I + 0.5 * v * (Ib * y + Ic * 0.5 * u), h])
        jac[:, k] = M @ du
        jac[:, n + k] = M @ dv
        S = np.eye(4)
        S[0, 1] = v * h
        S[2, 0] = 0.5 * v * Ia
        S[2, 1] = 0.5 * v * Ib * v
        M = M @ S
    return end, jac
