"""The step-5 Carnot group with growth vector (2, 1, 1, 1, 1) in Fuller coordinates.

Group law, exponential coordinates and the frame g_1..g_6 are polynomial, so
every routine here is written over generic arithmetic: pass Fractions for
exact results, floats for speed, or ``Poly``/``numpy.polynomial`` objects to
get symbolic curves.  Constants are divided by integers (never multiplied by
float literals) to keep rational inputs rational.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from numpy.polynomial import Polynomial

from .curves import CurvePiece, PiecewiseCurve
from .fuller import DEFAULT_EPS, HypothesisViolated, solve_finite_time
from .geodesy import (BoundaryPair, GeodesicR4, InadmissibleBoundary, StateR4,
                      build_subfinsler_geodesic, check_boundary_admissible)
from .polynorm import DELTA_TOL, curve_length

__all__ = [
    "WEIGHTS",
    "identity",
    "multiply",
    "inverse",
    "exp_coords",
    "log_coords",
    "dilate",
    "project_pi",
    "g_frame",
    "eta_coords",
    "subfinsler_norm_G",
    "finsler_norm_G",
    "horizontal_lift",
    "CarnotGeodesic",
    "CarnotFinslerCurve",
    "build_carnot_subfinsler_geodesic",
    "build_carnot_finsler_geodesic",
]

WEIGHTS = (1, 1, 2, 3, 4, 5)


def identity():
    return (0, 0, 0, 0, 0, 0)


def multiply(x: Sequence, y: Sequence) -> tuple:
    x1, x2, x3, x4, x5, x6 = x
    y1, y2, y3, y4, y5, y6 = y
    return (
        x1 + y1,
        x2 + y2,
        x3 + y3 - x2 * y1,
        x4 + y4 - x3 * y1 + x2 * y1 * y1 / 2,
        x5 + y5 + x1 * y4 - x1 * x3 * y1 + x2 * y1 * y1 * y1 / 3 - x3 * y1 * y1 / 2
        + x1 * x2 * y1 * y1 / 2,
        x6 + y6 - x3 * y4 + x2 * y5 + x3 * x3 * y1 / 2 - x2 * x3 * y1 * y1 / 2
        + x2 * x2 * y1 * y1 * y1 / 6,
    )


def exp_coords(a: Sequence) -> tuple:
    """Fuller coordinates of Exp(sum a_i g_i)(0)."""
    a1, a2, a3, a4, a5, a6 = a
    return (
        a1,
        a2,
        a3 - a1 * a2 / 2,
        a4 + a1 * a1 * a2 / 6 - a1 * a3 / 2,
        a5 + a1 * a1 * a1 * a2 / 8 - a1 * a1 * a3 / 3 + a1 * a4 / 2,
        a6 + a1 * a1 * a1 * a2 * a2 / 40 - a1 * a1 * a2 * a3 / 8
        + a1 * (a3 * a3 + a2 * a4) / 6 - a3 * a4 / 2 + a2 * a5 / 2,
    )


def _rationalize(x):
    # ints would turn into floats under "/", so lift them to Fractions
    return tuple(Fraction(v) if isinstance(v, int) else v for v in x)


def _triangular_solve(target, forward, start):
    """Solve forward(b) = target when coordinate i of forward(b) is b_i + P_i(b_<i)."""
    b = list(start)
    for i in range(6):
        b[i] = b[i] + (target[i] - forward(b)[i])
    return tuple(b)


def inverse(x: Sequence) -> tuple:
    """b with x * b = e, by back-substitution through the product law."""
    x = _rationalize(x)
    zero = x[0] - x[0]
    return _triangular_solve([zero] * 6, lambda b: multiply(x, b), [zero] * 6)


def log_coords(x: Sequence) -> tuple:
    """Exponential coordinates a with exp_coords(a) = x."""
    x = _rationalize(x)
    zero = x[0] - x[0]
    return _triangular_solve(list(x), exp_coords, [zero] * 6)


def dilate(lam, x: Sequence) -> tuple:
    if not lam > 0:
        raise ValueError("dilation factor must be positive")
    return tuple(v * lam ** k for v, k in zip(x, WEIGHTS))


def project_pi(x: Sequence) -> StateR4 | tuple:
    """pi(x1..x6) = (-x3, x2, x6, x1) onto the R^4 model."""
    q = (-x[2], x[1], x[5], x[0])
    if all(isinstance(v, (int, float, np.floating)) for v in q):
        return StateR4(*(float(v) for v in q))
    return q


def g_frame(x: Sequence) -> np.ndarray:
    """6 x 6 matrix whose columns are g_1(x) .. g_6(x)."""
    x1, x2, x3 = float(x[0]), float(x[1]), float(x[2])
    G = np.eye(6)
    G[2, 0] = -x2
    G[3, 0] = -x3
    G[4, 0] = -x1 * x3
    G[5, 0] = 0.5 * x3 * x3
    G[4, 3] = x1
    G[5, 3] = -x3
    G[5, 4] = x2
    return G


def eta_coords(x: Sequence, xi: Sequence) -> tuple:
    """Coefficients eta with xi = sum eta_i g_i(x) (unit lower triangular solve)."""
    x1, x2, x3 = x[0], x[1], x[2]
    e1, e2, e3, e4, e5, e6 = xi
    eta4 = e4 + x3 * e1
    eta5 = e5 - x1 * e4
    eta6 = e6 + x3 * x3 * e1 / 2 + (x1 * x2 + x3) * e4 - x2 * e5
    return (e1, e2, e3 + x2 * e1, eta4, eta5, eta6)


def subfinsler_norm_G(x: Sequence, xi: Sequence, tol: float = DELTA_TOL) -> float:
    eta = [float(v) for v in eta_coords(x, xi)]
    scale = 1.0 + math.sqrt(sum(float(v) ** 2 for v in xi))
    if any(abs(e) > tol * scale for e in eta[2:]):
        return math.inf
    return max(abs(eta[0]), abs(eta[1]))


def finsler_norm_G(x: Sequence, xi: Sequence) -> float:
    x1, x2, x3 = (float(v) for v in x[:3])
    e1, e2, e3, e4, e5, e6 = (float(v) for v in xi)
    return (max(abs(e1), abs(e2)) + abs(e3 + x2 * e1) + abs(e4 + x3 * e1)
            + abs(e5 - x1 * e4) + abs(e6 + 0.5 * x3 * x3 * e1 + (x1 * x2 + x3) * e4 - x2 * e5))


def _subgroup_poly(u1: float, u2: float) -> tuple:
    s = Polynomial([0.0, 1.0])
    zero = Polynomial([0.0])
    return exp_coords((u1 * s, u2 * s, zero, zero, zero, zero))


def horizontal_lift(arcs: Sequence[tuple], x0: Sequence, t0: float = 0.0) -> PiecewiseCurve:
    """Lift piecewise-constant controls ``(u1, u2, duration)`` starting at x0.

    On each arc the flow of u1 g1 + u2 g2 is right translation by the
    one-parameter subgroup exp(s (u1, u2, 0, 0, 0, 0)).
    """
    pieces = []
    t = t0
    xk = tuple(float(v) for v in x0)
    for u1, u2, d in arcs:
        sub = _subgroup_poly(float(u1), float(u2))
        coords = tuple(Polynomial(p.coef) if isinstance(p, Polynomial) else Polynomial([p])
                       for p in multiply(xk, sub))
        pieces.append(CurvePiece(t, float(d), coords, (float(u1), float(u2))))
        xk = tuple(float(p(d)) for p in coords)
        t += d
    if not pieces:
        coords = tuple(Polynomial([v]) for v in xk)
        pieces.append(CurvePiece(t0, 0.0, coords, (0.0, 0.0)))
    return PiecewiseCurve(tuple(pieces), constant_speed=True)


@dataclass
class CarnotGeodesic:
    base: GeodesicR4
    curve: PiecewiseCurve
    x0: tuple
    x1: tuple
    length: float

    @property
    def switch_times(self) -> list[float]:
        return self.curve.switch_times()

    def projection_error(self, n: int = 2001) -> float:
        ts = np.linspace(self.curve.t0, self.curve.t1, n)
        pos, _ = self.curve.sample(ts)
        base, _ = self.base.curve.sample(ts)
        proj = np.column_stack([-pos[:, 2], pos[:, 1], pos[:, 5], pos[:, 0]])
        return float(np.max(np.abs(proj - base)))

    def endpoint_projection_error(self) -> float:
        q = project_pi(self.x1)
        return float(np.max(np.abs(q.as_array() - self.base.pair.q1.as_array())))

    def rows(self, n: int = 1001):
        """CSV rows (t, x1..x6, u1, u2)."""
        ts = np.linspace(self.curve.t0, self.curve.t1, n)
        pos, _ = self.curve.sample(ts)
        out = []
        for t, p in zip(ts, pos):
            u, v = self.base.control_at(t)
            out.append((float(t), *map(float, p), v, u))
        return out


def build_carnot_subfinsler_geodesic(x0: Sequence, base_pair: BoundaryPair,
                                     eps: float = DEFAULT_EPS) -> CarnotGeodesic:
    q0 = project_pi(tuple(float(v) for v in x0))
    if np.max(np.abs(q0.as_array() - base_pair.q0.as_array())) > 1e-12:
        raise ValueError("pi(x0) must equal the base starting point")
    base = build_subfinsler_geodesic(base_pair, eps)
    arcs = [(1.0, a.u, a.duration) for a in base.solution.arcs]
    curve = horizontal_lift(arcs, x0)
    length = curve_length(subfinsler_norm_G, curve)
    x1 = tuple(float(v) for v in curve.end())
    return CarnotGeodesic(base, curve, tuple(float(v) for v in x0), x1, length)


@dataclass
class CarnotFinslerCurve:
    """The explicit curve x_hat(t) together with both endpoints."""

    curve: PiecewiseCurve
    x0: tuple
    x1: tuple
    stated_x1: tuple
    A: float
    B: float
    t1: float
    controls: tuple = field(repr=False, default=())

    def unit_speed_error(self, n: int = 10_000) -> float:
        ts = np.linspace(0.0, self.t1, n)
        pos, vel = self.curve.sample(ts)
        return float(max(abs(finsler_norm_G(p, v) - 1.0) for p, v in zip(pos, vel)))

    def length(self) -> float:
        return curve_length(finsler_norm_G, self.curve)

    def rows(self, n: int = 1001):
        ts = np.linspace(0.0, self.t1, n)
        pos, _ = self.curve.sample(ts)
        out = []
        for t, p in zip(ts, pos):
            piece, _ = self.curve._locate(t)
            out.append((float(t), *map(float, p), 1.0, piece.controls[1]))
        return out


def build_carnot_finsler_geodesic(x0: float, y0: float, x1: float, y1: float,
                                  w0: float, w1: float, z0: float, z1: float,
                                  eps: float = DEFAULT_EPS) -> CarnotFinslerCurve:
    """Curve x_hat(t) = (w0 + t, y_F, -x_F, int x_F, int (w0 + s) x_F, z0 + 1/2 int x_F^2).

    ``x1`` is the point the curve actually reaches; ``stated_x1`` is
    (w1, -y1, -x1, A, B, z1), which differs from it in the second coordinate
    whenever y1 != 0.
    """
    pair = BoundaryPair((x0, y0, z0, w0), (x1, y1, z1, w1))
    report = check_boundary_admissible(pair, eps=eps)
    if not report.admissible:
        raise InadmissibleBoundary(
            f"boundary data violate the hypotheses: z residual {report.z_residual:.3g}, "
            f"w slack {report.w_slack:.3g}")
    t1 = w1 - w0
    try:
        sol = solve_finite_time((x0, y0), (x1, y1), t1, eps)
    except HypothesisViolated as exc:
        raise InadmissibleBoundary(str(exc)) from None
    pieces = []
    acc4 = acc5 = 0.0
    acc6 = z0
    for arc in sol.arcs:
        xp = arc.x_poly()
        yp = arc.y_poly()
        time = Polynomial([w0 + arc.t_start, 1.0])
        p4 = xp.integ()
        p5 = (time * xp).integ()
        p6 = 0.5 * (xp * xp).integ()
        coords = (time, yp, -xp, acc4 + p4, acc5 + p5, acc6 + p6)
        pieces.append(CurvePiece(arc.t_start, arc.duration, coords, (1.0, arc.u)))
        d = arc.duration
        acc4 += p4(d)
        acc5 += p5(d)
        acc6 += arc.cost()
    curve = PiecewiseCurve(tuple(pieces), constant_speed=True)
    start = tuple(float(v) for v in curve.start())
    end = tuple(float(v) for v in curve.end())
    A, B = end[3], end[4]
    stated = (w1, -y1, -x1, A, B, z1)
    return CarnotFinslerCurve(curve, start, end, stated, A, B, t1,
                              tuple((a.u, a.duration) for a in sol.arcs))
