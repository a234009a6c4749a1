"""Fuller problem: optimal synthesis, value functions and the finite-horizon solver.

The synthesis is x'' = u, |u| <= 1, minimising 1/2 * int x^2 dt.  Optimal
trajectories switch on the curve x = -C*y*|y| and reach the origin after
countably many switches whose spacing shrinks geometrically by ``mu``.

Every arc is propagated in closed form.  Switch points are placed exactly on
the switching curve, so relative accuracy is kept deep into the chattering
regime where x is of order y^2.
"""
from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple, Sequence

import numpy as np
from numpy.polynomial import Polynomial
from scipy.optimize import brentq

__all__ = [
    "PhasePoint",
    "FullerConstants",
    "BangArc",
    "ChatteringTrajectory",
    "FiniteTimeSolution",
    "Estimate",
    "PMPReport",
    "HypothesisViolated",
    "CertificateFailed",
    "SimulationError",
    "solve_mu",
    "mu_closed_form",
    "derive_switch_coeff",
    "fuller_constants",
    "control_law",
    "propagate_arc",
    "arc_cost",
    "simulate",
    "time_to_origin",
    "cost_to_origin",
    "T_F",
    "J_F",
    "solve_finite_time",
    "verify_pmp_certificate",
]

DEFAULT_EPS = 1e-10
_MAX_ARCS = 10_000


class HypothesisViolated(ValueError):
    """The horizon is shorter than the construction requires."""


class CertificateFailed(AssertionError):
    def __init__(self, message: str, time: float | None = None):
        super().__init__(message)
        self.time = time


class SimulationError(RuntimeError):
    pass


@dataclass(frozen=True)
class PhasePoint:
    x: float
    y: float

    def __iter__(self):
        yield self.x
        yield self.y

    def scaled(self, lam: float) -> "PhasePoint":
        """Image under the Fuller symmetry (x, y) -> (lam^2 x, lam y)."""
        return PhasePoint(lam * lam * self.x, lam * self.y)

    def radius(self) -> float:
        """Homogeneous radius (x^2 + y^4)^(1/4)."""
        return (self.x * self.x + self.y ** 4) ** 0.25


def _pt(p) -> PhasePoint:
    if isinstance(p, PhasePoint):
        return p
    x, y = p
    return PhasePoint(float(x), float(y))


class Estimate(NamedTuple):
    value: float
    error_bound: float

    def __float__(self):
        return self.value


# ---------------------------------------------------------------------------
# constants

def solve_mu() -> float:
    """Root of mu^4 - 3 mu^3 - 4 mu^2 - 3 mu + 1 in (0, 1)."""
    quartic = lambda m: (((m - 3.0) * m - 4.0) * m - 3.0) * m + 1.0
    mu = brentq(quartic, 0.0, 1.0, xtol=1e-16, rtol=8.9e-16, maxiter=200)
    # one Newton polish step
    dq = ((4.0 * mu - 9.0) * mu - 8.0) * mu - 3.0
    return mu - quartic(mu) / dq


def mu_closed_form() -> float:
    s = math.sqrt(33.0)
    return 0.25 * (3.0 + s - math.sqrt(26.0 + 6.0 * s))


def _hit_time(x: float, y: float, u: float, c: float) -> float:
    """Duration of the u-arc from (x, y) to the switching curve x = -c*y*|y|.

    With u = -1 the arc reaches the branch y < 0 when
    x + y^2/2 = (1/2 + c) * y_end^2; u = +1 follows by central symmetry.
    """
    apex = -u * x + 0.5 * y * y
    if apex < 0.0:
        raise SimulationError(f"arc from ({x}, {y}) with u={u} never meets the switching curve")
    return -u * y + math.sqrt(apex / (0.5 + c))


def _spiral_ratio(c: float) -> float:
    """|y| ratio between consecutive switch points for curve constant c."""
    start_y = -1.0
    d = _hit_time(c, start_y, 1.0, c)
    return (start_y + d) / -start_y


def derive_switch_coeff(mu: float | None = None) -> float:
    """Switching-curve constant C whose arc map shrinks |y| by exactly mu.

    A +1 arc from (C, -1) on the curve next meets the curve at y = mu.
    """
    mu = solve_mu() if mu is None else mu
    residual = lambda c: _spiral_ratio(c) - mu
    c, info = brentq(residual, 1e-9, 0.5 - 1e-12, xtol=1e-16, rtol=8.9e-16,
                     maxiter=200, full_output=True)
    if not info.converged or abs(residual(c)) > 1e-10:
        raise SimulationError("switching-curve root find did not converge")
    return c


@dataclass(frozen=True)
class FullerConstants:
    mu: float
    switch_coeff: float
    spiral_ratio: float
    unit_tail_time: float
    unit_tail_cost: float
    tail_time_bound: float
    tail_cost_bound: float
    oval_time_range: tuple
    oval_cost_range: tuple


def _unit_tails(c: float, ratio: float) -> tuple[float, float]:
    # remaining time / cost from the curve point with |y| = 1
    d = _hit_time(c, -1.0, 1.0, c)
    t_unit = d / (1.0 - ratio)
    j_unit = arc_cost(PhasePoint(c, -1.0), 1.0, d) / (1.0 - ratio ** 5)
    return t_unit, j_unit


def _oval_points(n: int) -> list[PhasePoint]:
    pts = []
    for th in np.linspace(0.0, 2.0 * np.pi, n, endpoint=False):
        s = math.sin(th)
        pts.append(PhasePoint(math.cos(th), math.copysign(math.sqrt(abs(s)), s)))
    return pts


@lru_cache(maxsize=1)
def fuller_constants() -> FullerConstants:
    mu = solve_mu()
    c = derive_switch_coeff(mu)
    ratio = _spiral_ratio(c)
    t_unit, j_unit = _unit_tails(c, ratio)
    partial = FullerConstants(mu, c, ratio, t_unit, j_unit, math.inf, math.inf, (), ())
    times, costs = [], []
    for p in _oval_points(1000):
        traj = _simulate(p, 1e-12, partial)
        times.append(traj.T_reach + traj.tail_time)
        costs.append(traj.arc_cost + traj.tail_cost)
    return FullerConstants(
        mu=mu,
        switch_coeff=c,
        spiral_ratio=ratio,
        unit_tail_time=t_unit,
        unit_tail_cost=j_unit,
        tail_time_bound=1.1 * max(times),
        tail_cost_bound=1.1 * max(costs),
        oval_time_range=(min(times), max(times)),
        oval_cost_range=(min(costs), max(costs)),
    )


# ---------------------------------------------------------------------------
# arcs

def propagate_arc(start, u: float, dt: float) -> PhasePoint:
    if dt < 0:
        raise ValueError("dt must be non-negative")
    x, y = _pt(start)
    return PhasePoint(x + y * dt + 0.5 * u * dt * dt, y + u * dt)


def _square_integral(a: float, b: float, c: float, d: float) -> float:
    # int_0^d (a + b s + c s^2)^2 ds
    return d * (a * a + d * (a * b + d * ((b * b + 2.0 * a * c) / 3.0
                                          + d * (0.5 * b * c + d * c * c / 5.0))))


def arc_cost(start, u: float, dt: float) -> float:
    """Exact 1/2 * int x^2 over one constant-control arc."""
    x, y = _pt(start)
    return 0.5 * _square_integral(x, y, 0.5 * u, dt)


@dataclass(frozen=True)
class BangArc:
    t_start: float
    duration: float
    u: float
    start: PhasePoint

    @property
    def t_end(self) -> float:
        return self.t_start + self.duration

    def end(self) -> PhasePoint:
        return propagate_arc(self.start, self.u, self.duration)

    def state_at(self, t: float) -> PhasePoint:
        return propagate_arc(self.start, self.u, min(max(t - self.t_start, 0.0), self.duration))

    def cost(self) -> float:
        return arc_cost(self.start, self.u, self.duration)

    def x_poly(self) -> Polynomial:
        """x along the arc as a polynomial in local time."""
        return Polynomial([self.start.x, self.start.y, 0.5 * self.u])

    def y_poly(self) -> Polynomial:
        return Polynomial([self.start.y, self.u])


def _curve_value(p: PhasePoint, c: float) -> float:
    return p.x + c * p.y * abs(p.y)


def control_law(p, constants: FullerConstants | None = None) -> int:
    """Optimal feedback: -1 above the switching curve, +1 below.

    On the curve the value of the arc about to start is returned, which is
    -sign(y); the origin returns 0.
    """
    p = _pt(p)
    if p.x == 0.0 and p.y == 0.0:
        return 0
    c = (constants or fuller_constants()).switch_coeff
    s = _curve_value(p, c)
    if s > 0.0:
        return -1
    if s < 0.0:
        return 1
    return -1 if p.y > 0 else 1


# ---------------------------------------------------------------------------
# trajectories

@dataclass(frozen=True)
class ChatteringTrajectory:
    arcs: tuple
    T_reach: float
    truncation_eps: float
    snap_state: PhasePoint
    tail_time: float
    tail_cost: float
    tail_time_bound: float
    tail_cost_bound: float
    mu: float

    @property
    def switch_times(self) -> list[float]:
        return [a.t_end for a in self.arcs]

    @property
    def T_F(self) -> float:
        return self.T_reach + self.tail_time

    @property
    def tau(self) -> float:
        """Offset with switches at T_F - tau * mu^k (0 for the rest point)."""
        if not self.arcs:
            return 0.0
        return self.T_F - self.arcs[0].t_end

    @property
    def arc_cost(self) -> float:
        return math.fsum(a.cost() for a in self.arcs)

    @property
    def cost(self) -> float:
        return self.arc_cost + self.tail_cost

    def gap_ratios(self) -> list[float]:
        """Ratios of consecutive inter-switch durations."""
        gaps = [a.duration for a in self.arcs[1:]]
        return [b / a for a, b in zip(gaps, gaps[1:])]

    def is_empty(self) -> bool:
        return not self.arcs


def _remaining(p: PhasePoint, const: FullerConstants) -> tuple[float, float]:
    """Closed-form time and cost from p to the origin under the synthesis."""
    if p.x == 0.0 and p.y == 0.0:
        return 0.0, 0.0
    c = const.switch_coeff
    u = control_law(p, const)
    d = _hit_time(p.x, p.y, u, c)
    y_end = abs(p.y + u * d)
    return (d + y_end * const.unit_tail_time,
            arc_cost(p, u, d) + y_end ** 5 * const.unit_tail_cost)


def _simulate(p0: PhasePoint, eps: float, const: FullerConstants) -> ChatteringTrajectory:
    c = const.switch_coeff
    arcs = []
    t = 0.0
    state = p0
    if not (state.x == 0.0 and state.y == 0.0):
        u = control_law(state, const)
        while state.radius() >= eps:
            d = _hit_time(state.x, state.y, u, c)
            if not (d >= 0.0 and math.isfinite(d)):
                raise SimulationError(f"arc from {state} cannot reach the switching curve")
            arcs.append(BangArc(t, d, float(u), state))
            t += d
            y_end = state.y + u * d
            state = PhasePoint(-c * y_end * abs(y_end), y_end)
            u = -u
            if len(arcs) > _MAX_ARCS:
                raise SimulationError("too many arcs; constants look corrupted")
    tail_t, tail_j = _remaining(state, const)
    rho = state.radius()
    return ChatteringTrajectory(
        arcs=tuple(arcs),
        T_reach=t,
        truncation_eps=eps,
        snap_state=state,
        tail_time=tail_t,
        tail_cost=tail_j,
        tail_time_bound=const.tail_time_bound * rho,
        tail_cost_bound=const.tail_cost_bound * rho ** 5,
        mu=const.mu,
    )


def simulate(p0, eps: float = DEFAULT_EPS,
             constants: FullerConstants | None = None) -> ChatteringTrajectory:
    """Follow the optimal synthesis from p0 until (x^2 + y^4)^(1/4) < eps."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    return _simulate(_pt(p0), eps, constants or fuller_constants())


def time_to_origin(p0, eps: float = DEFAULT_EPS) -> Estimate:
    traj = simulate(p0, eps)
    return Estimate(traj.T_F, traj.tail_time_bound)


def cost_to_origin(p0, eps: float = DEFAULT_EPS) -> Estimate:
    traj = simulate(p0, eps)
    return Estimate(traj.cost, traj.tail_cost_bound)


def T_F(x: float, y: float, eps: float = DEFAULT_EPS) -> float:
    return time_to_origin((x, y), eps).value


def J_F(x: float, y: float, eps: float = DEFAULT_EPS) -> float:
    return cost_to_origin((x, y), eps).value


# ---------------------------------------------------------------------------
# finite horizon

@dataclass(frozen=True)
class FiniteTimeSolution:
    """Forward chattering, rest at the origin, mirrored chattering."""

    arcs: tuple
    t1: float
    p0: PhasePoint
    p1: PhasePoint
    forward: ChatteringTrajectory
    backward: ChatteringTrajectory
    # index of the resting arc inside ``arcs``
    rest_index: int
    _starts: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_starts", tuple(a.t_start for a in self.arcs))

    @property
    def cost(self) -> float:
        return self.forward.cost + self.backward.cost

    @property
    def arc_cost(self) -> float:
        return math.fsum(a.cost() for a in self.arcs)

    @property
    def switch_times(self) -> list[float]:
        out = []
        for a, b in zip(self.arcs, self.arcs[1:]):
            if a.u != b.u:
                out.append(b.t_start)
        return out

    def arc_at(self, t: float) -> BangArc:
        i = max(bisect_right(self._starts, t) - 1, 0)
        return self.arcs[i]

    def state_at(self, t: float) -> PhasePoint:
        return self.arc_at(t).state_at(t)

    def control_at(self, t: float) -> float:
        return self.arc_at(t).u

    def final_state(self) -> PhasePoint:
        return self.arcs[-1].end()


def solve_finite_time(p0, p1, t1: float, eps: float = DEFAULT_EPS) -> FiniteTimeSolution:
    """Optimal trajectory of the finite-horizon Fuller problem.

    Valid when ``t1 >= T_F(p0) + T_F(x1, -y1)``; shorter horizons raise
    :class:`HypothesisViolated`.
    """
    p0, p1 = _pt(p0), _pt(p1)
    mirrored = PhasePoint(p1.x, -p1.y)
    fwd = simulate(p0, eps)
    bwd = simulate(mirrored, eps)
    need = fwd.T_F + bwd.T_F
    if t1 < need - 1e-12 * (1.0 + need):
        raise HypothesisViolated(
            f"t1 = {t1!r} is below T_F(x0, y0) + T_F(x1, -y1) = {need!r}")
    arcs = list(fwd.arcs)
    rest_start = fwd.T_reach
    rest_end = t1 - bwd.T_reach
    rest_index = len(arcs)
    arcs.append(BangArc(rest_start, max(rest_end - rest_start, 0.0), 0.0, PhasePoint(0.0, 0.0)))
    for arc in reversed(bwd.arcs):
        end = arc.end()
        arcs.append(BangArc(t1 - arc.t_end, arc.duration, arc.u, PhasePoint(end.x, -end.y)))
    return FiniteTimeSolution(tuple(arcs), float(t1), p0, p1, fwd, bwd, rest_index)


# ---------------------------------------------------------------------------
# Pontryagin certificate

@dataclass(frozen=True)
class PMPReport:
    certified: bool
    samples_checked: int
    max_hamiltonian: float
    max_switch_costate: float
    costate_scale: float
    costates: tuple = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "certified": self.certified,
            "samples_checked": self.samples_checked,
            "max_hamiltonian": self.max_hamiltonian,
            "max_switch_costate": self.max_switch_costate,
            "costate_scale": self.costate_scale,
        }


def _costate_pieces(arcs: Sequence[BangArc], backward: bool):
    """Per-arc (p, q) polynomials in local time for p' = x, q' = -p.

    ``backward`` integrates from zero costate at the end of the arc list,
    otherwise from zero costate at its beginning.
    """
    pieces = [None] * len(arcs)
    p_b, q_b = 0.0, 0.0
    order = range(len(arcs) - 1, -1, -1) if backward else range(len(arcs))
    for i in order:
        arc = arcs[i]
        d = arc.duration
        xi = arc.x_poly().integ()
        if backward:
            # p(s) = p_end - int_s^d x ; q(s) = q_end + int_s^d p
            p = Polynomial([p_b - xi(d)]) + xi
            pi = p.integ()
            q = Polynomial([q_b + pi(d)]) - pi
            p_b, q_b = p(0.0), q(0.0)
        else:
            p = Polynomial([p_b]) + xi
            q = Polynomial([q_b]) - p.integ()
            p_b, q_b = p(d), q(d)
        pieces[i] = (p, q)
    return pieces


def verify_pmp_certificate(sol: FiniteTimeSolution, samples: int = 10_000,
                           rel_tol: float = 1e-9) -> PMPReport:
    """Rebuild (p, q) from the adjoint system and check u = sign(q).

    H = -x^2/2 + p*y + q*u with lambda_0 = 1.  Costates vanish on the resting
    arc; the forward part is integrated backward from it and the mirrored part
    forward from it.
    """
    arcs = sol.arcs
    r = sol.rest_index
    pieces = (_costate_pieces(arcs[:r], backward=True)
              + [(Polynomial([0.0]), Polynomial([0.0]))]
              + _costate_pieces(arcs[r + 1:], backward=False))

    ts = np.linspace(0.0, sol.t1, samples)
    starts = np.array([a.t_start for a in arcs])
    idx = np.clip(np.searchsorted(starts, ts, side="right") - 1, 0, len(arcs) - 1)
    q_vals = np.empty_like(ts)
    h_vals = np.empty_like(ts)
    u_vals = np.empty_like(ts)
    for k in np.unique(idx):
        sel = idx == k
        arc = arcs[k]
        s = np.clip(ts[sel] - arc.t_start, 0.0, arc.duration)
        p, q = pieces[k]
        x = arc.x_poly()(s)
        y = arc.y_poly()(s)
        q_vals[sel] = q(s)
        h_vals[sel] = -0.5 * x * x + p(s) * y + q(s) * arc.u
        u_vals[sel] = arc.u
    scale = float(np.max(np.abs(q_vals))) if samples else 0.0
    x_scale = max(abs(sol.p0.x), abs(sol.p1.x), sol.p0.y ** 2, sol.p1.y ** 2, 1e-300)
    h_scale = x_scale

    switch = np.array(sol.switch_times)
    if switch.size:
        dist = np.min(np.abs(ts[:, None] - switch[None, :]), axis=1)
    else:
        dist = np.full_like(ts, np.inf)
    tol = rel_tol * scale
    checked = 0
    for t, q, u, dd in zip(ts, q_vals, u_vals, dist):
        if dd < 1e-9 * (1.0 + sol.t1):
            continue
        if abs(q) > tol:
            checked += 1
            if u == 0.0 or math.copysign(1.0, q) != u:
                raise CertificateFailed(
                    f"sign(q) = {math.copysign(1.0, q):+.0f} but u = {u:+.0f} at t = {t:.17g}", t)
        elif u == 0.0 and abs(q) > 0.0 and abs(q) > 1e-12 * max(scale, 1.0):
            raise CertificateFailed(f"costate q = {q} nonzero on the resting arc at t = {t}", t)

    # q vanishes at switch instants; measured relative to the costate scale
    sw_q = 0.0
    for k in range(len(arcs) - 1):
        if arcs[k].u != arcs[k + 1].u and arcs[k].u != 0.0 and arcs[k + 1].u != 0.0:
            p, q = pieces[k]
            sw_q = max(sw_q, abs(q(arcs[k].duration)))
    max_h = float(np.max(np.abs(h_vals))) if samples else 0.0
    if scale > 0 and (sw_q > 1e-8 * scale or max_h > 1e-8 * max(h_scale, 1.0) * max(1.0, sol.t1)):
        raise CertificateFailed(
            f"costates inconsistent: switch residual {sw_q:.3e}, max |H| {max_h:.3e}")
    return PMPReport(True, checked, max_h, sw_q, scale, tuple(pieces))
