"""Brute-force cross-checks for the finite-horizon Fuller problem.

Two independent routes to the optimal cost:

* :func:`bangbang_search` optimises switch times of piecewise-constant
  controls directly (multi-start coordinate descent, exact arc propagation);
* :func:`collocation_cost` solves a zero-order-hold transcription, which is a
  convex QP, on a uniform grid.

Neither uses the switching-curve synthesis, so agreement with
:func:`chatterlab.fuller.solve_finite_time` is a genuine check.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .fuller import PhasePoint, arc_cost, propagate_arc

__all__ = [
    "SwitchCandidate",
    "SearchResult",
    "CollocationGrid",
    "NoFeasibleCandidate",
    "MaxIterations",
    "bangbang_search",
    "collocation_cost",
    "comparison_report",
]

PENALTY_WEIGHTS = (1e2, 1e3, 1e4, 1e5, 1e6)
FEAS_TOL = 1e-6


class NoFeasibleCandidate(RuntimeError):
    pass


class MaxIterations(RuntimeError):
    pass


@dataclass(frozen=True)
class SwitchCandidate:
    """Piecewise-constant control; ``controls[i]`` holds between consecutive times.

    ``initial_control`` is +-1 for a bang start and 0 when the trajectory
    rests at the origin first.
    """

    initial_control: float
    switch_times: tuple
    controls: tuple
    t1: float

    def __post_init__(self):
        if not self.t1 >= 0.0:
            raise ValueError("t1 must be nonnegative")
        ts = (0.0,) + tuple(self.switch_times) + (self.t1,)
        # a zero horizon is allowed only without switches
        if self.switch_times and any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("switch times must be strictly increasing inside (0, t1)")
        if len(self.controls) != len(self.switch_times) + 1:
            raise ValueError("need one control value per interval")

    def arcs(self):
        ts = (0.0,) + tuple(self.switch_times) + (self.t1,)
        return [(u, b - a) for u, a, b in zip(self.controls, ts, ts[1:])]

    def evaluate(self, p0) -> tuple[PhasePoint, float]:
        """End state and exact cost."""
        state = PhasePoint(float(p0[0]), float(p0[1]))
        parts = []
        for u, d in self.arcs():
            parts.append(arc_cost(state, u, d))
            state = propagate_arc(state, u, d)
        return state, math.fsum(parts)

    def key(self) -> tuple:
        return (self.initial_control,) + tuple(self.switch_times)


@dataclass
class SearchResult:
    candidate: SwitchCandidate
    cost: float
    endpoint_error: float
    max_switches: int
    seed: int
    starts: int
    history: list = field(default_factory=list)

    @property
    def n_switches(self) -> int:
        return len(self.candidate.switch_times)


def _merge(arcs):
    out = []
    for u, d in arcs:
        if d <= 0.0:
            continue
        if out and out[-1][0] == u:
            out[-1] = (u, out[-1][1] + d)
        else:
            out.append((u, d))
    return out


def _block_arcs(x, y, s, durations):
    arcs = []
    u = s
    for d in durations:
        arcs.append((u, float(d)))
        x, y, _ = kernels.arc_chain(x, y, [u], [d])
        u = -u
    ul, d1, d2 = kernels.landing(x, y)
    arcs += [(ul, d1), (-ul, d2)]
    return arcs


def _to_candidate(p, d, kf, t1):
    x0, y0, sf, xm, ym, sb, af, ab = p
    fwd = _block_arcs(x0, y0, sf, d[:kf]) if af else []
    bwd = _block_arcs(xm, ym, sb, d[kf:]) if ab else []
    used = sum(a[1] for a in fwd) + sum(a[1] for a in bwd)
    rest = t1 - used
    arcs = _merge(fwd + [(0.0, rest)] + list(reversed(bwd)))
    # rounding can leave the last interval a hair off t1
    times, t = [], 0.0
    for _, dur in arcs[:-1]:
        t += dur
        times.append(t)
    times = [ti for ti in times if 0.0 < ti < t1]
    controls = [a[0] for a in arcs][: len(times) + 1]
    if not controls:
        controls = [0.0]
    return SwitchCandidate(controls[0], tuple(times), tuple(controls), float(t1)), rest


def _project(p, d, kf, t1):
    """Shrink free durations until the candidate fits in [0, t1]."""
    _, _, over = kernels.candidate_objective(p, d, kf, t1, 0.0)
    if over <= 0.0:
        return d
    lo, hi = 0.0, 1.0
    _, _, over0 = kernels.candidate_objective(p, d * 0.0, kf, t1, 0.0)
    if over0 > 0.0:
        return None
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if kernels.candidate_objective(p, d * mid, kf, t1, 0.0)[2] > 0.0:
            hi = mid
        else:
            lo = mid
    return d * lo


def _descend(args):
    p, d0, kf, t1, sweeps, golden_iters, hi_scale = args
    d = kernels.coordinate_descent(p, d0, kf, t1, PENALTY_WEIGHTS, sweeps, golden_iters, hi_scale)
    d = _project(p, np.asarray(d), kf, t1)
    if d is None:
        return None
    cost = kernels.candidate_objective(p, d, kf, t1, 0.0)[1]
    return cost, d


def _split(budget, active_f, active_b):
    if active_f and active_b:
        kf = (budget + 1) // 2
        return kf, budget - kf
    return (budget, 0) if active_f else (0, budget)


def bangbang_search(p0, p1, t1: float, max_switches: int = 12, seed: int = 0,
                    starts: int = 50, sweeps: int = 6, golden_iters: int = 30,
                    workers: int | None = None) -> SearchResult:
    """Best piecewise-constant control found by multi-start coordinate descent.

    Candidates are free alternating bang arcs from each end, closed by the
    exact minimum-time landing at the origin (this is the projection that
    enforces the endpoint), with a rest arc in between.  Horizon overrun is
    penalised with a geometric weight ramp and finally removed by shrinking
    the free durations.

    The search at ``max_switches = m`` warm-starts from the result at
    ``m - 1`` with the same seed, so the best cost never increases with m.
    """
    if max_switches > 12:
        raise ValueError("max_switches is limited to 12")
    x0, y0 = float(p0[0]), float(p0[1])
    x1, y1 = float(p1[0]), float(p1[1])
    af = not (x0 == 0.0 and y0 == 0.0)
    ab = not (x1 == 0.0 and y1 == 0.0)
    if not (af or ab):
        cand = SwitchCandidate(0.0, (), (0.0,), float(t1))
        return SearchResult(cand, 0.0, 0.0, max_switches, seed, starts)
    overhead = 2 * af + 2 * ab
    if max_switches < overhead:
        raise NoFeasibleCandidate(f"at least {overhead} switches are needed for this boundary data")
    scale = max(math.sqrt(abs(x0)) + abs(y0), math.sqrt(abs(x1)) + abs(y1))
    mu = 0.2421
    best = None
    history = []
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for m in range(overhead, max_switches + 1):
            kf, kb = _split(m - overhead, af, ab)
            rng = np.random.default_rng([seed, m])
            jobs = []
            for sf in (1.0, -1.0):
                for sb in ((1.0, -1.0) if ab else (1.0,)):
                    p = np.array([x0, y0, sf, x1, -y1, sb, float(af), float(ab)])
                    n_here = max(starts // (4 if ab else 2), 1)
                    for _ in range(n_here):
                        d0 = np.empty(kf + kb)
                        for lo, k in ((0, kf), (kf, kb)):
                            base = scale * rng.uniform(0.2, 1.5)
                            for i in range(k):
                                d0[lo + i] = base * (mu ** i) * rng.uniform(0.5, 1.5)
                        jobs.append((p, d0, kf, t1, sweeps, golden_iters, scale))
                    if best is not None and best[3] == (sf, sb):
                        # embed the previous best with one extra zero-duration arc per block
                        prev_d, prev_kf = best[2], best[4]
                        d0 = np.concatenate([prev_d[:prev_kf], np.zeros(kf - prev_kf),
                                             prev_d[prev_kf:], np.zeros(kb - (prev_d.size - prev_kf))])
                        jobs.append((p, d0, kf, t1, sweeps, golden_iters, scale))
            results = list(pool.map(_descend, jobs))
            level = []
            for job, res in zip(jobs, results):
                if res is None:
                    continue
                cost, d = res
                level.append((cost, tuple(d), job[0], job[2]))
            level.sort(key=lambda r: (r[0], r[1]))
            if level:
                cost, d, p, kf_ = level[0]
                if best is None or cost < best[0]:
                    best = (cost, p, np.array(d), (p[2], p[5]), kf_)
                else:
                    # carry the previous optimum forward unchanged
                    pass
            history.append((m, best[0] if best else math.inf))
    if best is None:
        raise NoFeasibleCandidate("no candidate fits in the horizon")
    cost, p, d, _, kf = best
    cand, _ = _to_candidate(p, d, kf, t1)
    end, exact_cost = cand.evaluate((x0, y0))
    err = max(abs(end.x - x1), abs(end.y - y1))
    if err > FEAS_TOL:
        raise NoFeasibleCandidate(f"best candidate misses the endpoint by {err:.3g}")
    return SearchResult(cand, exact_cost, err, max_switches, seed, starts, history)


# ---------------------------------------------------------------------------
# collocation

@dataclass
class CollocationGrid:
    n: int
    p0: tuple
    p1: tuple
    t1: float
    u: np.ndarray | None = None
    x: np.ndarray | None = None
    y: np.ndarray | None = None

    def __post_init__(self):
        if self.n < 50:
            raise ValueError("collocation needs n >= 50")
        if not self.t1 > 0:
            raise ValueError("t1 must be positive")

    @property
    def h(self) -> float:
        return self.t1 / self.n

    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t1, self.n + 1)


def _gram(h: float) -> np.ndarray:
    """int_0^h b(s) b(s)^T ds for b = (1, s, s^2/2)."""
    return np.array([
        [h, h ** 2 / 2, h ** 3 / 6],
        [h ** 2 / 2, h ** 3 / 3, h ** 4 / 8],
        [h ** 3 / 6, h ** 4 / 8, h ** 5 / 20],
    ])


def _zoh_states(u, h, x0, y0):
    y = np.empty(u.size + 1)
    x = np.empty(u.size + 1)
    y[0], x[0] = y0, x0
    y[1:] = y0 + h * np.cumsum(u)
    x[1:] = x0 + h * np.cumsum(y[:-1]) + 0.5 * h * h * np.cumsum(u)
    return x, y


def _tail_sum(v):
    # sum over k > j
    s = np.cumsum(v[::-1])[::-1]
    return np.append(s[1:], 0.0)


def _cost_grad(u, h, G, x0, y0):
    """Exact discrete cost and its gradient in the controls (adjoint by tail sums)."""
    x, y = _zoh_states(u, h, x0, y0)
    Z = np.column_stack([x[:-1], y[:-1], u])
    GZ = Z @ G
    cost = 0.5 * float(np.sum(GZ * Z))
    k = np.arange(u.size)
    s1 = _tail_sum(GZ[:, 0])
    s2 = _tail_sum(k * GZ[:, 0])
    grad = GZ[:, 2] + h * _tail_sum(GZ[:, 1]) + h * h * (s2 - (k + 0.5) * s1)
    return cost, grad


def _box_affine_projection(z, A, b, lam):
    """Euclidean projection onto {|u| <= 1, A u = b} through the 2-d dual."""
    scale = 1e-13 * (1.0 + float(np.abs(b).max()))
    for _ in range(60):
        v = z - A.T @ lam
        F = A @ np.clip(v, -1.0, 1.0) - b
        fn = float(np.linalg.norm(F))
        if fn <= scale:
            break
        Af = A[:, np.abs(v) < 1.0]
        step = np.linalg.lstsq(Af @ Af.T + 1e-14 * np.eye(2), F, rcond=None)[0]
        t = 1.0
        for _ in range(50):
            trial = lam + t * step
            if np.linalg.norm(A @ np.clip(z - A.T @ trial, -1.0, 1.0) - b) < fn:
                break
            t *= 0.5
        lam = trial
    return np.clip(z - A.T @ lam, -1.0, 1.0), lam


def collocation_cost(grid: CollocationGrid, tol: float = 1e-8, max_iter: int = 50_000) -> float:
    """Discrete optimal cost on a uniform zero-order-hold grid.

    States obey the exact double-integrator step per interval and the cost is
    the exact integral of x^2 on each interval, so every grid solution is a
    feasible control of the continuous problem and refining by doubling never
    increases the optimum.  After eliminating the states the problem is a
    convex quadratic in u over a box with two endpoint equalities; it is
    solved by accelerated projected gradient (with restarts) until the
    gradient mapping is below ``tol``.  Fills ``grid.u``, ``grid.x``, ``grid.y``.
    """
    n, h = grid.n, grid.h
    x0, y0 = map(float, grid.p0)
    x1, y1 = map(float, grid.p1)
    if x0 == y0 == x1 == y1 == 0.0:
        grid.u = np.zeros(n)
        grid.x = np.zeros(n + 1)
        grid.y = np.zeros(n + 1)
        return 0.0
    G = _gram(h)
    j = np.arange(n)
    A = np.vstack([np.full(n, h), h * h * (n - j - 0.5)])
    b = np.array([y1 - y0, x1 - x0 - n * h * y0])
    lam = np.zeros(2)
    u, lam = _box_affine_projection(np.zeros(n), A, b, lam)
    if np.abs(A @ u - b).max() > 1e-9 * (1.0 + np.abs(b).max()):
        raise ValueError("boundary data unreachable on this horizon")
    # Lipschitz constant of the gradient by power iteration (quadratic part only)
    v = np.random.default_rng(0).normal(size=n)
    L = 0.0
    for _ in range(60):
        _, gv = _cost_grad(v, h, G, 0.0, 0.0)
        L = float(np.linalg.norm(gv) / np.linalg.norm(v))
        v = gv / np.linalg.norm(gv)
    L *= 1.05
    yk, t = u.copy(), 1.0
    res = math.inf
    for _ in range(max_iter):
        _, g = _cost_grad(yk, h, G, x0, y0)
        un, lam = _box_affine_projection(yk - g / L, A, b, lam)
        res = L * float(np.abs(un - yk).max())
        if res <= tol:
            u = un
            break
        if float(g @ (un - u)) > 0.0:
            # momentum points uphill: restart from the last iterate
            yk, t = u.copy(), 1.0
            continue
        tn = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t * t))
        yk = un + ((t - 1.0) / tn) * (un - u)
        u, t = un, tn
    else:
        raise MaxIterations(f"projected gradient stopped at stationarity {res:.3g} > {tol:g}")
    grid.u = u
    xs, ys = _zoh_states(u, h, x0, y0)
    grid.x, grid.y = xs, ys
    parts = [arc_cost(PhasePoint(xs[k], ys[k]), u[k], h) for k in range(n)]
    return math.fsum(parts)


def comparison_report(analytic_cost: float, oracle_cost: float, n_or_switches: int, seed: int) -> dict:
    return {
        "analytic_cost": float(analytic_cost),
        "oracle_cost": float(oracle_cost),
        "gap": float(oracle_cost - analytic_cost),
        "n_or_switches": int(n_or_switches),
        "seed": int(seed),
    }
