"""Acceptance gate: criteria 1-9 at their stated tolerances and time budgets.

Each test prints one ``PASS``/``FAIL`` line.  Run directly with
``python3 tests/test_acceptance.py`` for the summary alone.
"""
import itertools
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from chatterlab import carnot as cg
from chatterlab import chatter as ch
from chatterlab import fuller as fl
from chatterlab import geodesy as geo
from chatterlab.oracle import CollocationGrid, bangbang_search, collocation_cost
from chatterlab.polyfields import Poly, PolyVectorField, lie_bracket
from chatterlab.polynorm import explicit_r4_finsler_norm
from chatterlab.systems import (builtin_system, carnot_fields, carnot_finsler_vnorm, r4_fields,
                                r4_finsler_vnorm)

SEED = 20240611


def _line(n, ok, detail, elapsed, budget):
    verdict = "PASS" if ok else "FAIL"
    return f"{verdict} criterion {n}: {detail} [{elapsed:.3g} s / budget {budget:g} s]"


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail, elapsed, budget):
        with capsys.disabled():
            print("\n" + _line(n, ok, detail, elapsed, budget))
        assert ok, _line(n, ok, detail, elapsed, budget)
    return emit


# ---------------------------------------------------------------------------

def criterion_1():
    fl.solve_mu()  # warm imports
    reps = 200
    t0 = time.perf_counter()
    for _ in range(reps):
        mu = fl.solve_mu()
    per_call = (time.perf_counter() - t0) / reps
    resid = abs(mu ** 4 - 3 * mu ** 3 - 4 * mu ** 2 - 3 * mu + 1)
    closed = abs(mu - 0.25 * (3 + math.sqrt(33) - math.sqrt(26 + 6 * math.sqrt(33))))
    ok = resid < 1e-12 and closed < 1e-12 and per_call < 1e-3
    return ok, f"mu={mu:.17g} residual={resid:.2g} |mu-closed|={closed:.2g}", per_call, 1e-3


def criterion_2():
    fl.fuller_constants()
    t0 = time.perf_counter()
    rng = np.random.default_rng(SEED)
    mu = fl.solve_mu()
    worst = 0.0
    for th in rng.uniform(0, 2 * np.pi, 20):
        s = math.sin(th)
        p = (math.cos(th), math.copysign(math.sqrt(abs(s)), s))
        ratios = fl.simulate(p).gap_ratios()
        # ratio k compares gaps k+1 and k+2, i.e. after switch k+2
        tail = ratios[4:]
        worst = max(worst, max(abs(r - mu) for r in tail))
    el = time.perf_counter() - t0
    ok = worst < 1e-6 and el < 1.0
    return ok, f"max |ratio - mu| after 5th switch = {worst:.2g} over 20 starts", el, 1.0


def criterion_3():
    t0 = time.perf_counter()
    rng = np.random.default_rng(SEED + 3)
    worst_t = worst_j = 0.0
    for _ in range(100):
        x, y = rng.uniform(-3, 3, 2)
        lam = rng.uniform(0.1, 5)
        t, j = fl.T_F(x, y), fl.J_F(x, y)
        worst_t = max(worst_t, abs(fl.T_F(lam ** 2 * x, lam * y) - lam * t) / (lam * t))
        worst_j = max(worst_j, abs(fl.J_F(lam ** 2 * x, lam * y) - lam ** 5 * j) / (lam ** 5 * j))
    el = time.perf_counter() - t0
    ok = worst_t < 1e-7 and worst_j < 1e-7 and el < 5
    return ok, f"max rel err T_F {worst_t:.2g}, J_F {worst_j:.2g}", el, 5


BOUNDARY_SETS = [((1.0, 0.0), (0.0, 0.0), 1.0),
                 ((0.5, -0.5), (0.0, 0.0), 0.5),
                 ((1.0, 0.5), (-0.3, 0.2), 1.0),
                 ((-0.2, 1.0), (0.4, -0.7), 0.25),
                 ((0.0, 0.0), (0.8, 0.3), 2.0)]


def criterion_4():
    t0 = time.perf_counter()
    worst_bb = -math.inf
    worst_col = 0.0
    for p0, p1, slack in BOUNDARY_SETS:
        t1 = fl.T_F(*p0) + fl.T_F(p1[0], -p1[1]) + slack
        ref = fl.solve_finite_time(p0, p1, t1).cost
        bb = bangbang_search(p0, p1, t1, max_switches=12, starts=50, seed=SEED)
        # positive means the analytic cost lost to the oracle
        worst_bb = max(worst_bb, ref - bb.cost)
        col = collocation_cost(CollocationGrid(2000, p0, p1, t1))
        worst_col = max(worst_col, abs(col - ref) / ref)
    el = time.perf_counter() - t0
    ok = worst_bb <= 1e-6 and worst_col < 0.01 and el < 120
    return ok, (f"max(analytic - bangbang) = {worst_bb:.2g}, "
                f"max collocation rel gap = {worst_col:.2g} on 5 sets"), el, 120


def _jacobi_zero(fs):
    for a, b, c in itertools.combinations(fs, 3):
        s = (lie_bracket(a, lie_bracket(b, c)) + lie_bracket(b, lie_bracket(c, a))
             + lie_bracket(c, lie_bracket(a, b)))
        if not s.is_zero():
            return False
    return True


def criterion_5():
    t0 = time.perf_counter()
    r4 = builtin_system("r4")
    carnot = builtin_system("carnot")
    f_ok = all(r["holds"] for r in r4.check_table())
    g_ok = all(r["holds"] for r in carnot.check_table())
    g = carnot_fields()
    layer = [g["g1"], g["g2"]]
    words = list(layer)
    for _ in range(4):
        words = [lie_bracket(a, w) for a in layer for w in words]
    nonzero5 = any(not w.is_zero() for w in words)
    words6 = [lie_bracket(a, w) for a in layer for w in words]
    nil = nonzero5 and all(w.is_zero() for w in words6)
    jac = _jacobi_zero(list(g.values())) and _jacobi_zero(list(r4_fields().values()))
    el = time.perf_counter() - t0
    ok = f_ok and g_ok and nil and jac and el < 5
    detail = (f"f-table {f_ok}, g-table {g_ok}, step-5 nilpotent {nil} "
              f"({len(words6)} length-6 words vanish), Jacobi {jac}")
    return ok, detail, el, 5


def _rand_rational(rng, n=6):
    return tuple(Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 6))) for _ in range(n))


def criterion_6():
    from scipy.integrate import solve_ivp
    t0 = time.perf_counter()
    rng = np.random.default_rng(SEED + 6)
    e = cg.identity()
    axioms = True
    roundtrip = True
    for _ in range(100):
        a, b, c = (_rand_rational(rng) for _ in range(3))
        axioms &= cg.multiply(cg.multiply(a, b), c) == cg.multiply(a, cg.multiply(b, c))
        axioms &= cg.multiply(a, e) == a and cg.multiply(e, a) == a
        axioms &= cg.multiply(a, cg.inverse(a)) == e and cg.multiply(cg.inverse(a), a) == e
        roundtrip &= cg.log_coords(cg.exp_coords(a)) == a and cg.exp_coords(cg.log_coords(a)) == a
    flow_err = 0.0
    for _ in range(10):
        a = rng.uniform(-1.5, 1.5, 6)
        sol = solve_ivp(lambda t, x: cg.g_frame(x) @ a, (0, 1), np.zeros(6), method="DOP853",
                        rtol=1e-13, atol=1e-14)
        flow_err = max(flow_err, float(np.max(np.abs(np.array(cg.exp_coords(a)) - sol.y[:, -1]))))
    n = 6
    pi = [-Poly.var(n, 2), Poly.var(n, 1), Poly.var(n, 5), Poly.var(n, 0)]
    g, f = carnot_fields(), r4_fields()
    push = all([g[f"g{i}"].apply(p) for p in pi] == [c.compose(pi) for c in f[f"f{i}"].components]
               for i in range(1, 7))
    el = time.perf_counter() - t0
    ok = axioms and roundtrip and flow_err < 1e-9 and push and el < 10
    detail = (f"axioms {axioms}, exp/log {roundtrip}, exp vs flow {flow_err:.2g}, "
              f"dpi[g_i] = f_i o pi {push}")
    return ok, detail, el, 10


def criterion_7():
    t0 = time.perf_counter()
    rng = np.random.default_rng(SEED + 7)
    vr4, vg = r4_finsler_vnorm(), carnot_finsler_vnorm()
    err_r4 = err_g = 0.0
    for _ in range(1000):
        q, xi = rng.uniform(-3, 3, 4), rng.uniform(-3, 3, 4)
        err_r4 = max(err_r4, abs(vr4(q, xi) - explicit_r4_finsler_norm(q, xi)))
        x, zeta = rng.uniform(-3, 3, 6), rng.uniform(-3, 3, 6)
        err_g = max(err_g, abs(vg(x, zeta) - cg.finsler_norm_G(x, zeta)))
    el = time.perf_counter() - t0
    ok = err_r4 < 1e-9 and err_g < 1e-9 and el < 30
    return ok, f"max |LP - explicit| R^4 {err_r4:.2g}, G {err_g:.2g} (1000 samples each)", el, 30


GEODESIC_DATA = [(1.0, 0.0, 0.0, 0.0, 1.0),
                 (1.0, 0.5, -0.3, 0.2, 0.5),
                 (-0.4, 0.8, 0.6, 0.0, 0.0)]


def criterion_8():
    t0 = time.perf_counter()
    end_err = len_err = speed_err = 0.0
    worst_gap = math.inf
    for x0, y0, x1, y1, slack in GEODESIC_DATA:
        pair = geo.make_admissible_endpoint(x0, y0, x1, y1, slack)
        sub = geo.build_subfinsler_geodesic(pair)
        fin = geo.build_finsler_geodesic(pair)
        end_err = max(end_err, sub.endpoint_error(), fin.endpoint_error())
        len_err = max(len_err, abs(sub.length - pair.t1),
                      *(abs(v - pair.t1) for v in fin.lengths.values()))
        xg0 = (pair.q0.w, pair.q0.y, -pair.q0.x, 0.0, 0.0, pair.q0.z)
        lift = cg.build_carnot_subfinsler_geodesic(xg0, pair)
        end_err = max(end_err, lift.endpoint_projection_error())
        len_err = max(len_err, abs(lift.length - pair.t1))
        hat = cg.build_carnot_finsler_geodesic(x0, y0, x1, y1, pair.q0.w, pair.q1.w,
                                               pair.q0.z, pair.q1.z)
        speed_err = max(speed_err, hat.unit_speed_error())
        len_err = max(len_err, abs(hat.length() - hat.t1))
        end_err = max(end_err, float(np.max(np.abs(hat.curve.end() - np.array(hat.x1)))),
                      float(np.max(np.abs(hat.curve.start() - np.array(hat.x0)))))
        if y1 == 0.0:
            end_err = max(end_err, float(np.max(np.abs(hat.curve.end() - np.array(hat.stated_x1)))))
        adv = geo.adversarial_length_check(pair, samples=200, seed=SEED)
        worst_gap = min(worst_gap, adv.min_gap)
    el = time.perf_counter() - t0
    ok = end_err < 1e-8 and len_err < 1e-9 and speed_err < 1e-9 and worst_gap > -1e-6 and el < 120
    detail = (f"endpoint err {end_err:.2g}, length err {len_err:.2g}, unit-speed err "
              f"{speed_err:.2g}, min competitor gap {worst_gap:.2g} (200 samples x 3 pairs)")
    return ok, detail, el, 120


def _random_field(rng, n=3):
    comps = []
    for _ in range(n):
        terms = {}
        for _ in range(int(rng.integers(0, 4))):
            exps = tuple(int(v) for v in rng.integers(0, 3, n))
            terms[exps] = Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 4)))
        comps.append(Poly(n, terms))
    return PolyVectorField(comps)


def criterion_9():
    t0 = time.perf_counter()
    r4 = builtin_system("r4")
    gens = list(r4.vertices)
    try:
        ch.find_fuller_covector(gens, (0, 1), ch.compute_bundle(gens[0], gens[1], (0, 0, 0, 0)))
        too_small = False
    except ch.DimensionTooSmall:
        too_small = True
    d9 = builtin_system("demo9")
    gens = list(d9.vertices)
    x0 = (0,) * 9
    cert = ch.find_fuller_covector(gens, (0, 1), ch.compute_bundle(gens[0], gens[1], x0), x0)
    rev = ch.reverify_certificate(cert, gens)
    cert_ok = (rev["all"] and cert.orthogonality_residual < 1e-9 and cert.separation_margin > 0
               and cert.beta_pairing == -1)
    rng = np.random.default_rng(SEED + 9)
    poisson = all(ch.check_poisson_identity(_random_field(rng), _random_field(rng))
                  for _ in range(20))
    el = time.perf_counter() - t0
    ok = too_small and cert_ok and poisson and el < 10
    detail = (f"r4 DimensionTooSmall {too_small}, demo9 certificate {cert_ok} "
              f"(beta pairing {cert.beta_pairing:g}, margin {cert.separation_margin:g}), "
              f"Poisson/Lie on 20 pairs {poisson}")
    return ok, detail, el, 10


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9]


@pytest.mark.parametrize("n", range(1, 10))
def test_criterion(n, report):
    ok, detail, el, budget = CRITERIA[n - 1]()
    report(n, ok, detail, el, budget)


if __name__ == "__main__":
    for i, crit in enumerate(CRITERIA, 1):
        print(_line(i, *crit()))
