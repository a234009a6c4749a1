from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import solve_ivp

from chatterlab import carnot as cg
from chatterlab import geodesy as geo
from chatterlab.polyfields import Poly, lie_bracket
from chatterlab.systems import carnot_fields, r4_fields
from strategies import rational_points

pts = rational_points(6)


@given(pts, pts, pts)
def test_group_axioms(a, b, c):
    assert cg.multiply(cg.multiply(a, b), c) == cg.multiply(a, cg.multiply(b, c))
    assert cg.multiply(a, cg.identity()) == tuple(a)
    assert cg.multiply(cg.identity(), a) == tuple(a)
    assert cg.multiply(a, cg.inverse(a)) == cg.identity()
    assert cg.multiply(cg.inverse(a), a) == cg.identity()


@given(pts)
def test_exp_log_round_trip(a):
    assert cg.log_coords(cg.exp_coords(a)) == tuple(a)
    assert cg.exp_coords(cg.log_coords(a)) == tuple(a)


@given(pts, pts, st.integers(1, 6).map(lambda k: Fraction(k, 3)))
def test_dilation_is_automorphism(a, b, lam):
    lhs = cg.dilate(lam, cg.multiply(a, b))
    assert lhs == cg.multiply(cg.dilate(lam, a), cg.dilate(lam, b))


def test_dilate_rejects_nonpositive():
    with pytest.raises(ValueError):
        cg.dilate(0, cg.identity())


def _flow(a):
    # integrate xi' = sum a_i g_i(xi) from the identity for unit time
    G = lambda t, x: cg.g_frame(x) @ np.asarray(a, dtype=float)
    sol = solve_ivp(G, (0, 1), np.zeros(6), method="DOP853", rtol=1e-13, atol=1e-14)
    return sol.y[:, -1]


@settings(max_examples=20)
@given(st.lists(st.floats(-1.5, 1.5), min_size=6, max_size=6))
def test_exp_matches_flow(a):
    np.testing.assert_allclose(cg.exp_coords(a), _flow(a), atol=1e-9)


def test_frame_matches_fields_and_projection():
    g = carnot_fields()
    f = r4_fields()
    x = (0.3, -0.7, 1.1, 0.2, 0.5, -0.4)
    G = cg.g_frame(x)
    for i in range(6):
        np.testing.assert_allclose(G[:, i], [float(v) for v in g[f"g{i + 1}"](x)])
    # d pi [g_i] = f_i o pi, exactly
    n = 6
    pi_polys = [-Poly.var(n, 2), Poly.var(n, 1), Poly.var(n, 5), Poly.var(n, 0)]
    for i in range(1, 7):
        gi = g[f"g{i}"]
        push = [gi.apply(p) for p in pi_polys]
        target = [c.compose(pi_polys) for c in f[f"f{i}"].components]
        assert push == target


def test_step_five_nilpotent():
    g = carnot_fields()
    layer = [g["g1"], g["g2"]]
    words = list(layer)
    for _ in range(4):
        words = [lie_bracket(a, w) for a in layer for w in words]
        words = [w for w in words if not w.is_zero()]
    assert words
    assert all(lie_bracket(a, w).is_zero() for a in layer for w in words)


@given(st.lists(st.floats(-2, 2), min_size=6, max_size=6), st.floats(-2, 2), st.floats(-2, 2))
def test_subfinsler_norm_on_distribution(x, a, b):
    G = cg.g_frame(x)
    xi = a * G[:, 0] + b * G[:, 1]
    assert cg.subfinsler_norm_G(x, xi) == pytest.approx(max(abs(a), abs(b)), abs=1e-9)
    eta = cg.eta_coords(x, xi)
    np.testing.assert_allclose(eta, [a, b, 0, 0, 0, 0], atol=1e-9)


@pytest.fixture(scope="module")
def pair():
    return geo.make_admissible_endpoint(1.0, 0.5, -0.3, 0.2, slack=0.5)


def test_horizontal_lift_projects(pair):
    x0 = (pair.q0.w, pair.q0.y, -pair.q0.x, 0.0, 0.0, pair.q0.z)
    c = cg.build_carnot_subfinsler_geodesic(x0, pair)
    assert c.projection_error() < 1e-9
    assert c.endpoint_projection_error() < 1e-8
    assert c.length == pytest.approx(pair.t1, abs=1e-9)
    assert len(c.rows(5)[0]) == 9


def test_lift_rejects_wrong_base(pair):
    with pytest.raises(ValueError):
        cg.build_carnot_subfinsler_geodesic((9, 9, 9, 0, 0, 0), pair)


def test_finsler_curve_unit_speed_and_endpoints(pair):
    c = cg.build_carnot_finsler_geodesic(1.0, 0.5, -0.3, 0.2, pair.q0.w, pair.q1.w,
                                         pair.q0.z, pair.q1.z)
    assert c.unit_speed_error() < 1e-9
    assert c.length() == pytest.approx(c.t1, abs=1e-9)
    np.testing.assert_allclose(c.curve.start(), c.x0, atol=1e-12)
    np.testing.assert_allclose(c.curve.end(), c.x1, atol=1e-9)
    # reached second coordinate is +y1
    assert c.x1[1] == pytest.approx(0.2)
    assert c.stated_x1[1] == pytest.approx(-0.2)
    assert c.x1[2:] == pytest.approx(c.stated_x1[2:])


@pytest.mark.parametrize("eps,tol", [(1e-10, 1e-8), (1e-12, 1e-10)])
def test_finsler_curve_is_horizontal_lift(eps, tol):
    # the gap is set by the residual velocity at the truncation radius
    pair = geo.make_admissible_endpoint(1.0, 0.5, -0.3, 0.2, 0.5, eps)
    c = cg.build_carnot_finsler_geodesic(1.0, 0.5, -0.3, 0.2, pair.q0.w, pair.q1.w,
                                         pair.q0.z, pair.q1.z, eps)
    lift = cg.build_carnot_subfinsler_geodesic(c.x0, pair, eps)
    ts = np.linspace(0, c.t1, 501)
    assert np.max(np.abs(lift.curve.sample(ts)[0] - c.curve.sample(ts)[0])) < tol


def test_finsler_inadmissible():
    with pytest.raises(geo.InadmissibleBoundary):
        cg.build_carnot_finsler_geodesic(1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0)
