import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from chatterlab import carnot as cg
from chatterlab.curves import CurvePiece, PiecewiseCurve, poly
from chatterlab.polynorm import (DegenerateBall, InfiniteLength, VNorm, curve_length,
                                 explicit_r4_finsler_norm, interior_margin,
                                 minkowski_from_vertices, minkowski_norm)
from chatterlab.polyfields import parse_field
from chatterlab.systems import (carnot_finsler_vnorm, r4_dual_norm, r4_fields, r4_finsler_vnorm,
                                r4_subfinsler_vnorm)

real = st.floats(-3, 3, allow_nan=False)
vec4 = st.lists(real, min_size=4, max_size=4).map(np.array)
vec6 = st.lists(real, min_size=6, max_size=6).map(np.array)


def test_square_ball():
    V = np.array([[1, 1, -1, -1], [1, -1, 1, -1]], dtype=float)
    assert minkowski_from_vertices(V, [0.5, -0.25]) == pytest.approx(0.5)
    assert minkowski_from_vertices(V, [0, 0]) == 0.0
    assert interior_margin(V) > 0


def test_outside_span_is_infinite():
    V = np.array([[1, -1], [0, 0]], dtype=float)
    assert math.isinf(minkowski_from_vertices(V, [0, 1]))


def test_degenerate_ball_detected():
    # 0 on the boundary of a triangle
    norm = VNorm([parse_field("1, 0", ("x", "y")), parse_field("0, 1", ("x", "y")),
                  parse_field("-1, 0", ("x", "y"))])
    with pytest.raises(DegenerateBall):
        minkowski_norm(norm, (0, 0), (1, 1))


@given(vec4, vec4)
def test_r4_finsler_lp_vs_explicit(q, xi):
    lp = r4_finsler_vnorm()(q, xi)
    assert lp == pytest.approx(explicit_r4_finsler_norm(q, xi), abs=1e-9, rel=1e-9)


@given(vec6, vec6)
def test_carnot_finsler_lp_vs_explicit(x, xi):
    lp = carnot_finsler_vnorm()(x, xi)
    assert lp == pytest.approx(cg.finsler_norm_G(x, xi), abs=1e-9, rel=1e-9)


@given(vec4, real, real)
def test_subfinsler_v_and_h_agree(q, a, b):
    f = r4_fields()
    xi = a * np.array([float(v) for v in f["f1"](q)]) + b * np.array([float(v) for v in f["f2"](q)])
    v = r4_subfinsler_vnorm()(q, xi)
    h = r4_dual_norm()(q, xi)
    assert v == pytest.approx(max(abs(a), abs(b)), abs=1e-9)
    assert h == pytest.approx(v, abs=1e-9)


@given(vec4)
def test_subfinsler_infinite_off_distribution(q):
    xi = np.array([0.0, 0.0, 1.0, 0.0])
    assert math.isinf(r4_subfinsler_vnorm()(q, xi))
    assert math.isinf(r4_dual_norm()(q, xi))


@given(vec4, vec4, st.floats(0, 10))
def test_positive_homogeneity(q, xi, lam):
    n = r4_finsler_vnorm()
    assert n(q, lam * xi) == pytest.approx(lam * n(q, xi), rel=1e-9, abs=1e-9)


@given(vec4, vec4, vec4)
def test_triangle_inequality(q, a, b):
    n = r4_finsler_vnorm()
    assert n(q, a + b) <= n(q, a) + n(q, b) + 1e-9


def test_curve_length_constant_speed_and_quadrature():
    # unit-speed segment along f2 at the origin
    piece = CurvePiece(0.0, 2.0, (poly([0]), poly([0, 1]), poly([0]), poly([0])), (0.0, 1.0))
    curve = PiecewiseCurve((piece,), constant_speed=True)
    assert curve_length(r4_subfinsler_vnorm(), curve) == pytest.approx(2.0)
    slow = PiecewiseCurve((piece,), constant_speed=False)
    assert curve_length(explicit_r4_finsler_norm, slow) == pytest.approx(2.0, rel=1e-12)


def test_curve_length_infinite():
    piece = CurvePiece(0.0, 1.0, (poly([0]), poly([0]), poly([0, 1]), poly([0])), (0.0, 0.0))
    with pytest.raises(InfiniteLength):
        curve_length(r4_subfinsler_vnorm(), PiecewiseCurve((piece,), constant_speed=True))
