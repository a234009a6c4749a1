import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chatterlab import _kernels_py, kernels

compiled = pytest.importorskip("chatterlab._kernels")

durations = st.lists(st.floats(0, 2), min_size=1, max_size=8)
real = st.floats(-2, 2, allow_nan=False)


def test_backend_selected():
    assert kernels.BACKEND in ("cython", "python")


@given(real, real, durations)
def test_arc_chain_agree(x, y, ds):
    controls = np.array([(-1.0) ** i for i in range(len(ds))])
    d = np.array(ds)
    a = _kernels_py.arc_chain(x, y, controls, d)
    b = compiled.arc_chain(x, y, controls, d)
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-14)


@given(real, real)
def test_landing_agree_and_lands(x, y):
    a = _kernels_py.landing(x, y)
    b = compiled.landing(x, y)
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-14)
    u, d1, d2 = b
    end = compiled.arc_chain(x, y, np.array([u, -u]), np.array([d1, d2]))
    assert abs(end[0]) < 1e-9 and abs(end[1]) < 1e-9


@settings(max_examples=25)
@given(st.integers(0, 1000))
def test_descent_and_propagation_agree(seed):
    rng = np.random.default_rng(seed)
    p = np.array([rng.uniform(-1, 1), rng.uniform(-1, 1), 1.0, 0.0, 0.0, 1.0, 1.0, 0.0])
    d0 = rng.uniform(0, 1, 4)
    w = np.array([1e2, 1e4])
    a = _kernels_py.coordinate_descent(p, d0, 4, 6.0, w, 2, 12, 1.0)
    b = compiled.coordinate_descent(p, d0, 4, 6.0, w, 2, 12, 1.0)
    np.testing.assert_allclose(np.asarray(a[1]), np.asarray(b[1]), rtol=1e-9, atol=1e-12)
    us, vs = rng.uniform(-1, 1, 6), rng.uniform(-1, 1, 6)
    s = rng.normal(size=4)
    ea, ja = _kernels_py.propagate_uv(s, us, vs, 0.3, True)
    eb, jb = compiled.propagate_uv(s, us, vs, 0.3, True)
    np.testing.assert_allclose(ea, eb, rtol=1e-12, atol=1e-14)
    np.testing.assert_allclose(ja, jb, rtol=1e-12, atol=1e-14)


def test_jacobian_matches_finite_differences():
    rng = np.random.default_rng(1)
    us, vs = rng.uniform(-0.8, 0.8, 5), rng.uniform(-0.8, 0.8, 5)
    s = np.array([0.3, -0.2, 0.1, 0.0])
    end, jac = kernels.propagate_uv(s, us, vs, 0.4, True)
    h = 1e-6
    for k in range(5):
        up = us.copy(); up[k] += h
        dn = us.copy(); dn[k] -= h
        fd = (kernels.propagate_uv(s, up, vs, 0.4)[0] - kernels.propagate_uv(s, dn, vs, 0.4)[0]) / (2 * h)
        np.testing.assert_allclose(np.asarray(jac)[:, k], fd, atol=1e-7)


def test_pure_env_forces_fallback():
    import os
    import subprocess
    import sys
    env = dict(os.environ, CHATTERLAB_PURE="1")
    out = subprocess.run([sys.executable, "-c", "from chatterlab import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
