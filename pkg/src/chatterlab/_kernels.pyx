# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot loops in ``_kernels_py``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs

cnp.import_array()

cdef double GOLDEN = 0.6180339887498949


cdef inline void _arc(double* x, double* y, double u, double d, double* cost) noexcept nogil:
    cdef double c = 0.5 * u
    cdef double d2 = d * d
    cdef double d3 = d2 * d
    cdef double xx = x[0]
    cdef double yy = y[0]
    cost[0] += 0.5 * (xx * xx * d + xx * yy * d2 + (yy * yy + 2.0 * xx * c) * d3 / 3.0
                      + yy * c * d2 * d2 / 2.0 + c * c * d3 * d2 / 5.0)
    x[0] = xx + yy * d + c * d2
    y[0] = yy + u * d


def arc_chain(double x, double y, controls, durations):
    cdef double[:] us = np.ascontiguousarray(controls, dtype=np.float64)
    cdef double[:] ds = np.ascontiguousarray(durations, dtype=np.float64)
    cdef double cost = 0.0
    cdef Py_ssize_t i
    for i in range(us.shape[0]):
        _arc(&x, &y, us[i], ds[i], &cost)
    return x, y, cost


cdef inline void _landing(double x, double y, double* u, double* d1, double* d2) noexcept nogil:
    cdef double s = x + 0.5 * y * fabs(y)
    cdef double X, r
    if s > 0.0 or (s == 0.0 and y > 0.0):
        X = x + 0.5 * y * y
        r = sqrt(X) if X > 0.0 else 0.0
        u[0] = -1.0
        d1[0] = y + r if y + r > 0.0 else 0.0
        d2[0] = r
    else:
        X = -x + 0.5 * y * y
        r = sqrt(X) if X > 0.0 else 0.0
        u[0] = 1.0
        d1[0] = -y + r if -y + r > 0.0 else 0.0
        d2[0] = r


def landing(double x, double y):
    cdef double u, d1, d2
    _landing(x, y, &u, &d1, &d2)
    return u, d1, d2


cdef inline void _block(double x, double y, double s, double* d, Py_ssize_t n,
                        double* t, double* cost) noexcept nogil:
    cdef double u = s
    cdef double ul, d1, d2
    cdef Py_ssize_t i
    t[0] = 0.0
    cost[0] = 0.0
    for i in range(n):
        _arc(&x, &y, u, d[i], cost)
        t[0] += d[i]
        u = -u
    _landing(x, y, &ul, &d1, &d2)
    _arc(&x, &y, ul, d1, cost)
    _arc(&x, &y, -ul, d2, cost)
    t[0] += d1 + d2


cdef double _objective(double* p, double* d, Py_ssize_t n, Py_ssize_t kf, double t1,
                       double weight, double* cost_out, double* over_out) noexcept nogil:
    cdef double tf = 0.0, jf = 0.0, tb = 0.0, jb = 0.0, over
    if p[6] != 0.0:
        _block(p[0], p[1], p[2], d, kf, &tf, &jf)
    if p[7] != 0.0:
        _block(p[3], p[4], p[5], d + kf, n - kf, &tb, &jb)
    over = tf + tb - t1
    if over < 0.0:
        over = 0.0
    cost_out[0] = jf + jb
    over_out[0] = over
    return jf + jb + weight * over * over


def candidate_objective(p, d, Py_ssize_t kf, double t1, double weight):
    cdef double[:] pv = np.ascontiguousarray(p, dtype=np.float64)
    cdef double[:] dv = np.ascontiguousarray(d, dtype=np.float64)
    cdef double cost, over, obj
    cdef double dummy = 0.0
    cdef double* dp = &dummy
    if dv.shape[0] > 0:
        dp = &dv[0]
    obj = _objective(&pv[0], dp, dv.shape[0], kf, t1, weight, &cost, &over)
    return obj, cost, over


def coordinate_descent(p, d0, Py_ssize_t kf, double t1, weights, int sweeps,
                       int golden_iters, double hi_scale):
    cdef double[:] pv = np.ascontiguousarray(p, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.array(d0, dtype=np.float64)
    cdef double[:] wv = np.ascontiguousarray(weights, dtype=np.float64)
    cdef Py_ssize_t n = out.shape[0]
    cdef double* d = <double*> out.data
    cdef double* pp = &pv[0]
    cdef double best, keep, a, b, c1, c2, f1, f2, f0, trial, ft, w, cst, ovr
    cdef Py_ssize_t i, r, sweep, it
    cdef bint improved
    with nogil:
        for r in range(wv.shape[0]):
            w = wv[r]
            best = _objective(pp, d, n, kf, t1, w, &cst, &ovr)
            for sweep in range(sweeps):
                improved = False
                for i in range(n):
                    keep = d[i]
                    a = 0.0
                    b = 2.0 * keep + hi_scale
                    c1 = b - GOLDEN * (b - a)
                    c2 = a + GOLDEN * (b - a)
                    d[i] = c1
                    f1 = _objective(pp, d, n, kf, t1, w, &cst, &ovr)
                    d[i] = c2
                    f2 = _objective(pp, d, n, kf, t1, w, &cst, &ovr)
                    for it in range(golden_iters):
                        if f1 <= f2:
                            b = c2
                            c2 = c1
                            f2 = f1
                            c1 = b - GOLDEN * (b - a)
                            d[i] = c1
                            f1 = _objective(pp, d, n, kf, t1, w, &cst, &ovr)
                        else:
                            a = c1
                            c1 = c2
                            f1 = f2
                            c2 = a + GOLDEN * (b - a)
                            d[i] = c2
                            f2 = _objective(pp, d, n, kf, t1, w, &cst, &ovr)
                    if f1 <= f2:
                        trial = c1
                        ft = f1
                    else:
                        trial = c2
                        ft = f2
                    d[i] = 0.0
                    f0 = _objective(pp, d, n, kf, t1, w, &cst, &ovr)
                    if f0 < ft:
                        trial = 0.0
                        ft = f0
                    if ft < best:
                        d[i] = trial
                        if best - ft > 1e-15 * (1.0 + fabs(best)):
                            improved = True
                        best = ft
                    else:
                        d[i] = keep
                if not improved:
                    break
    return out


def propagate_uv(state, us_in, vs_in, double h, bint want_jac=False):
    cdef double[:] us = np.ascontiguousarray(us_in, dtype=np.float64)
    cdef double[:] vs = np.ascontiguousarray(vs_in, dtype=np.float64)
    cdef Py_ssize_t n = us.shape[0]
    cdef double x = float(state[0]), y = float(state[1]), z = float(state[2]), w = float(state[3])
    cdef double h2 = h * h, h3 = h2 * h
    cdef double h4 = h2 * h2, h5 = h3 * h2
    cdef double u, v, a, b, c, I, Ia, Ib, Ic
    cdef Py_ssize_t k, i, j
    cdef cnp.ndarray[cnp.float64_t, ndim=2] hist
    cdef cnp.ndarray[cnp.float64_t, ndim=2] jac
    cdef double M[4][4]
    cdef double S[4][4]
    cdef double T[4][4]
    cdef double du[4]
    cdef double dv[4]
    if want_jac:
        hist = np.empty((n, 2))
    for k in range(n):
        u = us[k]
        v = vs[k]
        if want_jac:
            hist[k, 0] = x
            hist[k, 1] = y
        b = v * y
        c = 0.5 * v * u
        I = x * x * h + x * b * h2 + (b * b + 2.0 * x * c) * h3 / 3.0 + b * c * h4 / 2.0 + c * c * h5 / 5.0
        z += 0.5 * v * I
        x += v * (y * h + 0.5 * u * h2)
        y += u * h
        w += v * h
    end = np.array([x, y, z, w])
    if not want_jac:
        return end, None
    jac = np.zeros((4, 2 * n))
    for i in range(4):
        for j in range(4):
            M[i][j] = 1.0 if i == j else 0.0
    for k in range(n - 1, -1, -1):
        x = hist[k, 0]
        y = hist[k, 1]
        u = us[k]
        v = vs[k]
        a = x
        b = v * y
        c = 0.5 * v * u
        I = a * a * h + a * b * h2 + (b * b + 2.0 * a * c) * h3 / 3.0 + b * c * h4 / 2.0 + c * c * h5 / 5.0
        Ia = 2.0 * a * h + b * h2 + 2.0 * c * h3 / 3.0
        Ib = a * h2 + 2.0 * b * h3 / 3.0 + c * h4 / 2.0
        Ic = 2.0 * a * h3 / 3.0 + b * h4 / 2.0 + 2.0 * c * h5 / 5.0
        du[0] = 0.5 * v * h2
        du[1] = h
        du[2] = 0.25 * v * v * Ic
        du[3] = 0.0
        dv[0] = y * h + 0.5 * u * h2
        dv[1] = 0.0
        dv[2] = 0.5 * I + 0.5 * v * (Ib * y + Ic * 0.5 * u)
        dv[3] = h
        for i in range(4):
            jac[i, k] = M[i][0] * du[0] + M[i][1] * du[1] + M[i][2] * du[2] + M[i][3] * du[3]
            jac[i, n + k] = M[i][0] * dv[0] + M[i][1] * dv[1] + M[i][2] * dv[2] + M[i][3] * dv[3]
        for i in range(4):
            for j in range(4):
                S[i][j] = 1.0 if i == j else 0.0
        S[0][1] = v * h
        S[2][0] = 0.5 * v * Ia
        S[2][1] = 0.5 * v * v * Ib
        for i in range(4):
            for j in range(4):
                T[i][j] = M[i][0] * S[0][j] + M[i][1] * S[1][j] + M[i][2] * S[2][j] + M[i][3] * S[3][j]
        for i in range(4):
            for j in range(4):
                M[i][j] = T[i][j]
    return end, jac
