"""Dense two-phase primal simplex with Bland's rule.

Problems here have at most a few dozen columns, so a plain tableau is enough.
Passing ``exact=True`` pivots in rational arithmetic.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

__all__ = ["LPResult", "linprog"]


@dataclass
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: list | None
    fun: float | Fraction | None
    phase1_residual: float = 0.0

    @property
    def success(self) -> bool:
        return self.status == "optimal"


def _pivot(T, row, col):
    pr = T[row]
    pv = pr[col]
    T[row] = pr = [v / pv for v in pr]
    for r in range(len(T)):
        if r != row:
            f = T[r][col]
            if f != 0:
                Tr = T[r]
                T[r] = [a - f * b for a, b in zip(Tr, pr)]


def _run(T, basis, ncols, tol, max_iter):
    """Minimise the objective stored in the last row of T (reduced costs)."""
    obj = T[-1]
    for _ in range(max_iter):
        obj = T[-1]
        col = next((j for j in range(ncols) if obj[j] < -tol), None)
        if col is None:
            return "optimal"
        best = None
        for r in range(len(T) - 1):
            a = T[r][col]
            if a > tol:
                ratio = T[r][-1] / a
                key = (ratio, basis[r])
                if best is None or key < best[0]:
                    best = (key, r)
        if best is None:
            return "unbounded"
        r = best[1]
        _pivot(T, r, col)
        basis[r] = col
    raise RuntimeError("simplex iteration limit reached")


def linprog(c: Sequence, A_eq: Sequence[Sequence] = (), b_eq: Sequence = (),
            A_ub: Sequence[Sequence] = (), b_ub: Sequence = (), *,
            exact: bool = False, tol: float = 1e-11, feas_tol: float = 1e-9,
            max_iter: int = 5000) -> LPResult:
    """Minimise c.x subject to A_eq x = b_eq, A_ub x <= b_ub and x >= 0."""
    conv = (lambda v: Fraction(v)) if exact else float
    if exact:
        tol = feas_tol = 0
    n = len(c)
    rows, rhs = [], []
    n_ub = len(A_ub)
    for i, (a, b) in enumerate(zip(A_ub, b_ub)):
        slack = [0] * n_ub
        slack[i] = 1
        rows.append([conv(v) for v in a] + [conv(s) for s in slack])
        rhs.append(conv(b))
    for a, b in zip(A_eq, b_eq):
        rows.append([conv(v) for v in a] + [conv(0)] * n_ub)
        rhs.append(conv(b))
    m = len(rows)
    nx = n + n_ub
    for i in range(m):
        if rhs[i] < 0:
            rows[i] = [-v for v in rows[i]]
            rhs[i] = -rhs[i]
    # phase I: one artificial per row
    zero, one = conv(0), conv(1)
    T = []
    for i in range(m):
        art = [zero] * m
        art[i] = one
        T.append(rows[i] + art + [rhs[i]])
    ncols = nx + m
    phase1 = [zero] * nx + [one] * m + [zero]
    for i in range(m):
        phase1 = [a - b for a, b in zip(phase1, T[i])]
    T.append(phase1)
    basis = [nx + i for i in range(m)]
    _run(T, basis, ncols, tol, max_iter)
    infeas = -T[-1][-1]
    scale = max([1.0] + [abs(float(v)) for v in rhs])
    if infeas > feas_tol * scale:
        return LPResult("infeasible", None, None, float(infeas))
    # drive remaining artificials out of the basis
    for r in range(m):
        if basis[r] >= nx:
            col = next((j for j in range(nx) if abs(T[r][j]) > tol), None)
            if col is not None:
                _pivot(T, r, col)
                basis[r] = col
    keep = [r for r in range(m) if basis[r] < nx]
    T2 = [T[r][:nx] + [T[r][-1]] for r in keep]
    basis2 = [basis[r] for r in keep]
    cvec = [conv(v) for v in c] + [zero] * n_ub
    obj = cvec + [zero]
    for r, b in enumerate(basis2):
        cb = cvec[b]
        if cb != 0:
            obj = [a - cb * v for a, v in zip(obj, T2[r])]
    T2.append(obj)
    status = _run(T2, basis2, nx, tol, max_iter)
    if status == "unbounded":
        return LPResult("unbounded", None, None, float(infeas))
    x = [zero] * nx
    for r, b in enumerate(basis2):
        x[b] = T2[r][-1]
    x = x[:n]
    if not exact:
        x = [max(v, 0.0) for v in x]
    fun = sum((cv * xv for cv, xv in zip(cvec, x)), zero)
    return LPResult("optimal", x, fun, float(infeas))


def as_array(res: LPResult) -> np.ndarray:
    return np.array([float(v) for v in res.x])
