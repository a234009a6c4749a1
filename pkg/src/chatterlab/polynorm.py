"""Polyhedral (sub-)Finsler norms.

Two representations are kept apart on purpose: a V-norm is the Minkowski
functional of conv(f_i(x)); an H-norm is max_j lambda_j[xi] on the subspace
cut out by the constraint forms zeta_i.  They need not agree for smoothly
varying data, so nothing converts between them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad

from .curves import PiecewiseCurve
from .polyfields import Poly, PolyVectorField, evaluate
from .simplex import linprog

__all__ = [
    "VNorm",
    "HNorm",
    "PolyForm",
    "DegenerateBall",
    "InfiniteLength",
    "minkowski_norm",
    "minkowski_from_vertices",
    "interior_margin",
    "dual_norm",
    "curve_length",
    "explicit_r4_finsler_norm",
    "DELTA_TOL",
]

DELTA_TOL = 1e-10


class DegenerateBall(ValueError):
    """0 is not in the relative interior of the generator hull."""


class InfiniteLength(ValueError):
    pass


class PolyForm:
    """A 1-form sum_i a_i(x) dx_i with polynomial coefficients."""

    def __init__(self, coefficients: Sequence[Poly]):
        self.coefficients = tuple(coefficients)

    @property
    def dimension(self) -> int:
        return len(self.coefficients)

    def at(self, x) -> np.ndarray:
        return np.array([float(c.evaluate(x)) for c in self.coefficients])

    def pair(self, x, xi) -> float:
        return float(np.dot(self.at(x), np.asarray(xi, dtype=float)))

    @classmethod
    def constant(cls, coeffs: Sequence) -> "PolyForm":
        n = len(coeffs)
        return cls([Poly.const(n, c) for c in coeffs])


def interior_margin(vertices: np.ndarray) -> float:
    """Largest t with 0 = sum w_i v_i, sum w_i = 1, all w_i >= t.

    Positive exactly when 0 lies in the relative interior of conv(v_i).
    ``vertices`` has one vertex per column.
    """
    n, N = vertices.shape
    # variables w' = w - t >= 0 and t >= 0:  V w' + (V 1) t = 0,  1.w' + N t = 1
    A = np.zeros((n + 1, N + 1))
    A[:n, :N] = vertices
    A[:n, N] = vertices.sum(axis=1)
    A[n, :N] = 1.0
    A[n, N] = N
    b = np.zeros(n + 1)
    b[n] = 1.0
    c = np.zeros(N + 1)
    c[N] = -1.0
    res = linprog(c, A, b)
    if not res.success:
        return -math.inf
    return float(res.x[N])


def minkowski_from_vertices(vertices: np.ndarray, xi, feas_tol: float = DELTA_TOL) -> float:
    """min sum c_i  s.t.  V c = xi, c >= 0; +inf when infeasible."""
    xi = np.asarray(xi, dtype=float)
    if not np.any(xi):
        return 0.0
    N = vertices.shape[1]
    res = linprog(np.ones(N), vertices, xi, feas_tol=feas_tol)
    if res.status == "infeasible":
        return math.inf
    if not res.success:
        raise DegenerateBall("Minkowski LP is unbounded; 0 is not inside the ball")
    return float(res.fun)


@dataclass(frozen=True)
class VNorm:
    generators: tuple

    def __init__(self, generators: Sequence[PolyVectorField]):
        object.__setattr__(self, "generators", tuple(generators))
        dims = {g.dimension for g in self.generators}
        if len(dims) != 1:
            raise ValueError("generators must share a dimension")

    @property
    def dimension(self) -> int:
        return self.generators[0].dimension

    def vertices(self, x) -> np.ndarray:
        return np.array([[float(v) for v in evaluate(g, x)] for g in self.generators]).T

    def __call__(self, x, xi) -> float:
        return minkowski_norm(self, x, xi)


def minkowski_norm(norm: VNorm, x, xi, check_interior: bool = True) -> float:
    V = norm.vertices(x)
    if check_interior and interior_margin(V) <= 1e-12:
        raise DegenerateBall(f"0 is not in the relative interior of B_1 at {x}")
    return minkowski_from_vertices(V, xi)


@dataclass(frozen=True)
class HNorm:
    bounding_forms: tuple
    constraint_forms: tuple

    def __init__(self, bounding_forms: Sequence[PolyForm], constraint_forms: Sequence[PolyForm] = ()):
        object.__setattr__(self, "bounding_forms", tuple(bounding_forms))
        object.__setattr__(self, "constraint_forms", tuple(constraint_forms))

    def in_distribution(self, x, xi, tol: float = DELTA_TOL) -> bool:
        xi = np.asarray(xi, dtype=float)
        bound = tol * (1.0 + float(np.linalg.norm(xi)))
        return all(abs(z.pair(x, xi)) <= bound for z in self.constraint_forms)

    def __call__(self, x, xi) -> float:
        return dual_norm(self, x, xi)


def dual_norm(norm: HNorm, x, xi) -> float:
    if not norm.in_distribution(x, xi):
        return math.inf
    if not np.any(np.asarray(xi, dtype=float)):
        return 0.0
    return max(lam.pair(x, xi) for lam in norm.bounding_forms)


def explicit_r4_finsler_norm(q, xi) -> float:
    """Hyperoctahedron norm on R^4 with vertices +-f1+-f2, +-f3, +-f6."""
    x, y = float(q[0]), float(q[1])
    x1, x2, x3, x4 = (float(v) for v in xi)
    return max(abs(x2), abs(x4)) + abs(x1 - y * x4) + abs(x3 - 0.5 * x * x * x4)


def curve_length(norm: Callable, curve: PiecewiseCurve, rtol: float = 1e-12) -> float:
    """Length int ||x'(t)|| dt of a piecewise polynomial curve.

    Constant-speed curves (concatenations of constant-control arcs) are
    evaluated exactly at each piece's midpoint; otherwise each piece is
    integrated adaptively.
    """
    total = []
    for piece in curve.pieces:
        if piece.duration == 0.0:
            continue
        if curve.constant_speed:
            s = 0.5 * piece.duration
            speed = norm(piece.position(s), piece.velocity(s))
            if not math.isfinite(speed):
                raise InfiniteLength(f"velocity leaves the distribution on [{piece.t_start}, {piece.t_end}]")
            total.append(speed * piece.duration)
        else:
            def speed(s, piece=piece):
                v = norm(piece.position(s), piece.velocity(s))
                if not math.isfinite(v):
                    raise InfiniteLength(f"velocity leaves the distribution at t = {piece.t_start + s}")
                return v
            val, _ = quad(speed, 0.0, piece.duration, epsabs=0.0, epsrel=rtol, limit=200)
            total.append(val)
    return math.fsum(total)
