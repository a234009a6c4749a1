"""Checkable hypotheses for chattering extremals near an exposed edge.

Given polynomial generators of a polyhedral ball and an edge conv(f1, f2),
this module verifies that the edge is exposed, that the seven brackets of
length <= 4 are independent at x0, and searches for a covector p that
annihilates them together with the length-5 brackets alpha, gamma, delta,
epsilon, zeta, pairs to -1 with beta, and strictly separates the edge line
from the remaining vertices.

All bracket and linear-algebra work is exact at rational points.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .polyfields import (Poly, PolyVectorField, evaluate, exact_nullspace, exact_rank,
                         is_rational_point, lie_bracket, rank_at_point)
from .simplex import linprog

__all__ = [
    "EdgeSpec",
    "BracketBundle",
    "FullerCovectorCertificate",
    "DimensionTooSmall",
    "NotFound",
    "edge_margin",
    "is_exposed_edge",
    "compute_bundle",
    "check_independence",
    "find_fuller_covector",
    "reverify_certificate",
    "hamiltonian",
    "poisson_bracket",
    "check_poisson_identity",
    "SEVEN_NAMES",
    "HIGHER_NAMES",
]

SEVEN_NAMES = ("f2-f1", "[f1,f2]", "[f1,[f1,f2]]", "[f2,[f1,f2]]",
               "[f1,[f1,[f1,f2]]]", "[f2,[f1,[f1,f2]]]", "[f2,[f2,[f1,f2]]]")
HIGHER_NAMES = ("alpha", "beta", "gamma", "delta", "epsilon", "zeta")
MARGIN_TOL = 1e-12


class DimensionTooSmall(ValueError):
    """Seven fields cannot be independent in fewer than seven dimensions."""


class NotFound(LookupError):
    def __init__(self, condition: str, detail: str = ""):
        super().__init__(f"{condition}: {detail}" if detail else condition)
        self.condition = condition
        self.detail = detail


@dataclass(frozen=True)
class EdgeSpec:
    vertex_index_a: int
    vertex_index_b: int

    def __post_init__(self):
        if self.vertex_index_a == self.vertex_index_b:
            raise ValueError("edge needs two distinct vertex indices")

    @classmethod
    def of(cls, edge) -> "EdgeSpec":
        return edge if isinstance(edge, EdgeSpec) else cls(int(edge[0]), int(edge[1]))


def _point(values, exact):
    return [Fraction(v) for v in values] if exact else [float(v) for v in values]


def _eval(fieldv: PolyVectorField, x0, exact):
    return _point(evaluate(fieldv, x0), exact)


def _dot(a, b):
    return sum(u * v for u, v in zip(a, b))


def _separation_lp(p_part, basis, a, b, others, exact):
    """max t s.t. p.(v - a) + t <= 0 for v in others, p = p_part + sum z_k N_k, |z| <= 1.

    Returns (t*, p*).  With an empty basis p is fixed.
    """
    zero = Fraction(0) if exact else 0.0
    if not others:
        return None, p_part
    if not basis:
        t = min(_dot(p_part, [ai - vi for ai, vi in zip(a, v)]) for v in others)
        return t, p_part
    k = len(basis)
    # variables: z+ (k), z- (k), t+ , t-
    A_ub, b_ub = [], []
    for v in others:
        diff = [vi - ai for vi, ai in zip(v, a)]
        row = [_dot(N, diff) for N in basis]
        A_ub.append(row + [-r for r in row] + [1, -1])
        b_ub.append(-_dot(p_part, diff))
    for i in range(k):
        e = [zero] * (2 * k + 2)
        e[i] = 1
        A_ub.append(e)
        b_ub.append(1)
        e = [zero] * (2 * k + 2)
        e[k + i] = 1
        A_ub.append(e)
        b_ub.append(1)
    c = [zero] * (2 * k) + [-1, 1]
    # t is bounded above by the box; cap t- so the LP stays bounded below too
    cap = [zero] * (2 * k + 2)
    cap[-1] = 1
    A_ub.append(cap)
    big = 1 + sum(abs(x) for x in b_ub)
    b_ub.append(big)
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, exact=exact)
    if not res.success:
        return None, p_part
    x = res.x
    z = [x[i] - x[k + i] for i in range(k)]
    t = x[2 * k] - x[2 * k + 1]
    p = [pp + sum(zi * N[j] for zi, N in zip(z, basis)) for j, pp in enumerate(p_part)]
    return t, p


def edge_margin(generators: Sequence[PolyVectorField], edge, x0) -> float:
    """Strict separation margin of the edge's affine line from the other vertices.

    The largest t with |p|_inf <= 1, p.(b - a) = 0 and p.v <= p.a - t for every
    remaining vertex v; positive exactly when the edge is exposed.
    """
    edge = EdgeSpec.of(edge)
    exact = is_rational_point(x0)
    verts = [_eval(g, x0, exact) for g in generators]
    a, b = verts[edge.vertex_index_a], verts[edge.vertex_index_b]
    if all(ai == bi for ai, bi in zip(a, b)):
        return 0.0
    others = [v for i, v in enumerate(verts) if i not in (edge.vertex_index_a, edge.vertex_index_b)]
    n = len(a)
    zero = Fraction(0) if exact else 0.0
    # variables p+ (n), p- (n), t >= 0
    direction = [bi - ai for ai, bi in zip(a, b)]
    A_eq = [direction + [-d for d in direction] + [zero]]
    b_eq = [zero]
    A_ub, b_ub = [], []
    for v in others:
        diff = [vi - ai for vi, ai in zip(v, a)]
        A_ub.append(diff + [-d for d in diff] + [1])
        b_ub.append(zero)
    for i in range(2 * n):
        e = [zero] * (2 * n + 1)
        e[i] = 1
        A_ub.append(e)
        b_ub.append(1)
    c = [zero] * (2 * n) + [-1]
    res = linprog(c, A_eq, b_eq, A_ub, b_ub, exact=exact)
    if not res.success:
        return 0.0
    return float(res.x[-1])


def is_exposed_edge(generators: Sequence[PolyVectorField], edge, x0) -> bool:
    if len(generators) < 3:
        raise ValueError("an exposed edge needs at least three vertices")
    return edge_margin(generators, edge, x0) > MARGIN_TOL


@dataclass
class BracketBundle:
    f1: PolyVectorField
    f2: PolyVectorField
    seven_fields: tuple
    higher_fields: dict
    x0: tuple
    values: dict = field(default_factory=dict)

    @property
    def dimension(self) -> int:
        return self.f1.dimension

    def value(self, name: str):
        return self.values[name]

    @property
    def alpha(self):
        return self.values["alpha"]

    @property
    def beta(self):
        return self.values["beta"]

    @property
    def gamma(self):
        return self.values["gamma"]

    @property
    def delta(self):
        return self.values["delta"]

    @property
    def epsilon(self):
        return self.values["epsilon"]

    @property
    def zeta(self):
        return self.values["zeta"]

    def seven_values(self):
        return [self.values[n] for n in SEVEN_NAMES]


def compute_bundle(f1: PolyVectorField, f2: PolyVectorField, x0) -> BracketBundle:
    if f1.dimension != f2.dimension:
        raise ValueError("fields must have equal dimension")
    exact = is_rational_point(x0)
    b12 = lie_bracket(f1, f2)
    b112 = lie_bracket(f1, b12)
    b212 = lie_bracket(f2, b12)
    seven = (f2 - f1, b12, b112, b212, lie_bracket(f1, b112), lie_bracket(f2, b112),
             lie_bracket(f2, b212))
    f, g = f1 + f2, f2 - f1
    fg = lie_bracket(f, g)
    ffg = lie_bracket(f, fg)
    fffg = lie_bracket(f, ffg)
    gffg = lie_bracket(g, ffg)
    ggfg = lie_bracket(g, lie_bracket(g, fg))
    higher = {
        "alpha": lie_bracket(f, fffg),
        "beta": lie_bracket(g, fffg),
        "gamma": lie_bracket(f, gffg),
        "delta": lie_bracket(g, gffg),
        "epsilon": lie_bracket(f, ggfg),
        "zeta": lie_bracket(g, ggfg),
    }
    values = {n: _eval(v, x0, exact) for n, v in zip(SEVEN_NAMES, seven)}
    values.update({n: _eval(v, x0, exact) for n, v in higher.items()})
    return BracketBundle(f1, f2, seven, higher, tuple(x0), values)


def check_independence(bundle: BracketBundle, x0=None) -> bool:
    n = bundle.dimension
    if n < 7:
        raise DimensionTooSmall(f"seven fields cannot be independent in dimension {n}")
    x0 = bundle.x0 if x0 is None else x0
    return rank_at_point(list(bundle.seven_fields), x0) == 7


@dataclass
class FullerCovectorCertificate:
    x0: tuple
    edge: tuple
    p0: tuple
    separation_margin: float
    orthogonality_residual: float
    beta_pairing: float
    rank7: bool
    solution_dimension: int
    equality_constraints: int
    exact: bool
    pairings: dict = field(default_factory=dict)

    def scaled(self, lam: float) -> "FullerCovectorCertificate":
        """Certificate for lam * p0 (lam > 0); beta pairing scales along."""
        if not lam > 0:
            raise ValueError("scale must be positive")
        d = asdict(self)
        d["p0"] = tuple(lam * v for v in self.p0)
        d["separation_margin"] = lam * self.separation_margin
        d["orthogonality_residual"] = lam * self.orthogonality_residual
        d["beta_pairing"] = lam * self.beta_pairing
        d["pairings"] = {k: lam * v for k, v in self.pairings.items()}
        return FullerCovectorCertificate(**d)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["p0"] = [float(v) for v in self.p0]
        d["x0"] = [float(v) for v in self.x0]
        d["p0_exact"] = [str(v) for v in self.p0] if self.exact else None
        return d


def find_fuller_covector(generators: Sequence[PolyVectorField], edge, bundle: BracketBundle,
                         x0=None) -> FullerCovectorCertificate:
    """Search for a covector satisfying every hypothesis; NotFound names the first failure."""
    edge = EdgeSpec.of(edge)
    x0 = bundle.x0 if x0 is None else tuple(x0)
    exact = is_rational_point(x0)
    if len(generators) >= 3 and not is_exposed_edge(generators, edge, x0):
        raise NotFound("exposed_edge", "the edge line meets the hull of the other vertices")
    if not check_independence(bundle, x0):
        raise NotFound("independence", "the seven bracket fields are dependent at x0")
    n = bundle.dimension
    rows = bundle.seven_values() + [bundle.values[k] for k in HIGHER_NAMES if k != "beta"]
    beta = bundle.beta
    if exact:
        basis = exact_nullspace(rows, n)
    else:
        M = np.array(rows, dtype=float)
        _, s, vt = np.linalg.svd(M)
        r = int(np.sum(s > 1e-10 * max(s[0], 1.0)))
        basis = [list(v) for v in vt[r:]]
    if not basis:
        raise NotFound("orthogonality", "only p = 0 annihilates the twelve fields")
    pairs = [_dot(N, beta) for N in basis]
    k = max(range(len(basis)), key=lambda i: abs(pairs[i]))
    if (pairs[k] == 0) if exact else abs(pairs[k]) <= 1e-12:
        raise NotFound("beta_pairing", "beta is orthogonal to every admissible covector")
    # particular solution with <p, beta> = -1; the remaining directions keep the pairing
    p_part = [-v / pairs[k] for v in basis[k]]
    rest = []
    for i, N in enumerate(basis):
        if i == k:
            continue
        coef = pairs[i] / pairs[k]
        rest.append([a - coef * b for a, b in zip(N, basis[k])])
    verts = [_eval(gf, x0, exact) for gf in generators]
    a = verts[edge.vertex_index_a]
    others = [v for i, v in enumerate(verts) if i not in (edge.vertex_index_a, edge.vertex_index_b)]
    margin, p = _separation_lp(p_part, rest, a, verts[edge.vertex_index_b], others, exact)
    if margin is None or margin <= 0:
        raise NotFound("separation", "no admissible covector strictly separates the edge")
    cert = _make_certificate(p, bundle, edge, x0, verts, exact)
    cert.solution_dimension = len(basis)
    return cert


def _make_certificate(p, bundle, edge, x0, verts, exact):
    pair = {name: _dot(p, bundle.values[name]) for name in SEVEN_NAMES + HIGHER_NAMES}
    ortho = max(abs(float(v)) for k, v in pair.items() if k != "beta")
    margin = _margin_of(p, verts, edge)
    return FullerCovectorCertificate(
        x0=tuple(x0), edge=(edge.vertex_index_a, edge.vertex_index_b),
        p0=tuple(p), separation_margin=float(margin), orthogonality_residual=ortho,
        beta_pairing=float(pair["beta"]), rank7=True, solution_dimension=0,
        equality_constraints=12, exact=exact,
        pairings={k: float(v) for k, v in pair.items()})


def _margin_of(p, verts, edge):
    a = verts[edge.vertex_index_a]
    b = verts[edge.vertex_index_b]
    others = [v for i, v in enumerate(verts) if i not in (edge.vertex_index_a, edge.vertex_index_b)]
    line_dir = _dot(p, [bi - ai for ai, bi in zip(a, b)])
    if line_dir != 0 and abs(float(line_dir)) > 1e-12:
        return -np.inf
    if not others:
        return np.inf
    return _dot(p, a) - max(_dot(p, v) for v in others)


def reverify_certificate(cert: FullerCovectorCertificate, generators, tol: float = 1e-9) -> dict:
    """Recompute every certificate predicate from scratch with floating arithmetic."""
    edge = EdgeSpec.of(cert.edge)
    x0 = cert.x0
    f1 = generators[edge.vertex_index_a]
    f2 = generators[edge.vertex_index_b]
    bundle = compute_bundle(f1, f2, tuple(float(v) for v in x0))
    p = np.array([float(v) for v in cert.p0])
    seven = np.array([[float(v) for v in bundle.values[n]] for n in SEVEN_NAMES])
    others = np.array([[float(v) for v in bundle.values[n]] for n in HIGHER_NAMES if n != "beta"])
    beta = np.array([float(v) for v in bundle.beta])
    scale = max(1.0, float(np.abs(p).max()))
    verts = [np.array([float(v) for v in evaluate(gf, x0)]) for gf in generators]
    margin = float(_margin_of(list(p), [list(v) for v in verts], edge))
    rank = rank_at_point(list(bundle.seven_fields), x0)
    checks = {
        "orthogonality": float(np.abs(np.concatenate([seven @ p, others @ p])).max()) <= tol * scale,
        "beta_pairing": abs(float(beta @ p) - cert.beta_pairing) <= tol * scale and float(beta @ p) < 0,
        "separation": margin > 0,
        "rank7": rank == 7,
        "exposed_edge": is_exposed_edge(generators, edge, x0),
    }
    checks["all"] = all(checks.values())
    return checks


# ---------------------------------------------------------------------------
# Poisson brackets of momentum-linear Hamiltonians on T*R^n

def hamiltonian(h: PolyVectorField) -> Poly:
    """<p, h(x)> as a polynomial in (x_1..x_n, p_1..p_n)."""
    n = h.dimension
    xs = [Poly.var(2 * n, i) for i in range(n)]
    out = Poly.zero(2 * n)
    for k, comp in enumerate(h.components):
        out = out + Poly.var(2 * n, n + k) * comp.compose(xs)
    return out


def poisson_bracket(F: Poly, G: Poly, n: int) -> Poly:
    """{F, G} = sum_k dF/dp_k dG/dx_k - dF/dx_k dG/dp_k."""
    out = Poly.zero(2 * n)
    for k in range(n):
        out = out + F.diff(n + k) * G.diff(k) - F.diff(k) * G.diff(n + k)
    return out


def check_poisson_identity(h1: PolyVectorField, h2: PolyVectorField) -> bool:
    n = h1.dimension
    lhs = poisson_bracket(hamiltonian(h1), hamiltonian(h2), n)
    return lhs == hamiltonian(lie_bracket(h1, h2))
