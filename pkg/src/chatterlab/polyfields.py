"""Exact multivariate polynomials with rational coefficients and the
polynomial vector fields built on them.

Brackets follow ``[f, g]^k = sum_j (f_j d_j g^k - g_j d_j f^k)``; with this
convention the R^4 fields satisfy ``[f1, f2] = f3``.
"""
from __future__ import annotations

import ast
import numbers
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "Poly",
    "PolyVectorField",
    "DimensionMismatch",
    "lie_bracket",
    "evaluate",
    "verify_identity",
    "rank_at_point",
    "exact_rank",
    "parse_poly",
    "parse_field",
    "parse_field_expr",
    "is_rational_point",
]


class DimensionMismatch(ValueError):
    pass


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, numbers.Integral):
        return Fraction(int(c))
    if isinstance(c, float):
        return Fraction(c)
    if isinstance(c, numbers.Rational):
        return Fraction(c.numerator, c.denominator)
    raise TypeError(f"cannot use {c!r} as an exact coefficient")


def is_rational_point(x) -> bool:
    return all(isinstance(v, numbers.Rational) for v in x)


class Poly:
    """Polynomial in ``nvars`` variables; terms map exponent tuples to Fractions."""

    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[tuple, object] | None = None):
        self.nvars = nvars
        clean = {}
        for mono, c in (terms or {}).items():
            if len(mono) != nvars:
                raise DimensionMismatch(f"monomial {mono} has wrong length for {nvars} variables")
            c = _as_fraction(c)
            if c != 0:
                clean[tuple(mono)] = clean.get(tuple(mono), 0) + c
        self.terms = {m: c for m, c in sorted(clean.items(), reverse=True) if c != 0}
        self._hash = None

    # -- constructors --------------------------------------------------
    @classmethod
    def zero(cls, nvars: int) -> "Poly":
        return cls(nvars)

    @classmethod
    def const(cls, nvars: int, c) -> "Poly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, nvars: int, i: int) -> "Poly":
        mono = [0] * nvars
        mono[i] = 1
        return cls(nvars, {tuple(mono): 1})

    # -- basic protocol ------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (numbers.Number, Fraction)):
            return self == Poly.const(self.nvars, other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, tuple(self.terms.items())))
        return self._hash

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise DimensionMismatch("polynomials live in different variable counts")
            return other
        return Poly.const(self.nvars, other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return Poly(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.nvars, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, PolyVectorField):
            return NotImplemented
        other = self._coerce(other)
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = out.get(m, 0) + c1 * c2
        return Poly(self.nvars, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        c = _as_fraction(other)
        return Poly(self.nvars, {m: v / c for m, v in self.terms.items()})

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        out = Poly.const(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def diff(self, i: int) -> "Poly":
        out = {}
        for m, c in self.terms.items():
            if m[i]:
                mm = list(m)
                mm[i] -= 1
                out[tuple(mm)] = c * m[i]
        return Poly(self.nvars, out)

    def degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def __call__(self, point):
        return self.evaluate(point)

    def evaluate(self, point):
        if len(point) != self.nvars:
            raise DimensionMismatch(f"point has {len(point)} coordinates, expected {self.nvars}")
        if is_rational_point(point):
            pt = [_as_fraction(v) for v in point]
            total = Fraction(0)
        else:
            pt = [float(v) for v in point]
            total = 0.0
        for m, c in self.terms.items():
            term = c if isinstance(total, Fraction) else float(c)
            for v, e in zip(pt, m):
                if e:
                    term *= v ** e
            total += term
        return total

    def compose(self, subs: Sequence["Poly"]) -> "Poly":
        """Substitute polynomial ``subs[i]`` for variable ``i``."""
        if len(subs) != self.nvars:
            raise DimensionMismatch("need one substitution per variable")
        target = subs[0].nvars if subs else 0
        out = Poly.zero(target)
        cache: dict = {}
        for m, c in self.terms.items():
            term = Poly.const(target, c)
            for i, e in enumerate(m):
                if e:
                    key = (i, e)
                    if key not in cache:
                        cache[key] = subs[i] ** e
                    term = term * cache[key]
            out = out + term
        return out

    def __repr__(self):
        return f"Poly({self.nvars}, {self.to_string()!r})"

    def to_string(self, names: Sequence[str] | None = None) -> str:
        if not self.terms:
            return "0"
        names = names or [f"x{i + 1}" for i in range(self.nvars)]
        parts = []
        for m, c in self.terms.items():
            factors = []
            for n, e in zip(names, m):
                if e == 1:
                    factors.append(n)
                elif e > 1:
                    factors.append(f"{n}^{e}")
            if not factors:
                parts.append(str(c))
            elif c == 1:
                parts.append("*".join(factors))
            elif c == -1:
                parts.append("-" + "*".join(factors))
            else:
                parts.append(f"{c}*" + "*".join(factors))
        return " + ".join(parts).replace("+ -", "- ")


class PolyVectorField:
    """Vector field on R^n with polynomial components."""

    __slots__ = ("components",)

    def __init__(self, components: Iterable[Poly]):
        comps = tuple(components)
        if not comps:
            raise ValueError("a vector field needs at least one component")
        n = comps[0].nvars
        if any(c.nvars != n for c in comps) or len(comps) != n:
            raise DimensionMismatch("components must share the ambient dimension n and number n")
        self.components = comps

    @property
    def dimension(self) -> int:
        return len(self.components)

    @classmethod
    def zero(cls, n: int) -> "PolyVectorField":
        return cls([Poly.zero(n)] * n)

    @classmethod
    def constant(cls, vec: Sequence) -> "PolyVectorField":
        n = len(vec)
        return cls([Poly.const(n, v) for v in vec])

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def _check(self, other: "PolyVectorField"):
        if not isinstance(other, PolyVectorField):
            raise TypeError("expected a PolyVectorField")
        if other.dimension != self.dimension:
            raise DimensionMismatch(f"dimensions {self.dimension} and {other.dimension} differ")

    def __add__(self, other):
        self._check(other)
        return PolyVectorField(a + b for a, b in zip(self.components, other.components))

    def __sub__(self, other):
        self._check(other)
        return PolyVectorField(a - b for a, b in zip(self.components, other.components))

    def __neg__(self):
        return PolyVectorField(-a for a in self.components)

    def __mul__(self, scalar):
        # scalar may be a rational or a Poly (function coefficient)
        if isinstance(scalar, PolyVectorField):
            raise TypeError("product of two vector fields is not defined")
        return PolyVectorField(a * scalar for a in self.components)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return PolyVectorField(a / scalar for a in self.components)

    def __eq__(self, other):
        if not isinstance(other, PolyVectorField):
            return NotImplemented
        return self.components == other.components

    def __hash__(self):
        return hash(self.components)

    def __call__(self, point):
        return evaluate(self, point)

    def __repr__(self):
        return "PolyVectorField(" + ", ".join(c.to_string() for c in self.components) + ")"

    def to_string(self, names: Sequence[str] | None = None) -> str:
        return ", ".join(c.to_string(names) for c in self.components)

    def apply(self, func: Poly) -> Poly:
        """Directional derivative of a polynomial function along the field."""
        out = Poly.zero(self.dimension)
        for j, fj in enumerate(self.components):
            if not fj.is_zero():
                out = out + fj * func.diff(j)
        return out


def lie_bracket(f: PolyVectorField, g: PolyVectorField) -> PolyVectorField:
    f._check(g)
    return PolyVectorField(f.apply(gk) - g.apply(fk)
                           for fk, gk in zip(f.components, g.components))


def evaluate(f: PolyVectorField, x) -> tuple:
    return tuple(c.evaluate(x) for c in f.components)


def verify_identity(lhs: PolyVectorField, rhs: PolyVectorField) -> bool:
    if lhs.dimension != rhs.dimension:
        return False
    return lhs == rhs


def exact_rank(rows: Sequence[Sequence]) -> int:
    """Rank by fraction-exact Gaussian elimination."""
    mat = [[_as_fraction(v) for v in row] for row in rows]
    if not mat:
        return 0
    ncols = len(mat[0])
    rank = 0
    for col in range(ncols):
        pivot = next((r for r in range(rank, len(mat)) if mat[r][col] != 0), None)
        if pivot is None:
            continue
        mat[rank], mat[pivot] = mat[pivot], mat[rank]
        pr = mat[rank]
        for r in range(len(mat)):
            if r != rank and mat[r][col] != 0:
                factor = mat[r][col] / pr[col]
                mat[r] = [a - factor * b for a, b in zip(mat[r], pr)]
        rank += 1
        if rank == len(mat):
            break
    return rank


def exact_nullspace(rows: Sequence[Sequence], ncols: int) -> list[list[Fraction]]:
    """Basis of {p : rows @ p = 0} over the rationals (reduced row echelon form)."""
    mat = [[_as_fraction(v) for v in row] for row in rows]
    pivots = []
    rank = 0
    for col in range(ncols):
        pivot = next((r for r in range(rank, len(mat)) if mat[r][col] != 0), None)
        if pivot is None:
            continue
        mat[rank], mat[pivot] = mat[pivot], mat[rank]
        pv = mat[rank][col]
        mat[rank] = [v / pv for v in mat[rank]]
        for r in range(len(mat)):
            if r != rank and mat[r][col] != 0:
                f = mat[r][col]
                mat[r] = [a - f * b for a, b in zip(mat[r], mat[rank])]
        pivots.append(col)
        rank += 1
    basis = []
    for free in (c for c in range(ncols) if c not in pivots):
        vec = [Fraction(0)] * ncols
        vec[free] = Fraction(1)
        for r, pc in enumerate(pivots):
            vec[pc] = -mat[r][free]
        basis.append(vec)
    return basis


def rank_at_point(fields: Sequence[PolyVectorField], x) -> int:
    if not fields:
        return 0
    n = fields[0].dimension
    if any(f.dimension != n for f in fields):
        raise DimensionMismatch("fields have different dimensions")
    rows = [evaluate(f, x) for f in fields]
    if is_rational_point(x):
        return exact_rank(rows)
    mat = np.array(rows, dtype=float)
    s = np.linalg.svd(mat, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > 1e-10 * s[0]))


# ---------------------------------------------------------------------------
# textual format: "y, 0, 1/2*x^2, 1" with a declared variable order

class ParseError(ValueError):
    pass


def _eval_node(node, names: Mapping[str, object], make_const):
    if isinstance(node, ast.Expression):
        return _eval_node(node.body, names, make_const)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) \
            and not isinstance(node.value, bool):
        value = node.value
        if isinstance(value, float):
            value = Fraction(str(value))
        return make_const(value)
    if isinstance(node, ast.Name):
        if node.id not in names:
            raise ParseError(f"unknown symbol {node.id!r}")
        return names[node.id]
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        val = _eval_node(node.operand, names, make_const)
        return -val if isinstance(node.op, ast.USub) else val
    if isinstance(node, ast.BinOp):
        left = _eval_node(node.left, names, make_const)
        right = _eval_node(node.right, names, make_const)
        if isinstance(node.op, ast.Add):
            return left + right
        if isinstance(node.op, ast.Sub):
            return left - right
        if isinstance(node.op, ast.Mult):
            if isinstance(left, PolyVectorField) and isinstance(right, PolyVectorField):
                raise ParseError("product of two vector fields")
            return left * right
        if isinstance(node.op, ast.Div):
            if isinstance(right, Poly):
                if right.degree() > 0:
                    raise ParseError("division by a non-constant polynomial")
                right = right.terms.get((0,) * right.nvars, Fraction(0))
            if isinstance(right, PolyVectorField):
                raise ParseError("division by a vector field")
            if right == 0:
                raise ParseError("division by zero")
            return left / right
        if isinstance(node.op, ast.Pow):
            if not isinstance(node.right, ast.Constant) or not isinstance(node.right.value, int):
                raise ParseError("exponents must be non-negative integer literals")
            return left ** node.right.value
    if isinstance(node, ast.List) and len(node.elts) == 2:
        a = _eval_node(node.elts[0], names, make_const)
        b = _eval_node(node.elts[1], names, make_const)
        if not (isinstance(a, PolyVectorField) and isinstance(b, PolyVectorField)):
            raise ParseError("brackets [a, b] need two vector fields")
        return lie_bracket(a, b)
    raise ParseError(f"unsupported syntax: {ast.dump(node)}")


def _parse(text: str) -> ast.Expression:
    try:
        return ast.parse(text.strip().replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"cannot parse {text!r}: {exc.msg}") from None


def parse_poly(text: str, variables: Sequence[str]) -> Poly:
    n = len(variables)
    names = {v: Poly.var(n, i) for i, v in enumerate(variables)}
    out = _eval_node(_parse(text), names, lambda c: Poly.const(n, c))
    if not isinstance(out, Poly):
        raise ParseError(f"{text!r} is not a polynomial")
    return out


def parse_field(text: str, variables: Sequence[str]) -> PolyVectorField:
    """Parse a comma separated component list such as ``"y, 0, 1/2*x^2, 1"``."""
    parts = [p for p in text.split(",")]
    if len(parts) != len(variables):
        raise ParseError(f"expected {len(variables)} components, got {len(parts)} in {text!r}")
    return PolyVectorField(parse_poly(p, variables) for p in parts)


def parse_field_expr(text: str, variables: Sequence[str],
                     fields: Mapping[str, PolyVectorField]) -> PolyVectorField:
    """Evaluate expressions like ``-[f3, f4]``, ``x*f6`` or ``f1 - f2``."""
    n = len(variables)
    names: dict = {v: Poly.var(n, i) for i, v in enumerate(variables)}
    clash = set(names) & set(fields)
    if clash:
        raise ParseError(f"names used both as variables and fields: {sorted(clash)}")
    names.update(fields)
    out = _eval_node(_parse(text), names, lambda c: Poly.const(n, c))
    if not isinstance(out, PolyVectorField):
        raise ParseError(f"{text!r} does not evaluate to a vector field")
    return out
