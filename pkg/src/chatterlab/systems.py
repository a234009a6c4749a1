"""Built-in field systems and the YAML system-file loader.

A system file declares variables, named polynomial fields, a norm
representation (``V`` with vertex expressions, or ``H`` with 1-forms) and,
optionally, an edge and a commutation table to verify::

    variables: [x, y, z, w]
    fields:
      f1: "y, 0, 1/2*x^2, 1"
      f2: "0, 1, 0, 0"
    representation: V
    vertices: ["f1+f2", "f1-f2", "-f1+f2", "-f1-f2"]
    edge: [0, 1]
    table:
      - "[f1,f2] = f3"
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import yaml

from .polyfields import (ParseError, Poly, PolyVectorField, lie_bracket, parse_field,
                         parse_field_expr, parse_poly, verify_identity)
from .polynorm import HNorm, PolyForm, VNorm

__all__ = [
    "FieldSystem",
    "r4_fields",
    "carnot_fields",
    "demo9_fields",
    "builtin_system",
    "load_system",
    "parse_system",
    "R4_TABLE",
    "CARNOT_TABLE",
    "r4_dual_norm",
    "r4_subfinsler_vnorm",
    "r4_finsler_vnorm",
    "carnot_finsler_vnorm",
]

R4_VARS = ("x", "y", "z", "w")
CARNOT_VARS = ("x1", "x2", "x3", "x4", "x5", "x6")
DEMO9_VARS = tuple(f"x{i}" for i in range(1, 10))

R4_TABLE = (
    "[f1,f2] = f3",
    "[f1,f3] = f4",
    "[f1,f4] = f5",
    "[f2,f5] = f6",
    "[f3,f4] = -f6",
    "f4 = x*f6",
    "f5 = y*f6",
)

CARNOT_TABLE = (
    "[g1,g2] = g3",
    "[g1,g3] = g4",
    "[g1,g4] = g5",
    "[g2,g5] = g6",
    "[g3,g4] = -g6",
)


def r4_fields() -> dict[str, PolyVectorField]:
    v = R4_VARS
    return {
        "f1": parse_field("y, 0, 1/2*x^2, 1", v),
        "f2": parse_field("0, 1, 0, 0", v),
        "f3": parse_field("-1, 0, 0, 0", v),
        "f4": parse_field("0, 0, x, 0", v),
        "f5": parse_field("0, 0, y, 0", v),
        "f6": parse_field("0, 0, 1, 0", v),
    }


def carnot_fields() -> dict[str, PolyVectorField]:
    v = CARNOT_VARS
    return {
        "g1": parse_field("1, 0, -x2, -x3, -x1*x3, 1/2*x3^2", v),
        "g2": parse_field("0, 1, 0, 0, 0, 0", v),
        "g3": parse_field("0, 0, 1, 0, 0, 0", v),
        "g4": parse_field("0, 0, 0, 1, x1, -x3", v),
        "g5": parse_field("0, 0, 0, 0, 1, x2", v),
        "g6": parse_field("0, 0, 0, 0, 0, 1", v),
    }


def demo9_fields() -> dict[str, PolyVectorField]:
    """Nine-dimensional system where the seven-field rank condition holds at 0.

    With f = f1 + f2 = d1 and g = f2 - f1 carrying one coordinate per
    bracket of length <= 4, the length-5 brackets at the origin reduce to
    beta = 6 e9 while alpha, gamma, delta, epsilon, zeta vanish.
    """
    v = DEMO9_VARS
    f = parse_field("1, 0, 0, 0, 0, 0, 0, 0, 0", v)
    g = parse_field("0, 1, x1, 1/2*x1^2, x1*x2, 1/6*x1^3, 1/2*x1^2*x2, 1/2*x1*x2^2,"
                    " x1^3*x2 - 3*x1^2*x3", v)
    return {"f1": (f - g) / 2, "f2": (f + g) / 2, "f": f, "g": g}


@dataclass
class FieldSystem:
    name: str
    variables: tuple
    fields: dict
    representation: str = "V"
    vertex_exprs: tuple = ()
    vertices: tuple = ()
    edge: tuple = (0, 1)
    table: tuple = ()
    constraint_forms: tuple = ()
    bounding_forms: tuple = ()

    @property
    def dimension(self) -> int:
        return len(self.variables)

    def norm(self):
        if self.representation == "V":
            return VNorm(self.vertices)
        return HNorm(self.bounding_forms, self.constraint_forms)

    def check_table(self) -> list[dict]:
        """Evaluate each declared identity ``lhs = rhs`` exactly."""
        out = []
        for entry in self.table:
            lhs_txt, rhs_txt = _split_identity(entry)
            lhs = parse_field_expr(lhs_txt, self.variables, self.fields)
            rhs = parse_field_expr(rhs_txt, self.variables, self.fields)
            out.append({"identity": entry, "holds": verify_identity(lhs, rhs)})
        return out


def _split_identity(entry: str) -> tuple[str, str]:
    if entry.count("=") != 1:
        raise ParseError(f"identity {entry!r} needs exactly one '='")
    lhs, rhs = entry.split("=")
    return lhs.strip(), rhs.strip()


def builtin_system(name: str) -> FieldSystem:
    key = name.removeprefix("builtin:")
    if key == "r4":
        fields = r4_fields()
        exprs = ("f1+f2", "f1-f2", "-f1+f2", "-f1-f2")
        return FieldSystem("builtin:r4", R4_VARS, fields, "V", exprs,
                           _vertex_fields(exprs, R4_VARS, fields), (0, 1), R4_TABLE)
    if key == "carnot":
        fields = carnot_fields()
        exprs = ("g1+g2", "g1-g2", "-g1+g2", "-g1-g2")
        return FieldSystem("builtin:carnot", CARNOT_VARS, fields, "V", exprs,
                           _vertex_fields(exprs, CARNOT_VARS, fields), (0, 1), CARNOT_TABLE)
    if key == "demo9":
        fields = demo9_fields()
        exprs = ("f1", "f2", "-f1", "-f2")
        return FieldSystem("builtin:demo9", DEMO9_VARS, fields, "V", exprs,
                           _vertex_fields(exprs, DEMO9_VARS, fields), (0, 1),
                           ("f = f1 + f2", "g = f2 - f1", "[f1,f2] = 1/2*[f,g]"))
    raise KeyError(f"unknown built-in system {name!r}")


def _vertex_fields(exprs: Sequence[str], variables, fields) -> tuple:
    return tuple(parse_field_expr(e, variables, fields) for e in exprs)


def _parse_form(text: str, variables) -> PolyForm:
    parts = text.split(",")
    if len(parts) != len(variables):
        raise ParseError(f"form {text!r} needs {len(variables)} coefficients")
    return PolyForm([parse_poly(p, variables) for p in parts])


def parse_system(data: Mapping, name: str = "<system>") -> FieldSystem:
    try:
        variables = tuple(str(v) for v in data["variables"])
        raw_fields = data.get("fields", {})
    except (KeyError, TypeError) as exc:
        raise ParseError(f"system {name}: missing 'variables'") from exc
    fields = {}
    for key, text in raw_fields.items():
        # later fields may be given as expressions of earlier ones
        try:
            fields[key] = parse_field(str(text), variables)
        except ParseError:
            fields[key] = parse_field_expr(str(text), variables, fields)
    rep = str(data.get("representation", "V")).upper()
    if rep not in ("V", "H"):
        raise ParseError(f"representation must be V or H, got {rep!r}")
    exprs = tuple(str(e) for e in data.get("vertices", ()))
    vertices = _vertex_fields(exprs, variables, fields)
    edge = tuple(int(i) for i in data.get("edge", (0, 1)))
    table = tuple(str(t) for t in data.get("table", ()))
    zetas = tuple(_parse_form(str(t), variables) for t in data.get("constraint_forms", ()))
    lams = tuple(_parse_form(str(t), variables) for t in data.get("bounding_forms", ()))
    if rep == "V" and not vertices:
        raise ParseError("a V representation needs vertices")
    if rep == "H" and not lams:
        raise ParseError("an H representation needs bounding_forms")
    return FieldSystem(name, variables, fields, rep, exprs, vertices, edge, table, zetas, lams)


def load_system(source: str) -> FieldSystem:
    """Load ``builtin:<name>`` or a YAML file path."""
    if source.startswith("builtin:"):
        return builtin_system(source)
    with open(source, "r", encoding="utf-8") as fh:
        try:
            data = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ParseError(f"{source}: {exc}") from None
    if not isinstance(data, Mapping):
        raise ParseError(f"{source}: expected a mapping at top level")
    return parse_system(data, source)


def r4_dual_norm() -> HNorm:
    """Dual description of the R^4 sub-Finsler ball (forms zeta and +-dy, +-dw)."""
    v = R4_VARS
    zetas = [_parse_form("1, 0, 0, -y", v), _parse_form("0, 0, 1, -1/2*x^2", v)]
    lams = [_parse_form(t, v) for t in ("0, 1, 0, 0", "0, -1, 0, 0", "0, 0, 0, 1", "0, 0, 0, -1")]
    return HNorm(lams, zetas)


def r4_subfinsler_vnorm() -> VNorm:
    return builtin_system("r4").norm()


def r4_finsler_vnorm() -> VNorm:
    f = r4_fields()
    verts = [f["f1"] + f["f2"], f["f1"] - f["f2"], -f["f1"] + f["f2"], -f["f1"] - f["f2"],
             f["f3"], -f["f3"], f["f6"], -f["f6"]]
    return VNorm(verts)


def carnot_finsler_vnorm() -> VNorm:
    g = carnot_fields()
    verts = [g["g1"] + g["g2"], g["g1"] - g["g2"], -g["g1"] + g["g2"], -g["g1"] - g["g2"]]
    for k in ("g3", "g4", "g5", "g6"):
        verts += [g[k], -g[k]]
    return VNorm(verts)
