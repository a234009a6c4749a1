"""Command-line interface: ``chatterlab {fuller, geodesic, check} ...``.

Exit codes: 0 success, 1 domain failure (violated hypothesis, inadmissible
boundary, failed check), 2 usage or parse error.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from . import fuller as fl
from .io import dumps, write_csv, write_json

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2


@dataclass
class RunConfig:
    subcommand: str
    action: str
    seed: int
    eps: float
    out_dir: Path
    fmt: str


def _default_seed() -> int:
    raw = os.environ.get("CHATTERLAB_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        return 0


def _positive(text: str) -> float:
    v = float(text)
    if not v > 0 or not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def _nonneg(text: str) -> float:
    v = float(text)
    if not v >= 0 or not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"expected a nonnegative number, got {text}")
    return v


def _point(text: str) -> tuple:
    from fractions import Fraction
    try:
        return tuple(Fraction(p.strip()) for p in text.split(","))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"bad point {text!r}") from None


def _config(args) -> RunConfig:
    return RunConfig(args.command, args.action, args.seed, args.eps, Path(args.out_dir), args.format)


def _emit(cfg: RunConfig, stem: str, columns, rows, report: dict) -> list[Path]:
    """Write the trajectory in the chosen format plus a JSON report."""
    written = []
    if rows is not None:
        if cfg.fmt == "csv":
            written.append(write_csv(cfg.out_dir / f"{stem}.csv", columns, rows))
        else:
            data = {"columns": list(columns), "rows": [list(r) for r in rows]}
            written.append(write_json(cfg.out_dir / f"{stem}.json", data))
    written.append(write_json(cfg.out_dir / f"{stem}_report.json", report))
    return written


# ---------------------------------------------------------------------------
# fuller

def cmd_fuller(args) -> int:
    cfg = _config(args)
    if args.action == "mu":
        mu = fl.solve_mu()
        resid = mu ** 4 - 3 * mu ** 3 - 4 * mu ** 2 - 3 * mu + 1
        report = {"mu": mu, "quartic_residual": resid, "closed_form": fl.mu_closed_form(),
                  "switch_coeff": fl.fuller_constants().switch_coeff}
        print(f"mu = {mu:.17g}")
        print(f"quartic residual = {resid:.3g}")
        if args.json:
            write_json(args.json, report)
        return EXIT_OK
    if args.action in ("tf", "jf"):
        est = (fl.time_to_origin if args.action == "tf" else fl.cost_to_origin)((args.x0, args.y0), cfg.eps)
        name = "T_F" if args.action == "tf" else "J_F"
        print(f"{name}({args.x0:g}, {args.y0:g}) = {est.value:.17g}  (tail bound {est.error_bound:.3g})")
        if args.json:
            write_json(args.json, {name: est.value, "error_bound": est.error_bound,
                                   "x0": args.x0, "y0": args.y0, "eps": cfg.eps})
        return EXIT_OK
    if args.action == "simulate":
        traj = fl.simulate((args.x0, args.y0), cfg.eps)
        if traj.is_empty():
            print("start is the origin: empty trajectory (no switches)")
        else:
            ratios = traj.gap_ratios()
            print(f"switches = {len(traj.switch_times)}, T_F = {traj.T_F:.17g}, J_F = {traj.cost:.17g}")
            print(f"mu = {traj.mu:.17g}")
            if ratios:
                print("gap ratios (last 3): " + ", ".join(f"{r:.12f}" for r in ratios[-3:]))
        rows = [(a.t_start, a.start.x, a.start.y, a.u) for a in traj.arcs]
        report = {"x0": args.x0, "y0": args.y0, "eps": cfg.eps, "T_F": traj.T_F, "J_F": traj.cost,
                  "switch_times": traj.switch_times, "gap_ratios": traj.gap_ratios(), "mu": traj.mu,
                  "tail_time_bound": traj.tail_time_bound, "tail_cost_bound": traj.tail_cost_bound}
        _emit(cfg, "fuller_simulate", ("t", "x", "y", "u"), rows, report)
        return EXIT_OK
    # finite
    try:
        sol = fl.solve_finite_time((args.x0, args.y0), (args.x1, args.y1), args.t1, cfg.eps)
    except fl.HypothesisViolated as exc:
        print(f"hypothesis violated: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    rows = [(a.t_start, a.start.x, a.start.y, a.u) for a in sol.arcs]
    report = {"t1": sol.t1, "cost": sol.cost, "switch_times": sol.switch_times}
    print(f"cost = {sol.cost:.17g}, switches = {len(sol.switch_times)}")
    if args.verify:
        pmp = fl.verify_pmp_certificate(sol)
        report["pmp"] = pmp.to_dict()
        print(f"PMP certificate: {'certified' if pmp.certified else 'FAILED'}")
        if not pmp.certified:
            _emit(cfg, "fuller_finite", ("t", "x", "y", "u"), rows, report)
            return EXIT_DOMAIN
    _emit(cfg, "fuller_finite", ("t", "x", "y", "u"), rows, report)
    return EXIT_OK


# ---------------------------------------------------------------------------
# geodesic

def _oracle_block(pair, sol, seed):
    from .oracle import bangbang_search, comparison_report
    res = bangbang_search((pair.q0.x, pair.q0.y), (pair.q1.x, pair.q1.y), pair.t1,
                          max_switches=12, seed=seed)
    return comparison_report(sol.cost, res.cost, res.n_switches, seed)


def cmd_geodesic(args) -> int:
    from . import carnot as cg
    from . import geodesy as geo

    cfg = _config(args)
    pair = geo.make_admissible_endpoint(args.x0, args.y0, args.x1, args.y1, args.slack, cfg.eps)
    if args.z1 is not None or args.w1 is not None:
        # explicit endpoint data; admissibility is then checked, not constructed
        q1 = pair.q1
        pair = geo.BoundaryPair(pair.q0, (q1.x, q1.y, q1.z if args.z1 is None else args.z1,
                                          q1.w if args.w1 is None else args.w1))
    kind = args.action
    report: dict = {"kind": kind, "seed": cfg.seed, "q0": list(pair.q0), "q1": list(pair.q1),
                    "t1": pair.t1}
    ok = True
    try:
        if kind in ("r4-subfinsler", "r4-finsler"):
            build = geo.build_subfinsler_geodesic if kind == "r4-subfinsler" else geo.build_finsler_geodesic
            g = build(pair, cfg.eps)
            report.update(length=g.length, lengths=g.lengths, endpoint_error=g.endpoint_error(),
                          switch_times=g.switch_times, dynamics_residual=g.dynamics_residual())
            columns, rows = ("t", "x", "y", "z", "w", "u", "v"), g.rows(args.samples_out)
            if args.verify:
                adv = geo.adversarial_length_check(pair, args.samples, cfg.seed)
                report["adversarial"] = adv.to_dict()
                report["oracle"] = _oracle_block(pair, g.solution, cfg.seed)
                ok = (adv.passed and report["oracle"]["gap"] >= -1e-6
                      and g.endpoint_error() <= geo.ENDPOINT_TOL and abs(g.length - g.t1) <= 1e-9)
            print(f"length = {g.length:.17g} (t1 = {g.t1:.17g}), switches = {len(g.switch_times)}")
        elif kind == "carnot-subfinsler":
            x0 = (pair.q0.w, pair.q0.y, -pair.q0.x, 0.0, 0.0, pair.q0.z)
            c = cg.build_carnot_subfinsler_geodesic(x0, pair, cfg.eps)
            report.update(length=c.length, x0=list(c.x0), x1=list(c.x1),
                          projection_error=c.projection_error(),
                          endpoint_projection_error=c.endpoint_projection_error(),
                          switch_times=c.switch_times)
            columns = ("t", "x1", "x2", "x3", "x4", "x5", "x6", "u1", "u2")
            rows = c.rows(args.samples_out)
            if args.verify:
                adv = geo.adversarial_length_check(pair, args.samples, cfg.seed)
                report["adversarial_base"] = adv.to_dict()
                ok = adv.passed and c.projection_error() <= 1e-9 and abs(c.length - pair.t1) <= 1e-9
            print(f"length = {c.length:.17g} (t1 = {pair.t1:.17g}), switches = {len(c.switch_times)}")
        else:
            c = cg.build_carnot_finsler_geodesic(args.x0, args.y0, args.x1, args.y1,
                                                 pair.q0.w, pair.q1.w, pair.q0.z, pair.q1.z, cfg.eps)
            dev = c.unit_speed_error()
            report.update(x0=list(c.x0), x1=list(c.x1), stated_x1=list(c.stated_x1), A=c.A, B=c.B,
                          unit_speed_max_deviation=dev, length=c.length())
            columns = ("t", "x1", "x2", "x3", "x4", "x5", "x6", "u1", "u2")
            rows = c.rows(args.samples_out)
            if args.verify:
                x0 = c.x0
                lift = cg.build_carnot_subfinsler_geodesic(x0, pair, cfg.eps)
                import numpy as np
                ts = np.linspace(0.0, c.t1, 2001)
                diff = float(np.max(np.abs(lift.curve.sample(ts)[0] - c.curve.sample(ts)[0])))
                report["lift_deviation"] = diff
                # residual velocity at the truncation radius drifts over the rest arc
                ok = dev <= 1e-9 and diff <= 1e-9 + 100.0 * cfg.eps
            print(f"unit-speed max deviation = {dev:.3g}, A = {c.A:.17g}, B = {c.B:.17g}")
    except geo.InadmissibleBoundary as exc:
        print(f"inadmissible boundary: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    report["verified"] = ok if args.verify else None
    paths = _emit(cfg, kind.replace("-", "_"), columns, rows, report)
    for p in paths:
        print(f"wrote {p}")
    return EXIT_OK if ok else EXIT_DOMAIN


# ---------------------------------------------------------------------------
# check

def cmd_check(args) -> int:
    from . import chatter as ch
    from .polyfields import ParseError
    from .systems import load_system

    try:
        system = load_system(args.system)
    except (ParseError, KeyError, OSError) as exc:
        print(f"cannot load system: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.action == "brackets":
        try:
            results = system.check_table()
        except ParseError as exc:
            print(f"cannot parse table: {exc}", file=sys.stderr)
            return EXIT_USAGE
        for r in results:
            print(f"{'PASS' if r['holds'] else 'FAIL'}  {r['identity']}")
        if args.json:
            write_json(args.json, {"system": system.name, "identities": results})
        return EXIT_OK if all(r["holds"] for r in results) else EXIT_DOMAIN
    # chattering
    point = args.point if args.point is not None else (0,) * system.dimension
    if len(point) != system.dimension:
        print(f"point needs {system.dimension} coordinates", file=sys.stderr)
        return EXIT_USAGE
    edge = ch.EdgeSpec.of(system.edge if args.edge is None else args.edge)
    gens = list(system.vertices)
    out: dict = {"system": system.name, "point": [float(v) for v in point],
                 "edge": [edge.vertex_index_a, edge.vertex_index_b]}
    try:
        bundle = ch.compute_bundle(gens[edge.vertex_index_a], gens[edge.vertex_index_b], point)
        cert = ch.find_fuller_covector(gens, edge, bundle, point)
    except ch.DimensionTooSmall as exc:
        out.update(status="DimensionTooSmall", detail=str(exc))
        print(f"DimensionTooSmall: {exc}")
        _write_or_print(args.json, out)
        return EXIT_DOMAIN
    except ch.NotFound as exc:
        out.update(status="NotFound", condition=exc.condition, detail=exc.detail)
        print(f"NotFound({exc.condition}): {exc.detail}")
        _write_or_print(args.json, out)
        return EXIT_DOMAIN
    out.update(status="certificate", certificate=cert.to_dict(),
               reverification=ch.reverify_certificate(cert, gens))
    _write_or_print(args.json, out)
    return EXIT_OK if out["reverification"]["all"] else EXIT_DOMAIN


def _write_or_print(path, obj):
    if path:
        write_json(path, obj)
    else:
        sys.stdout.write(dumps(obj))


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=_default_seed(),
                        help="random seed (default: $CHATTERLAB_SEED or 0)")
    common.add_argument("--eps", type=_positive, default=fl.DEFAULT_EPS,
                        help="chattering truncation radius")
    common.add_argument("--out-dir", default=".", help="directory for output files")
    common.add_argument("--format", choices=("csv", "json"), default="csv",
                        help="trajectory file format")
    common.add_argument("--json", default=None, help="write a JSON report to this path")

    parser = argparse.ArgumentParser(prog="chatterlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    pf = sub.add_parser("fuller", help="Fuller problem synthesis and values")
    fsub = pf.add_subparsers(dest="action", required=True)
    fsub.add_parser("mu", parents=[common], help="self-similarity ratio")
    for name in ("simulate", "tf", "jf"):
        p = fsub.add_parser(name, parents=[common])
        p.add_argument("--x0", type=float, required=True)
        p.add_argument("--y0", type=float, required=True)
    p = fsub.add_parser("finite", parents=[common], help="finite-horizon problem")
    for k in ("x0", "y0", "x1", "y1"):
        p.add_argument(f"--{k}", type=float, required=True)
    p.add_argument("--t1", type=_positive, required=True)
    p.add_argument("--verify", action="store_true", help="check the PMP certificate")
    pf.set_defaults(func=cmd_fuller)

    pg = sub.add_parser("geodesic", help="explicit chattering shortest paths")
    gsub = pg.add_subparsers(dest="action", required=True)
    for name in ("r4-subfinsler", "r4-finsler", "carnot-subfinsler", "carnot-finsler"):
        p = gsub.add_parser(name, parents=[common])
        for k in ("x0", "y0", "x1", "y1"):
            p.add_argument(f"--{k}", type=float, default=0.0)
        p.add_argument("--slack", type=_nonneg, default=0.0, help="w1 - w0 minus the Fuller time sum")
        p.add_argument("--z1", type=float, default=None, help="override the endpoint z (default: J sum)")
        p.add_argument("--w1", type=float, default=None, help="override the endpoint w (default: T sum + slack)")
        p.add_argument("--verify", action="store_true", help="run adversarial and oracle checks")
        p.add_argument("--samples", type=int, default=200, help="adversarial competitors")
        p.add_argument("--samples-out", type=int, default=1001, help="rows in the trajectory file")
    pg.set_defaults(func=cmd_geodesic)

    pc = sub.add_parser("check", help="bracket tables and chattering hypotheses")
    csub = pc.add_subparsers(dest="action", required=True)
    p = csub.add_parser("brackets", parents=[common])
    p.add_argument("--system", required=True, help="builtin:<name> or a YAML file")
    p = csub.add_parser("chattering", parents=[common])
    p.add_argument("--system", required=True)
    p.add_argument("--point", type=_point, default=None, help="comma-separated coordinates")
    p.add_argument("--edge", type=lambda s: tuple(int(v) for v in s.split(",")), default=None)
    pc.set_defaults(func=cmd_check)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
