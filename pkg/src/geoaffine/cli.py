"""Command-line front end.

Exit status: 0 when every property checked by the run holds, 1 when one
fails, 2 for usage errors, 3 when a geometric precondition is violated.
"""
from __future__ import annotations

import argparse
import math
import re
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import report
from .affine import (
    F0_AT_CHORD_END,
    F0_AT_CHORD_MID,
    AffineProbe,
    counterexample_suite,
)
from .convexity import (
    ScanVerdict,
    construction_applies,
    convexity_scan,
    example_chord,
    necessity_construction,
    sublevel_membership,
    threshold_experiment,
    triangle_suite,
)
from .errors import GeometryError
from .levelset import level_grid, levelset_svg
from .manifold import Kind, SpaceSpec, norm, transport_between
from .sampling import DEFAULT_SEED

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_GEOMETRY = 0, 1, 2, 3


class _Usage(Exception):
    pass


_DEFAULT_KAPPA = {"euclidean": 0.0, "sphere": 1.0, "hyperbolic": -1.0, "halfplane": -1.0}


def _floats(tokens: Optional[Sequence[str]]) -> Optional[list[float]]:
    """Accept ``0.5 0.5``, ``0.5,0.5`` or a mix of both."""
    if tokens is None:
        return None
    return [float(p) for tok in tokens for p in tok.split(",") if p.strip()]


def build_space(args) -> SpaceSpec:
    kappa = _DEFAULT_KAPPA[args.space] if args.kappa is None else args.kappa
    if args.space == "halfplane":
        if args.dim not in (None, 2) or kappa != -1.0:
            raise GeometryError("the half-plane is fixed at dim 2 and kappa -1")
        return SpaceSpec.halfplane()
    return SpaceSpec(Kind(args.space), 2 if args.dim is None else args.dim, kappa)


def build_probe(args, space: SpaceSpec) -> AffineProbe:
    x0 = _floats(args.x0)
    u0 = _floats(args.u0)
    if x0 is None and u0 is None:
        return AffineProbe.canonical(space)
    base = space.origin() if x0 is None else space.point(x0)
    if u0 is None:
        return AffineProbe.canonical(space) if x0 is None else AffineProbe(space, base, _first_direction(space, base))
    return AffineProbe(space, base, space.tangent(base, u0))


def _first_direction(space, base):
    from .manifold import tangent_basis

    basis = tangent_basis(space, base)
    return basis[-1] if space.kind is Kind.HALFPLANE else basis[0]


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _say(args, line: str) -> None:
    # keep stdout clean for the report when it goes there
    print(line, file=sys.stdout if args.out else sys.stderr)


# ---------------------------------------------------------------------------
# commands


def cmd_verify_counterexample(args) -> int:
    rep = counterexample_suite(tol=args.tol)
    reference = {
        "i": f"reference: f0(+-1/2, 1/2) = {report.fmt(F0_AT_CHORD_END)}, f0(0, 1/sqrt2) = {report.fmt(F0_AT_CHORD_MID)}",
        "ii": "reference: grad f0(z) = (sqrt2/8 ln(3+2sqrt2) + 1/2, sqrt2/8 ln(3+2sqrt2) - 1/2), X0(z) = (1, 0)",
        "iii": "reference: covariant derivative along d/dt1 at z = (0, 0.5)",
        "iv": "reference: exterior derivative coefficient at z = 0.5",
    }
    for a in rep.assertions:
        got = "; ".join(f"{k} = {report.fmt(v)}" for k, v in a.computed.items())
        _say(args, f"{'PASS' if a.passed else 'FAIL'} ({a.key}) {a.claim} | computed: {got} | {reference[a.key]} | tol {report.fmt(a.tolerance)}")
    if args.format == "csv":
        rows = []
        for a in rep.assertions:
            for name, val in a.computed.items():
                rows.append((a.key, name, val, a.expected.get(name, ""), a.tolerance, a.passed))
        text = report.to_csv(("assertion", "quantity", "computed", "expected", "tolerance", "passed"), rows)
    elif args.format == "json":
        text = report.to_json("counterexample", rep.to_dict())
    else:
        raise _Usage("verify-counterexample writes json or csv")
    _emit(args, text)
    return EXIT_OK if rep.all_passed else EXIT_FAIL


def _scan_inject(args, probe, c):
    inject = []
    if args.inject_example_chord:
        if not probe.is_standard_halfplane:
            raise GeometryError("--inject-paper-points needs the standard half-plane probe")
        p, q = example_chord()
        if sublevel_membership(probe, c, p) and sublevel_membership(probe, c, q):
            inject.append((p, q))
    if args.inject_construction and construction_applies(probe, c):
        inject.append(necessity_construction(probe, c))
    return inject


def _predicted(probe: AffineProbe, c: float) -> ScanVerdict:
    return ScanVerdict.WITNESS_FOUND if construction_applies(probe, c) else ScanVerdict.NO_WITNESS


def cmd_scan(args) -> int:
    space = build_space(args)
    probe = build_probe(args, space)
    if args.c is None:
        raise _Usage("scan needs --c")
    rep = convexity_scan(probe, args.c, args.pairs, args.steps, args.seed, inject=_scan_inject(args, probe, args.c))
    ok = rep.certificate is None or rep.certificate.holds
    _say(args, f"{rep.verdict.value} at c = {report.fmt(rep.c)} ({rep.n_pairs} pairs, {rep.n_steps} steps, seed {rep.seed})")
    if rep.witness is not None:
        w = rep.witness
        _say(args, f"witness p = ({report.fmt(w.p.coords)}), q = ({report.fmt(w.q.coords)}), t = {report.fmt(w.t)}, f0 = {report.fmt(w.value)}")
    if args.format == "csv":
        text = report.to_csv(report.SCAN_COLUMNS, report.scan_rows([rep]))
    elif args.format == "json":
        text = report.to_json("scan", rep.to_dict())
    else:
        raise _Usage("scan writes json or csv")
    _emit(args, text)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_sweep(args) -> int:
    space = build_space(args)
    probe = build_probe(args, space)
    grid = _floats(args.c_grid)
    if not grid:
        raise _Usage("sweep needs --c-grid")
    table = threshold_experiment(
        probe,
        grid,
        args.pairs,
        args.steps,
        args.seed,
        inject_construction=args.inject_construction,
        inject_example_chord=args.inject_example_chord and probe.is_standard_halfplane,
    )
    ok = True
    rows = []
    for r in table.rows:
        expected = _predicted(probe, r.c)
        cert_ok = r.certificate is None or r.certificate.holds
        agrees = r.verdict is expected
        ok = ok and cert_ok and (agrees or not args.inject_construction)
        _say(args, f"c = {report.fmt(r.c)}: {r.verdict.value} (threshold predicts {expected.value}){'' if cert_ok else ' certificate FAILED'}")
        rows.append({**r.to_dict(), "expected_verdict": expected.value, "agrees": agrees})
    if args.format == "csv":
        text = report.to_csv(report.SCAN_COLUMNS, report.scan_rows(table.rows))
    elif args.format == "json":
        text = report.to_json("sweep", {"probe": probe.to_dict(), "rows": rows})
    else:
        raise _Usage("sweep writes json or csv")
    _emit(args, text)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_triangles(args) -> int:
    space = build_space(args)
    rep = triangle_suite(space, args.triangles, args.seed)
    d = rep.to_dict()
    for key in ("combination", "law_of_cosines", "comparison"):
        vals = ", ".join(f"{k} = {report.fmt(v)}" for k, v in d[key].items() if k != "holds")
        _say(args, f"{'PASS' if d[key]['holds'] else 'FAIL'} {key}: {vals}")
    if args.format == "csv":
        rows = [(sec, k, v) for sec in ("combination", "law_of_cosines", "comparison") for k, v in d[sec].items()]
        text = report.to_csv(("suite", "statistic", "value"), rows)
    elif args.format == "json":
        text = report.to_json("triangles", d)
    else:
        raise _Usage("triangles writes json or csv")
    _emit(args, text)
    return EXIT_OK if rep.all_hold else EXIT_FAIL


def cmd_plot_levelset(args) -> int:
    space = build_space(args)
    probe = build_probe(args, space)
    c = -0.4 if args.c is None else args.c
    window = _floats(args.window)
    if window is not None and len(window) != 4:
        raise _Usage("--window takes four numbers: t1min t1max t2min t2max")
    grid = level_grid(probe, c, window, args.resolution)
    if args.format == "svg":
        text = levelset_svg(grid)
    elif args.format == "csv":
        text = report.to_csv(("t1", "t2", "f0"), grid.csv_rows())
    else:
        raise _Usage("plot-levelset writes csv or svg")
    _emit(args, text)
    return EXIT_OK


def cmd_transport(args) -> int:
    space = build_space(args)
    x = space.origin() if args.x0 is None else space.point(_floats(args.x0))
    if args.to is None or args.u0 is None:
        raise _Usage("transport needs --to and --u0")
    y = space.point(_floats(args.to))
    v = space.tangent(x, _floats(args.u0))
    w = transport_between(space, x, y, v)
    payload = {
        "space": space.to_dict(),
        "from": x.coords,
        "to": y.coords,
        "vector": v.comps,
        "transported": w.comps,
        "norm_before": norm(space, v),
        "norm_after": norm(space, w),
    }
    _say(args, f"P v = ({report.fmt(w.comps)}), |v| = {report.fmt(payload['norm_before'])}, |P v| = {report.fmt(payload['norm_after'])}")
    if args.format == "csv":
        text = report.to_csv(tuple(k for k in payload if k != "space"), [tuple(payload[k] for k in payload if k != "space")])
    elif args.format == "json":
        text = report.to_json("transport", payload)
    else:
        raise _Usage("transport writes json or csv")
    _emit(args, text)
    ok = math.isclose(payload["norm_before"], payload["norm_after"], rel_tol=1e-9, abs_tol=1e-12)
    return EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--space", choices=list(_DEFAULT_KAPPA), default="halfplane")
    common.add_argument("--kappa", type=float, help="curvature (default 1 on spheres, -1 otherwise curved)")
    common.add_argument("--dim", type=int, help="intrinsic dimension (default 2)")
    common.add_argument("--x0", nargs="+", metavar="X", help="probe base point coordinates")
    common.add_argument("--u0", nargs="+", metavar="U", help="probe direction components at x0")
    common.add_argument("--c", type=float, help="sub-level value")
    common.add_argument("--c-grid", nargs="+", metavar="C", help="levels for sweep")
    common.add_argument("--pairs", type=int, default=500)
    common.add_argument("--steps", type=int, default=64)
    common.add_argument("--triangles", type=int, default=1000)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--tol", type=float, help="override every counterexample tolerance")
    common.add_argument("--inject-construction", action="store_true")
    common.add_argument("--inject-paper-points", dest="inject_example_chord", action="store_true", help="add the (1/2, 1/2), (-1/2, 1/2) chord on the standard half-plane probe")
    common.add_argument("--format", choices=("json", "csv", "svg"), default=None)
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("--to", nargs="+", metavar="Y", help="transport target point")
    common.add_argument("--window", nargs="+", metavar="W", help="plot window t1min t1max t2min t2max")
    common.add_argument("--resolution", type=int, default=121, help="plot grid nodes per axis")

    p = argparse.ArgumentParser(prog="geoaffine", description="Affine functions and convexity on constant-curvature spaces.")
    sub = p.add_subparsers(dest="command", required=True)
    for name, fn, fmt in (
        ("verify-counterexample", cmd_verify_counterexample, "json"),
        ("scan", cmd_scan, "json"),
        ("sweep", cmd_sweep, "json"),
        ("triangles", cmd_triangles, "json"),
        ("plot-levelset", cmd_plot_levelset, "svg"),
        ("transport", cmd_transport, "json"),
    ):
        sp = sub.add_parser(name, parents=[common])
        sp.set_defaults(func=fn, default_format=fmt)
    return p


_NEG_LIST = re.compile(r"^-[\d.][\d.eE+-]*(,[-+\d.eE]*)+$")


def _glue_negative_lists(argv: Sequence[str]) -> list[str]:
    """Rewrite ``--opt -1,2`` as ``--opt=-1,2``; argparse would read ``-1,2`` as a flag."""
    out: list[str] = []
    for tok in argv:
        if out and out[-1].startswith("--") and "=" not in out[-1] and _NEG_LIST.match(tok):
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(_glue_negative_lists(sys.argv[1:] if argv is None else argv))
    if args.format is None:
        args.format = args.default_format
    if args.seed < 0 or args.seed >= 2**64:
        parser.error("--seed must be an unsigned 64-bit integer")
    try:
        return args.func(args)
    except _Usage as exc:
        parser.error(str(exc))
    except GeometryError as exc:
        print(f"geometry error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_GEOMETRY
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GEOMETRY


if __name__ == "__main__":
    sys.exit(main())
