"""Command-line surface.

Subcommands: info (information measures on a channel), rd (rate-distortion
curves), region (inner/outer region sweeps), simulate (seeded Monte-Carlo),
verify (acceptance-check runner), spec-check (validate a channel document).

Every command emits CSV with '#'-prefixed provenance comments, a comma
delimiter and 12 significant digits; curve/region commands also render a
matplotlib figure next to the CSV unless --no-figure is given. Exit codes:
0 success, 1 verification failure, 2 usage error, 3 input/parse error.
"""

from __future__ import annotations

import argparse
import re
import sys

import numpy as np

from . import prob
from .channels import assemble_joint, build_example, expand_derived, hamming, uniform_inputs
from .csvio import write_table
from .errors import (
    ArgumentError,
    IsacError,
    ParseError,
    SchemaError,
    UnknownVariableError,
    UsageError,
)
from .rd import RdProblem, rd_curve

INNER_SCHEMES = ("our", "our-com", "awk", "kobayashi")
OUTER_SCHEMES = ("outer-our", "outer-khkc")


# ---------------------------------------------------------------------------
# measure expressions: I(A;B|C) and H(A|B)
# ---------------------------------------------------------------------------

_NAME = re.compile(r"[A-Za-z][A-Za-z0-9_]*")


def _split_names(part, text):
    names = [n for n in re.split(r"[\s,]+", part.strip()) if n]
    for n in names:
        if not _NAME.fullmatch(n):
            raise ParseError(
                f"bad variable token {n!r} in {text!r}", 1, text.find(n) + 1
            )
    if not names:
        raise ParseError(f"empty variable list in {text!r}", 1, 1)
    return tuple(names)


def parse_measure(text):
    """Parse 'I(A;B|C)' or 'H(A|B)' into an evaluation plan."""
    s = text.strip()
    m = re.fullmatch(r"(I|H)\s*\((.*)\)", s, flags=re.S)
    if not m:
        raise ParseError(f"expected I(...) or H(...) in {text!r}", 1, 1)
    kind, body = m.group(1), m.group(2)
    if "|" in body:
        body, given = body.split("|", 1)
        given = _split_names(given, text)
    else:
        given = ()
    if kind == "I":
        if ";" not in body:
            raise ParseError(f"I(...) needs ';' in {text!r}", 1, text.find("(") + 2)
        a, b = body.split(";", 1)
        return ("I", _split_names(a, text), _split_names(b, text), given)
    return ("H", _split_names(body, text), given)


def evaluate_measure(joint, plan):
    if plan[0] == "I":
        return prob.mutual_info(joint, set(plan[1]), set(plan[2]), set(plan[3]))
    return prob.entropy(joint, set(plan[1]), set(plan[2]))


# ---------------------------------------------------------------------------
# shared helpers
# ---------------------------------------------------------------------------

def _load_channel(args):
    if getattr(args, "example", None) is not None:
        return build_example(args.example)
    if getattr(args, "spec", None):
        from .specfile import parse_channel_spec

        with open(args.spec, "r", encoding="utf-8") as fh:
            return parse_channel_spec(fh.read())
    raise UsageError("one of --example or --spec is required")


def _figure_path(args):
    if getattr(args, "no_figure", False):
        return None
    if getattr(args, "figure", None):
        return args.figure
    out = getattr(args, "out", None)
    if out in (None, "-"):
        return None
    return re.sub(r"\.[A-Za-z0-9]+$", "", out) + ".png"


def _emit(args, comments, header, rows):
    write_table(args.out, comments, header, rows)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_info(args):
    ch = _load_channel(args)
    plan = parse_measure(args.expr)
    joint = assemble_joint(ch, uniform_inputs(ch, p1=args.px1, p2=args.px2))
    joint = expand_derived(ch, joint)
    value = evaluate_measure(joint, plan)
    comments = [
        "command=info",
        f"channel={ch.name}",
        f"px1={'uniform' if args.px1 is None else args.px1}",
        f"px2={'uniform' if args.px2 is None else args.px2}",
    ]
    _emit(args, comments, ["expr", "value"], [[args.expr, value]])
    return 0


def _parse_grid(text):
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError("grid must be start:stop:count or comma values")
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
        return [round(float(v), 12) for v in np.linspace(lo, hi, n)]
    return [float(v) for v in text.split(",") if v.strip()]


def cmd_rd(args):
    if args.bern is not None:
        pmf = np.array([1.0 - args.bern, args.bern])
    elif args.pmf:
        pmf = np.array([float(v) for v in args.pmf.split(",")])
    else:
        raise UsageError("one of --bern or --pmf is required")
    if np.any(pmf < 0) or abs(pmf.sum() - 1.0) > 1e-9:
        raise ArgumentError("source pmf must be nonnegative and sum to 1")
    source = prob.JointDist(("T",), pmf)
    problem = RdProblem(source, ("T",), "T", hamming(len(pmf)))
    grid = _parse_grid(args.dgrid)
    points = rd_curve(problem, sorted(grid))
    comments = [
        "command=rd",
        f"pmf={','.join(f'{v:.12g}' for v in pmf)}",
        f"dgrid={args.dgrid}",
        "distortion=hamming",
    ]
    _emit(args, comments, ["D", "R", "lambda"],
          [[p.D, p.R, p.multiplier] for p in points])
    fig = _figure_path(args)
    if fig:
        from .report import render_rd_curve

        render_rd_curve(points, fig)
    return 0


def _inner_region(args, ch):
    from . import inner

    if args.scheme == "kobayashi" or args.compress == "none":
        grid = inner.Example12Grid()
        kind = "awk" if args.scheme == "kobayashi" else "our"
        result = inner.sweep_no_compression(
            ch, kind, grid=grid, processes=args.processes
        )
        results = {args.scheme: result}
    elif args.example == 4:
        grid = inner.Example4Grid()
        if args.coarse:
            grid = inner.Example4Grid(
                p_u=(0.0,), p_s1=(0.0, 0.2, 0.4, 0.5, 1.0), p_s2=(0.0,),
                p_t1=(0.0, 0.25, 0.5), p_t2=(0.5,),
                p_e=inner._steps(0.0, 0.3, 16), zoom=10,
            )
        results = {
            args.scheme: inner.sweep_example4(
                (args.scheme,), grid=grid, processes=args.processes, channel=ch
            )[args.scheme]
        }
    elif args.example in (1, 2):
        kind = args.scheme
        if args.example == 2 and kind == "our-com":
            kind = "our"
        if args.example == 1 and kind == "our-com":
            raise UsageError("example 1's bundled family has no our-com variant")
        results = {
            args.scheme: inner.sweep_example12(
                args.example, kind, processes=args.processes, channel=ch
            )
        }
    else:
        raise UsageError(
            f"scheme {args.scheme!r} has no bundled family on example {args.example}"
        )

    result = results[args.scheme]
    pts = result.points
    frontier = []
    if pts:
        seen = set()
        for p in (
            inner.pareto_frontier(pts)
            + inner.rate_slice_frontier(pts, 1)
            + inner.rate_slice_frontier(pts, 2)
        ):
            if (p.key(), p.params) not in seen:
                seen.add((p.key(), p.params))
                frontier.append(p)
    frontier.sort(key=lambda p: (p.key(), p.params))
    param_names = sorted({k for p in frontier for k, _ in p.params})
    header = ["R1", "R2", "D1", "D2"] + param_names
    rows = []
    for p in frontier:
        d = dict(p.params)
        rows.append([p.r1, p.r2, p.d1, p.d2] + [d.get(k, "") for k in param_names])
    comments = [
        "command=region",
        f"scheme={args.scheme}",
        f"channel={ch.name}",
        f"points={len(pts)}",
        "rows=frontier (maximal set plus both single-rate slices)",
    ]
    _emit(args, comments, header, rows)
    fig = _figure_path(args)
    if fig and frontier:
        from .report import render_region_points

        render_region_points(frontier, fig, title=f"{ch.name}: {args.scheme}")
    return 0


def _outer_region(args, ch):
    from . import outer

    if args.symmetric:
        if args.example != 4:
            raise UsageError("--symmetric is bundled for example 4 only")
        curves = outer.sweep_example4_outer(channel=ch)
        key = "our" if args.scheme == "outer-our" else "khkc"
        pts = curves[key]
        comments = [
            "command=region", f"scheme={args.scheme}", f"channel={ch.name}",
            "rows=symmetric-rate upper envelope",
        ]
        _emit(args, comments, ["D2", "R"], [[p.d2, p.rate] for p in pts])
        fig = _figure_path(args)
        if fig:
            from .report import render_symmetric_curves

            render_symmetric_curves({key: pts}, fig, title=f"{ch.name}: {args.scheme}")
        return 0

    schemes = outer.outer_scheme_grid(ch, kappas=(0.5,), levels=(0.0, 0.5, 1.0))
    stride = max(1, len(schemes) // max(args.limit, 1))
    schemes = schemes[::stride][: args.limit]
    rows = []
    for s in schemes:
        if args.scheme == "outer-khkc":
            poly, d1m, d2m = outer.eval_outer_khkc(ch, s)
        else:
            poly, _, _ = outer.eval_outer_khkc(ch, s)
            d1m = outer.min_distortion_our(ch, s, 1)
            d2m = outer.min_distortion_our(ch, s, 2)
        p = s.params
        rows.append([
            poly.r1, poly.r2, poly.sum12[0], poly.sum12[1], d1m, d2m,
            p["kappa"], p["pi1"][0], p["pi1"][1], p["pi2"][0], p["pi2"][1],
        ])
    rows.sort()
    comments = [
        "command=region", f"scheme={args.scheme}", f"channel={ch.name}",
        f"schemes={len(schemes)}",
        "rows=per-scheme rate bounds and minimum distortions",
    ]
    _emit(
        args, comments,
        ["R1max", "R2max", "Rsum_a", "Rsum_b", "D1min", "D2min",
         "kappa", "pi1_t0", "pi1_t1", "pi2_t0", "pi2_t1"],
        rows,
    )
    return 0


def cmd_region(args):
    ch = _load_channel(args)
    if args.scheme in INNER_SCHEMES:
        return _inner_region(args, ch)
    return _outer_region(args, ch)


def cmd_simulate(args):
    from .mc import SimConfig, simulate

    ch = _load_channel(args)
    obs = tuple(v for v in args.obs.split(",") if v)
    cfg = SimConfig(
        ch, obs, args.target, args.n, args.seed, p1=args.px1, p2=args.px2
    )
    mean, stderr = simulate(cfg)
    comments = [
        "command=simulate", f"channel={ch.name}", f"obs={args.obs}",
        f"target={args.target}", f"seed={args.seed}",
    ]
    _emit(args, comments, ["n", "seed", "distortion", "stderr"],
          [[args.n, args.seed, mean, stderr]])
    return 0


def cmd_verify(args):
    from .acceptance import run_verify

    ok = run_verify(only=args.only, processes=args.processes)
    return 0 if ok else 1


def cmd_spec_check(args):
    from .specfile import parse_channel_spec

    with open(args.file, "r", encoding="utf-8") as fh:
        text = fh.read()
    ch = parse_channel_spec(text)
    sizes = ",".join(f"{k}={v}" for k, v in sorted(ch.alphabets.items()))
    print(f"ok: {ch.name} ({sizes})")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(
        prog="isacmac",
        description="capacity-distortion bounds for two-transmitter sensing channels",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def add_channel_opts(sp):
        sp.add_argument("--example", type=int, choices=(1, 2, 3, 4))
        sp.add_argument("--spec", help="channel spec document")

    def add_out_opts(sp, figure=True):
        sp.add_argument("--out", default="-", help="CSV path or '-' for stdout")
        if figure:
            sp.add_argument("--figure", help="figure path (default: CSV path .png)")
            sp.add_argument("--no-figure", action="store_true")

    sp = sub.add_parser("info", help="evaluate an information measure")
    add_channel_opts(sp)
    sp.add_argument("--expr", required=True, help="I(A;B|C) or H(A|B)")
    sp.add_argument("--px1", type=float)
    sp.add_argument("--px2", type=float)
    add_out_opts(sp, figure=False)
    sp.set_defaults(func=cmd_info)

    sp = sub.add_parser("rd", help="rate-distortion curve of a finite source")
    sp.add_argument("--bern", type=float, help="P(T=1) of a binary source")
    sp.add_argument("--pmf", help="comma-separated source pmf")
    sp.add_argument("--dgrid", default="0:0.3:31", help="start:stop:count or values")
    add_out_opts(sp)
    sp.set_defaults(func=cmd_rd)

    sp = sub.add_parser("region", help="sweep an achievable or outer region")
    add_channel_opts(sp)
    sp.add_argument("--scheme", required=True, choices=INNER_SCHEMES + OUTER_SCHEMES)
    sp.add_argument("--symmetric", action="store_true",
                    help="symmetric-rate curve (outer schemes, example 4)")
    sp.add_argument("--coarse", action="store_true", help="smaller default grids")
    sp.add_argument("--compress", choices=("family", "none"), default="family",
                    help="'none' drops the compression variables from the family")
    sp.add_argument("--limit", type=int, default=16,
                    help="scheme budget for non-symmetric outer sweeps")
    sp.add_argument("--processes", type=int)
    add_out_opts(sp)
    sp.set_defaults(func=cmd_region)

    sp = sub.add_parser("simulate", help="seeded Monte-Carlo distortion check")
    add_channel_opts(sp)
    sp.add_argument("--obs", required=True, help="comma-separated observed variables")
    sp.add_argument("--target", required=True, choices=("ST1", "ST2"))
    sp.add_argument("--n", type=int, default=100_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--px1", type=float)
    sp.add_argument("--px2", type=float)
    add_out_opts(sp, figure=False)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("verify", help="run the acceptance-criteria suite")
    sp.add_argument("--only", action="append",
                    help="criterion id prefix (repeatable)")
    sp.add_argument("--processes", type=int)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("spec-check", help="validate a channel spec document")
    sp.add_argument("file")
    sp.set_defaults(func=cmd_spec_check)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (ParseError, SchemaError, UnknownVariableError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 3
    except ArgumentError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except IsacError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
