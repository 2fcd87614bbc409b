"""Command-line interface: ``nestline {solve,seed,verify,render,bench}``.

Exit codes: 0 success, 1 verification failure, 2 input error, 3 solver error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__, kernels
from .geometry import separating_axis
from .instance import NestingInstance, ParseError, ValidationError, parse_instance
from .model import build_problem, check_feasibility, min_part_area
from .render import render_svg
from .report import Layout, RunReport, dumps, report_from_run, report_table
from .seeding import DoesNotFit, default_scale, generate_start, line_from_separator
from .solver import AllStartsFailed, NonFiniteEvaluation, SolverOptions, multi_start, options_dict

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_SOLVER = 0, 1, 2, 3
VIOLATION_TOL = 1e-6
OVERLAP_REL_TOL = 1e-8

log = logging.getLogger("nestline")


class InputError(Exception):
    pass


def _threads(args) -> int:
    if args.threads is not None:
        return args.threads
    env = os.environ.get("NESTLINE_THREADS")
    if env:
        try:
            t = int(env)
        except ValueError:
            raise InputError(f"NESTLINE_THREADS must be an integer, got {env!r}") from None
        if t < 1:
            raise InputError("NESTLINE_THREADS must be >= 1")
        return t
    return 1


def _scale(args, inst: NestingInstance) -> float:
    if args.raster_scale is not None:
        return args.raster_scale
    if inst.raster_scale is not None:
        return inst.raster_scale
    return default_scale(inst.name)


def _positive_int(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _positive_float(s: str) -> float:
    v = float(s)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be > 0")
    return v


def _seed(s: str) -> int:
    v = int(s, 0)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _write(path, text: str) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(text, encoding="utf-8")


def _load_layout(path) -> Layout:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        return Layout.from_dict(doc)
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        raise ParseError(f"{path}: {exc}") from exc


# --- subcommands -----------------------------------------------------------

def cmd_solve(args) -> int:
    inst = parse_instance(args.instance)
    scale = _scale(args, inst)
    opts = SolverOptions(max_time_seconds=args.max_time)
    try:
        res = multi_start(inst.pieces, inst.strip_width, args.starts, opts, args.seed,
                          args.bl_iters, scale, _threads(args))
    except AllStartsFailed as exc:
        for r in exc.records:
            print(f"start {r.start}: {r.status} seed_length={r.seed_length:.4f}", file=sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (NonFiniteEvaluation, DoesNotFit) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    rep = report_from_run(inst.name, res, args.seed, args.bl_iters, scale, options_dict(opts),
                          timings=not args.no_timings)
    text, _ = report_table([rep])
    print(text, end="")
    if args.out_json:
        _write(args.out_json, dumps(rep.to_dict()))
    if args.out_svg:
        render_svg(rep.layout, inst.pieces, inst.strip_width, args.out_svg)
    if args.seed_svg:
        render_svg(rep.seed_layout, inst.pieces, inst.strip_width, args.seed_svg)
    return EXIT_OK


def cmd_seed(args) -> int:
    inst = parse_instance(args.instance)
    scale = _scale(args, inst)
    try:
        lay = generate_start(inst.pieces, inst.strip_width, args.bl_iters, args.seed, scale=scale)
    except DoesNotFit as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    problem = build_problem(inst.pieces, inst.strip_width, z_upper=lay.length)
    v = problem.encode(lay.length, lay.placements, lay.line_init)
    layout = Layout.from_vector(problem, v, inst.name)
    print(f"{inst.name}: seed length {lay.length:.6g} (iteration {lay.iteration})")
    if args.out_json:
        _write(args.out_json, dumps(layout.to_dict()))
    if args.out_svg:
        render_svg(layout, inst.pieces, inst.strip_width, args.out_svg)
    return EXIT_OK


def _lines_for(layout: Layout, problem):
    """Use the file's separation lines, or derive one per pair when absent."""
    if layout.lines:
        if tuple(layout.pairs) != tuple(problem.pairs):
            raise InputError("layout separation lines do not match the instance's part pairs")
        return layout.lines
    placed = problem.placed_parts(layout.placements)
    lines = []
    for pr in problem.pairs:
        sep = separating_axis(placed[(pr.piece_i, pr.part_j)], placed[(pr.piece_r, pr.part_s)])
        # overlapping pairs get a dummy line; the overlap oracle reports them
        lines.append(line_from_separator(*sep) if sep else line_from_separator((0.0, 0.0), 0.0))
    return lines


def verify_layout(inst: NestingInstance, layout: Layout):
    """Return ``(ok, lines_of_text)`` for a layout against an instance."""
    if len(layout.placements) != inst.n:
        raise InputError(f"layout places {len(layout.placements)} pieces, instance has {inst.n}")
    problem = build_problem(inst.pieces, inst.strip_width)
    v = problem.encode(layout.length, layout.placements, _lines_for(layout, problem))
    rep = check_feasibility(v, problem)
    if not layout.lines:
        rep.families["separation"] = 0.0
        rep.max_violation = max(rep.families.values())
    overlap_tol = OVERLAP_REL_TOL * min_part_area(inst.pieces)
    bad = [(pr, a) for pr, a in rep.overlapping_pairs if a > overlap_tol]
    ok = rep.max_violation <= VIOLATION_TOL and not bad
    out = [f"instance {inst.name}: length {layout.length:.6g}, {problem.Q} part pairs"]
    for name, val in rep.families.items():
        out.append(f"  {name:<14} max violation {val:.3e}")
    out.append(f"  max overlap area {rep.max_overlap:.3e} (tolerance {overlap_tol:.3e})")
    for pr, a in bad:
        ida, idb = inst.pieces[pr.piece_i].id, inst.pieces[pr.piece_r].id
        out.append(f"  OVERLAP piece {ida} part {pr.part_j} / piece {idb} part {pr.part_s}: area {a:.6g}")
    out.append("PASS" if ok else "FAIL")
    return ok, out


def cmd_verify(args) -> int:
    inst = parse_instance(args.instance)
    layout = _load_layout(args.layout)
    ok, text = verify_layout(inst, layout)
    print("\n".join(text))
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_render(args) -> int:
    inst = parse_instance(args.instance)
    layout = _load_layout(args.layout)
    if not args.out_svg:
        raise InputError("render needs --out-svg")
    render_svg(layout, inst.pieces, inst.strip_width, args.out_svg)
    return EXIT_OK


def cmd_bench(args) -> int:
    from .bench import bench_kernels, format_rows

    inst = parse_instance(args.instance)
    rows = bench_kernels(inst.pieces, inst.strip_width, args.evals, args.bl_iters,
                         _scale(args, inst), seed=args.seed)
    print(f"{inst.name}: default backend {kernels.BACKEND}")
    print(format_rows(rows, args.evals, args.bl_iters))
    if args.out_json:
        _write(args.out_json, dumps({"instance": inst.name, "rows": rows}))
    return EXIT_OK


def cmd_table(args) -> int:
    reps = []
    for p in args.reports:
        try:
            reps.append(RunReport.from_dict(json.loads(Path(p).read_text(encoding="utf-8"))))
        except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
            raise ParseError(f"{p}: {exc}") from exc
    text, rows = report_table(reps)
    print(text, end="")
    if args.out_json:
        _write(args.out_json, dumps({"rows": rows}))
    return EXIT_OK


# --- parser ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nestline", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, bl_default=1000):
        sp.add_argument("--instance", required=True, help="instance JSON file")
        sp.add_argument("--bl-iters", type=_positive_int, default=bl_default,
                        help="bottom-left iterations per start")
        sp.add_argument("--raster-scale", type=_positive_float, default=None,
                        help="raster cell size (default: from instance, else 1.0)")
        sp.add_argument("--seed", type=_seed, default=0, help="root RNG seed (u64)")

    s = sub.add_parser("solve", help="multi-start seed and local optimization")
    common(s)
    s.add_argument("--starts", type=_positive_int, default=10)
    s.add_argument("--max-time", type=_positive_float, default=3600.0,
                   help="solve budget per start, seconds")
    s.add_argument("--threads", type=_positive_int, default=None,
                   help="parallel starts (default: $NESTLINE_THREADS or 1)")
    s.add_argument("--out-json", help="write the run report here")
    s.add_argument("--out-svg", help="write the best final layout here")
    s.add_argument("--seed-svg", help="write the matching starting layout here")
    s.add_argument("--no-timings", action="store_true",
                   help="omit wall-clock fields so reports are byte-reproducible")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("seed", help="bottom-left starting layout only")
    common(s)
    s.add_argument("--out-json", help="write the layout here")
    s.add_argument("--out-svg")
    s.set_defaults(func=cmd_seed)

    s = sub.add_parser("verify", help="check a layout for feasibility")
    s.add_argument("--instance", required=True)
    s.add_argument("--layout", required=True, help="layout or run report JSON")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("render", help="draw a layout as SVG")
    s.add_argument("--instance", required=True)
    s.add_argument("--layout", required=True, help="layout or run report JSON")
    s.add_argument("--out-svg", required=True)
    s.set_defaults(func=cmd_render)

    s = sub.add_parser("bench", help="time compiled against pure-Python kernels")
    common(s, bl_default=50)
    s.add_argument("--evals", type=_positive_int, default=200)
    s.add_argument("--out-json")
    s.set_defaults(func=cmd_bench)

    s = sub.add_parser("table", help="summary table from run reports")
    s.add_argument("reports", nargs="+")
    s.add_argument("--out-json")
    s.set_defaults(func=cmd_table)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ParseError, ValidationError, InputError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
