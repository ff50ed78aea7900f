"""Command-line entry point.

Subcommands: solve, merge, validate, metrics, render, bench, and
gen-cutting (synthetic instance generator for self-contained checks).
Exit codes: 0 ok, 1 validation failures reported, 2 input error,
3 internal infeasibility (a solver bug caught by the validator).
"""

from __future__ import annotations

import argparse
import concurrent.futures
import glob
import json
import os
import sys
import time

from . import io as nio
from .djd import VARIANTS, DjdConfig, UnplaceablePieceError, solve
from .gen import generate_cutting_instance
from .geometry import Tolerance
from .merge import MergeConfig, merge_all
from .metrics import report
from .model import validate

EXIT_OK = 0
EXIT_VIOLATIONS = 1
EXIT_INPUT = 2
EXIT_INFEASIBLE = 3


def _add_instance_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--instance", required=True, help="instance file (.json or text)")
    p.add_argument("--bin-width", type=float, default=None,
                   help="bin width for text instances")
    p.add_argument("--bin-length", type=float, default=None,
                   help="bin length for text instances")
    p.add_argument("--rotations", default=None,
                   help="comma-separated allowed rotations in degrees "
                        "(overrides the instance)")
    p.add_argument("--eps", type=float, default=None,
                   help="absolute geometric tolerance override "
                        "(sets both coincidence and slide thresholds)")


def _parse_rotations(text):
    try:
        return tuple(float(v) for v in text.split(",") if v.strip() != "")
    except ValueError:
        raise nio.ParseError(f"bad rotation list {text!r}") from None


def _load_instance(args):
    rotations = _parse_rotations(args.rotations) if args.rotations else None
    inst = nio.load_instance(args.instance, bin_width=args.bin_width,
                             bin_length=args.bin_length, rotations=rotations)
    changed = {}
    if rotations:
        changed["rotations"] = rotations
    if args.eps is not None:
        changed["tol"] = Tolerance(eps_abs=args.eps, eps_slide=args.eps)
    if changed:
        from dataclasses import replace
        inst = replace(inst, **changed)
    return inst


def _config_echo(inst, variant, threshold):
    return {
        "threshold": threshold,
        "eps_abs": inst.tol.eps_abs,
        "eps_slide": inst.tol.eps_slide,
        "rotations": list(inst.rotations),
        "variant": variant,
    }


def cmd_solve(args) -> int:
    inst = _load_instance(args)
    try:
        result = solve(inst, variant=args.algo, threshold=args.threshold)
    except UnplaceablePieceError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    violations = validate(result.solution, inst)
    if violations:
        for v in violations:
            print(f"error: {v}", file=sys.stderr)
        return EXIT_INFEASIBLE
    s = result.stats
    print(f"N={s.n_bins} F={s.f_value:.6f} K={s.k_value:.6f} "
          f"R*={s.r_star:.6f} pieces_after_merge={s.pieces_after_merge} "
          f"merge_time={s.merge_seconds:.3f} total_time={s.total_seconds:.3f}")
    if args.out:
        nio.write_solution(result.solution, args.out, stats=s,
                           config=_config_echo(inst, args.algo, args.threshold))
    if args.svg:
        nio.render_svg(result.solution, inst, args.svg,
                       merge_groups=s.merge_groups)
    return EXIT_OK


def cmd_merge(args) -> int:
    inst = _load_instance(args)
    cfg = MergeConfig.for_instance(inst, threshold=args.threshold)
    t0 = time.perf_counter()
    pieces, events = merge_all(list(inst.pieces), cfg)
    elapsed = time.perf_counter() - t0
    from dataclasses import replace
    merged = replace(inst, pieces=tuple(pieces), bin_bound=0)
    if args.out:
        nio.write_instance(merged, args.out)
    mapping = {p.id: [part.piece_id for part in p.parts]
               for p in pieces if len(p.parts) > 1}
    rep = {
        "threshold": args.threshold,
        "pieces_before": len(inst.pieces),
        "pieces_after": len(pieces),
        "merge_seconds": round(elapsed, 6),
        "merges": [
            {
                "kept": e.kept_id,
                "moved": e.moved_id,
                "combined": e.new_id,
                "rotation_cw": e.rotation_cw,
                "translation": list(e.translation),
                "fitness": {
                    "total": e.breakdown.total,
                    "vertex_reduction": e.breakdown.vertex_reduction,
                    "edge_overlap": e.breakdown.edge_overlap,
                    "rectangularity": e.breakdown.rectangularity,
                },
            }
            for e in events
        ],
        "combined_pieces": mapping,
    }
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(rep, fh, indent=1)
            fh.write("\n")
    print(f"pieces: {len(inst.pieces)} -> {len(pieces)} "
          f"({len(events)} merges, {elapsed:.3f}s)")
    return EXIT_OK


def cmd_validate(args) -> int:
    inst = _load_instance(args)
    solution, _ = nio.load_solution(args.solution, inst)
    violations = validate(solution, inst)
    if not violations:
        print("feasible: no violations")
        return EXIT_OK
    for v in violations:
        print(str(v))
    return EXIT_VIOLATIONS


def cmd_metrics(args) -> int:
    inst = _load_instance(args)
    solution, _ = nio.load_solution(args.solution, inst)
    rep = report(solution)
    us = " ".join(f"{u:.6f}" for u in rep.utilizations)
    print(f"N={rep.n_bins} F={rep.f_value:.6f} K={rep.k_value:.6f} "
          f"R*={rep.r_star:.6f}")
    print(f"U=[{us}]")
    return EXIT_OK


def cmd_render(args) -> int:
    inst = _load_instance(args)
    solution, meta = nio.load_solution(args.solution, inst)
    paths = nio.render_svg(solution, inst, args.svg,
                           merge_groups=meta.get("merge_groups") or {})
    print(f"wrote {len(paths)} SVG file(s) to {args.svg}")
    return EXIT_OK


def _bench_one(task):
    path, variant, threshold = task
    row = {"instance": os.path.basename(path), "variant": variant, "status": "ok"}
    try:
        inst = nio.load_instance(path)
        result = solve(inst, variant=variant, threshold=threshold)
        violations = validate(result.solution, inst)
        if violations:
            row["status"] = f"infeasible({len(violations)})"
            return row
        s = result.stats
        row.update(N=s.n_bins, F=s.f_value, K=s.k_value,
                   pieces_after_merge=s.pieces_after_merge,
                   merge_time=s.merge_seconds, total_time=s.total_seconds)
    except Exception as e:  # per-instance errors become rows, run continues
        row["status"] = f"error: {type(e).__name__}: {e}"
    return row


def cmd_bench(args) -> int:
    paths = sorted(glob.glob(os.path.join(args.dir, "*.json")))
    if not paths:
        print(f"error: no .json instances in {args.dir}", file=sys.stderr)
        return EXIT_INPUT
    variants = [v.strip() for v in args.algos.split(",") if v.strip()]
    for v in variants:
        if v not in VARIANTS:
            print(f"error: unknown variant {v!r}", file=sys.stderr)
            return EXIT_INPUT
    tasks = [(p, v, args.threshold) for p in paths for v in variants]
    if args.jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_bench_one, tasks))
    else:
        rows = [_bench_one(t) for t in tasks]
    rows.sort(key=lambda r: (r["instance"], r["variant"]))
    content = nio.write_bench_csv(rows, args.csv)
    if not args.csv:
        sys.stdout.write(content)
    else:
        print(f"wrote {len(rows)} rows to {args.csv}")
    return EXIT_OK


def cmd_gen_cutting(args) -> int:
    os.makedirs(args.out_dir, exist_ok=True)
    import random
    rng = random.Random(args.seed)
    for k in range(args.count):
        n_bins = rng.randint(args.bins_min, args.bins_max)
        n_pieces = rng.randint(max(args.pieces_min, n_bins), args.pieces_max)
        inst = generate_cutting_instance(
            seed=args.seed * 100003 + k, n_bins=n_bins, n_pieces=n_pieces,
            width=args.width, length=args.length)
        nio.write_instance(inst, os.path.join(args.out_dir, f"{inst.name}.json"))
    print(f"wrote {args.count} instances to {args.out_dir}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="nestpack",
        description="Constructive 2D irregular bin packing solver")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve an instance")
    _add_instance_args(p)
    p.add_argument("--algo", default="mergedjd", choices=sorted(VARIANTS),
                   help="solver variant")
    p.add_argument("--threshold", type=float, default=1.0,
                   help="merge fitness threshold")
    p.add_argument("--out", default=None, help="solution file to write")
    p.add_argument("--svg", default=None, help="directory for SVG rendering")
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("merge", help="run merge preprocessing only")
    _add_instance_args(p)
    p.add_argument("--threshold", type=float, default=1.0)
    p.add_argument("--out", default=None, help="merged instance file")
    p.add_argument("--report", default=None, help="merge report (JSON)")
    p.set_defaults(fn=cmd_merge)

    p = sub.add_parser("validate", help="check a solution file")
    _add_instance_args(p)
    p.add_argument("--solution", required=True)
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("metrics", help="print metrics of a solution file")
    _add_instance_args(p)
    p.add_argument("--solution", required=True)
    p.set_defaults(fn=cmd_metrics)

    p = sub.add_parser("render", help="render a solution to SVG")
    _add_instance_args(p)
    p.add_argument("--solution", required=True)
    p.add_argument("--svg", required=True, help="output directory")
    p.set_defaults(fn=cmd_render)

    p = sub.add_parser("bench", help="run variants over an instance directory")
    p.add_argument("--dir", required=True, help="directory of .json instances")
    p.add_argument("--algos", default="djd,mergedjd",
                   help="comma-separated variants")
    p.add_argument("--threshold", type=float, default=1.0)
    p.add_argument("--csv", default=None, help="output CSV path")
    p.add_argument("--jobs", type=int, default=1,
                   help="solve instances in parallel")
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("gen-cutting",
                       help="generate synthetic cutting instances")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--bins-min", type=int, default=1)
    p.add_argument("--bins-max", type=int, default=4)
    p.add_argument("--pieces-min", type=int, default=4)
    p.add_argument("--pieces-max", type=int, default=32)
    p.add_argument("--width", type=float, default=100.0)
    p.add_argument("--length", type=float, default=100.0)
    p.set_defaults(fn=cmd_gen_cutting)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (nio.ParseError, nio.SolutionFormatError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
