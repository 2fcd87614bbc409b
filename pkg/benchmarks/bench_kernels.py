#!/usr/bin/env python3
"""Compiled vs pure-Python kernel timings on the bundled instances.

    python benchmarks/bench_kernels.py [--evals 200] [--bl-iters 50]
"""

import argparse
from pathlib import Path

from nestline.bench import bench_kernels, format_rows
from nestline.instance import parse_instance

DATA = Path(__file__).resolve().parent.parent / "data"


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--evals", type=int, default=200)
    ap.add_argument("--bl-iters", type=int, default=50)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    for path in sorted(DATA.glob("*.json")):
        inst = parse_instance(path)
        rows = bench_kernels(inst.pieces, inst.strip_width, args.evals, args.bl_iters,
                             inst.raster_scale or 1.0, args.repeat)
        print(f"== {inst.name} (n={inst.n})")
        print(format_rows(rows, args.evals, args.bl_iters))


if __name__ == "__main__":
    main()
