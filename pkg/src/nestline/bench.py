"""Timing of the compiled kernels against the numpy fallback."""

from __future__ import annotations

import time
from typing import Sequence

import numpy as np

from . import kernels
from .geometry import Piece
from .model import build_problem
from .seeding import generate_start, mask_table


def _best_of(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_kernels(pieces: Sequence[Piece], strip_width: float, evals: int = 200,
                  bl_iterations: int = 50, scale: float = 1.0, repeat: int = 3,
                  seed: int = 0) -> list[dict]:
    """Seconds per backend for ``evals`` AL evaluations and one seeding run."""
    masks = mask_table(pieces, scale)
    lay = generate_start(pieces, strip_width, 1, seed, scale=scale, masks=masks)
    problem = build_problem(pieces, strip_width, z_upper=lay.length)
    v = problem.encode(lay.length, lay.placements, lay.line_init)
    rng = np.random.default_rng(seed)
    lam = rng.random(problem.n_constraints)
    g = np.empty(problem.n_constraints)

    def al():
        for _ in range(evals):
            problem.al_value_grad(v, lam, 10.0, g)

    def bl():
        generate_start(pieces, strip_width, bl_iterations, seed, scale=scale, masks=masks,
                       with_lines=False)

    rows = []
    for name in kernels.available():
        with kernels.use_backend(name):
            rows.append({
                "backend": name,
                "al_value_grad_s": _best_of(al, repeat),
                "bottom_left_s": _best_of(bl, repeat),
            })
    return rows


def format_rows(rows: list[dict], evals: int, bl_iterations: int) -> str:
    out = [f"{'backend':<10}{'AL x' + str(evals):>14}{'BL x' + str(bl_iterations):>14}"]
    for r in rows:
        out.append(f"{r['backend']:<10}{r['al_value_grad_s']:>13.4f}s{r['bottom_left_s']:>13.4f}s")
    if len(rows) == 2:
        a, b = rows
        out.append(f"{'speedup':<10}{b['al_value_grad_s'] / a['al_value_grad_s']:>13.1f}x"
                   f"{b['bottom_left_s'] / a['bottom_left_s']:>13.1f}x")
    return "\n".join(out)
