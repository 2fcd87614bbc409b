"""Augmented-Lagrangian local solver and the multi-start driver.

The outer loop handles the inequality constraints through the penalty
``(max(0, lam + rho g)^2 - lam^2) / (2 rho)``; each subproblem is a smooth
bound-constrained minimization solved with L-BFGS-B.  Separation rows are
solved with a small internal margin so that converged points separate the
parts strictly, which keeps the exact overlap oracle at zero.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from .geometry import Piece
from .kkt import independent_kkt, kkt_residual
from .model import DimensionMismatch, NlpProblem, build_problem, min_part_area, pair_overlaps
from .seeding import generate_start, init_lines, mask_table

log = logging.getLogger(__name__)

# allowed increase over a feasible start (rounding in the z repair)
DESCENT_TOL = 1e-9


class NonFiniteEvaluation(ArithmeticError):
    pass


class AllStartsFailed(RuntimeError):
    def __init__(self, message, records=None):
        super().__init__(message)
        self.records = records or []


class Status(str, Enum):
    OPTIMAL = "Optimal"
    FEASIBLE = "Feasible"
    INFEASIBLE = "Infeasible"
    ERROR = "Error"


@dataclass
class SolverOptions:
    feasibility_tol: float = 1e-6
    stationarity_tol: float = 1e-6
    max_time_seconds: float = 3600.0
    max_outer_iterations: int = 50
    penalty_init: float = 10.0
    penalty_growth: float = 10.0
    inner_memory: int = 10
    inner_max_iterations: int = 1500
    separation_margin: float = 1e-7
    multiplier_cap: float = 1e12

    def __post_init__(self):
        if self.feasibility_tol <= 0 or self.stationarity_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.penalty_growth <= 1:
            raise ValueError("penalty_growth must exceed 1")
        if self.penalty_init <= 0:
            raise ValueError("penalty_init must be positive")


@dataclass
class SolveResult:
    point: np.ndarray
    objective: float
    status: Status
    max_violation: float
    iterations: int
    wall_time: float
    kkt: float = math.inf
    history: list = field(default_factory=list)


def _is_exactly_feasible(problem: NlpProblem, v: np.ndarray, g: np.ndarray,
                         tol: float, overlap_tol: float) -> bool:
    if float(np.max(g)) > tol:
        return False
    _, pls, _ = problem.decode(v)
    return all(a <= overlap_tol for _, a in pair_overlaps(problem, pls))


def _repair_z(problem: NlpProblem, v: np.ndarray) -> np.ndarray:
    """Set the length variable to the actual rightmost vertex."""
    v = v.copy()
    g = problem.constraints(v)
    v[0] = max(problem.lower[0], float(np.max(g[3:problem.n_containment:4])) + v[0])
    return v


def solve(problem: NlpProblem, start, opts: Optional[SolverOptions] = None) -> SolveResult:
    """Locally minimize the strip length from ``start``.

    Returns the best point found that satisfies every constraint within
    ``opts.feasibility_tol`` and has no exact part overlap.  A feasible
    ``start`` is itself a candidate, so the result is never longer than it.
    """
    opts = opts or SolverOptions()
    t0 = time.perf_counter()
    deadline = t0 + opts.max_time_seconds
    x = np.array(start, dtype=np.float64)
    if x.shape != (problem.dimension,):
        raise DimensionMismatch(f"start has shape {x.shape}, expected ({problem.dimension},)")
    if not np.all(np.isfinite(x)):
        raise NonFiniteEvaluation("start vector is not finite")
    lo, hi = problem.lower, problem.upper
    x = np.clip(x, lo, hi)
    m = problem.n_constraints
    overlap_tol = 1e-8 * min_part_area(problem.pieces)

    shift = np.zeros(m)
    shift[problem.n_containment:] = opts.separation_margin
    lam = np.zeros(m)
    rho = opts.penalty_init
    g_buf = np.empty(m)
    bounds = list(zip(np.where(np.isfinite(lo), lo, None), np.where(np.isfinite(hi), hi, None)))

    best_x, best_f = None, math.inf
    g0 = problem.constraints(x)
    if _is_exactly_feasible(problem, x, g0, opts.feasibility_tol, overlap_tol):
        best_x, best_f = x.copy(), float(x[0])

    history = []
    prev_viol = math.inf
    prev_z = math.inf
    stalled = 0
    status = None
    kkt_val = math.inf
    it = 0
    for it in range(1, opts.max_outer_iterations + 1):
        lam_eff = lam + rho * shift

        def fun(v, lam_eff=lam_eff, rho=rho):
            val, grad = problem.al_value_grad(v, lam_eff, rho, g_buf)
            if not math.isfinite(val):
                raise NonFiniteEvaluation("augmented Lagrangian evaluated to a non-finite value")
            return val, np.asarray(grad)

        def stop(intermediate_result):
            if time.perf_counter() > deadline:
                raise StopIteration

        res = minimize(
            fun, x, jac=True, method="L-BFGS-B", bounds=bounds, callback=stop,
            options={"maxcor": opts.inner_memory, "maxiter": opts.inner_max_iterations,
                     "ftol": 1e-15, "gtol": 1e-10},
        )
        if not np.all(np.isfinite(res.x)):
            raise NonFiniteEvaluation("inner solver produced a non-finite iterate")
        x = res.x
        g = problem.constraints(x)
        g_eff = g + shift
        viol = float(max(0.0, np.max(g)))
        lam = np.clip(lam + rho * g_eff, 0.0, opts.multiplier_cap)

        cand = _repair_z(problem, x)
        gc = problem.constraints(cand)
        if float(cand[0]) < best_f and _is_exactly_feasible(
            problem, cand, gc, opts.feasibility_tol, overlap_tol
        ):
            best_x, best_f = cand, float(cand[0])

        kkt_val = kkt_residual(problem, x, lam, g_eff)
        history.append({"iter": it, "z": float(x[0]), "violation": viol, "rho": rho,
                        "kkt": kkt_val, "inner": int(res.nit)})
        log.debug("outer %d z=%.6f viol=%.2e rho=%.1e kkt=%.2e inner=%d",
                  it, x[0], viol, rho, kkt_val, res.nit)
        if viol <= opts.feasibility_tol and kkt_val <= opts.stationarity_tol:
            status = Status.OPTIMAL
            break
        if time.perf_counter() > deadline:
            break
        # aim below the acceptance tolerance so accepted points keep some slack
        if viol > 0.1 * opts.feasibility_tol and viol > 0.25 * prev_viol:
            rho *= opts.penalty_growth
        stalled = stalled + 1 if (viol <= opts.feasibility_tol and abs(x[0] - prev_z) <= 1e-12 * max(1.0, abs(x[0]))) else 0
        if stalled >= 3:
            break
        prev_viol = viol
        prev_z = float(x[0])

    if status is Status.OPTIMAL:
        final = _repair_z(problem, x)
        gf = problem.constraints(final)
        if not _is_exactly_feasible(problem, final, gf, opts.feasibility_tol, overlap_tol):
            status = None
        elif best_x is not None and final[0] > best_f + DESCENT_TOL:
            # a KKT point that ties with the incumbent up to the tolerance: keep
            # the incumbent, and call it optimal only if it is stationary itself
            status = None
            if final[0] <= best_f + opts.feasibility_tol:
                r_ind, _, _ = independent_kkt(problem, best_x)
                if r_ind <= opts.stationarity_tol:
                    final, status, kkt_val = best_x, Status.OPTIMAL, r_ind
    if status is not Status.OPTIMAL:
        if best_x is not None:
            final, status = best_x, Status.FEASIBLE
        else:
            final, status = x, Status.INFEASIBLE
    gf = problem.constraints(final)
    return SolveResult(
        point=final,
        objective=float(final[0]),
        status=status,
        max_violation=float(max(0.0, np.max(gf))),
        iterations=it,
        wall_time=time.perf_counter() - t0,
        kkt=kkt_val,
        history=history,
    )


# --- multi-start -----------------------------------------------------------

@dataclass
class StartRecord:
    start: int
    rng_seed: int
    seed_length: float
    final_length: float
    status: str
    seed_time: float
    solve_time: float
    max_violation: float
    iterations: int


@dataclass
class MultiStartResult:
    records: list[StartRecord]
    best_point: np.ndarray
    best_seed_point: np.ndarray
    best_index: int
    raster_time: float
    problem: NlpProblem
    final_points: list = field(default_factory=list)

    def feasible_lengths(self) -> list[float]:
        return [r.final_length for r in self.records if r.status in (Status.OPTIMAL.value, Status.FEASIBLE.value)]


def start_seeds(rng_seed: int, k: int) -> list[int]:
    """Independent 64-bit seeds for ``k`` starts derived from one root seed."""
    children = np.random.SeedSequence(rng_seed).spawn(k)
    return [int(c.generate_state(1, np.uint64)[0]) for c in children]


def _run_start(args):
    pieces, width, scale, masks, bl_iters, seed, opts, pairs = args
    t0 = time.perf_counter()
    lay = generate_start(pieces, width, bl_iters, seed, scale=scale, masks=masks, with_lines=False)
    lines = init_lines(lay.placements, pieces, pairs)
    seed_time = time.perf_counter() - t0
    problem = build_problem(pieces, width, pairs, z_upper=lay.length)
    v0 = problem.encode(lay.length, lay.placements, lines)
    try:
        res = solve(problem, v0, opts)
    except NonFiniteEvaluation as exc:
        log.warning("start with seed %d failed: %s", seed, exc)
        res = SolveResult(v0, lay.length, Status.ERROR, math.nan, 0, 0.0)
    return lay.length, v0, res, seed_time


def multi_start(pieces: Sequence[Piece], strip_width: float, k_starts: int = 10,
                opts: Optional[SolverOptions] = None, rng_seed: int = 0,
                bl_iterations: int = 1000, raster_scale: float = 1.0,
                threads: int = 1) -> MultiStartResult:
    """Seed and solve ``k_starts`` times; records are ordered by start index."""
    if k_starts < 1:
        raise ValueError("k_starts must be >= 1")
    opts = opts or SolverOptions()
    t0 = time.perf_counter()
    masks = mask_table(pieces, raster_scale)
    raster_time = time.perf_counter() - t0
    from .model import enumerate_pairs

    pairs = enumerate_pairs(pieces)
    seeds = start_seeds(rng_seed, k_starts)
    jobs = [(list(pieces), strip_width, raster_scale, masks, bl_iterations, s, opts, pairs) for s in seeds]
    if threads > 1 and k_starts > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=threads) as ex:
            outs = list(ex.map(_run_start, jobs))
    else:
        outs = [_run_start(j) for j in jobs]

    records = []
    finals = []
    best = None
    for idx, (seed, (seed_len, v0, res, seed_time)) in enumerate(zip(seeds, outs)):
        records.append(StartRecord(
            start=idx, rng_seed=seed, seed_length=seed_len, final_length=res.objective,
            status=res.status.value, seed_time=seed_time, solve_time=res.wall_time,
            max_violation=res.max_violation, iterations=res.iterations,
        ))
        finals.append(res.point)
        if res.status in (Status.OPTIMAL, Status.FEASIBLE) and (best is None or res.objective < best[0]):
            best = (res.objective, idx, res.point, v0)
    if best is None:
        raise AllStartsFailed("no start produced a feasible layout", records)
    problem = build_problem(pieces, strip_width, pairs, z_upper=records[best[1]].seed_length)
    return MultiStartResult(records, best[2], best[3], best[1], raster_time, problem, finals)


def options_dict(opts: SolverOptions) -> dict:
    return asdict(opts)
