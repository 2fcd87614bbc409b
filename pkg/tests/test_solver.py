import math

import numpy as np
import pytest

from nestline.geometry import Placement
from nestline.kkt import independent_kkt, kkt_residual
from nestline.model import SeparationLineVar, build_problem, check_feasibility, min_part_area
from nestline.seeding import generate_start
from nestline.solver import (
    AllStartsFailed, NonFiniteEvaluation, SolverOptions, Status, multi_start, solve, start_seeds,
)

from conftest import load, squares


def solve_from_seed(pieces, width, iters=10, seed=0, **kw):
    lay = generate_start(pieces, width, iters, seed)
    P = build_problem(pieces, width, z_upper=lay.length)
    return P, solve(P, P.encode(lay.length, lay.placements, lay.line_init), SolverOptions(**kw))


def assert_sound(P, res):
    rep = check_feasibility(res.point, P)
    assert rep.max_violation <= 1e-6
    assert rep.max_overlap <= 1e-8 * min_part_area(P.pieces)


def test_unit_square_from_shifted_start():
    P = build_problem(squares(1), 1.0)
    res = solve(P, P.encode(2.0, [Placement(0.3, 0.0, 0.0)], []))
    assert res.objective == pytest.approx(1.0, abs=1e-3)
    theta = res.point[3]
    assert math.remainder(theta, math.pi / 2) == pytest.approx(0.0, abs=1e-3)
    assert res.status in (Status.OPTIMAL, Status.FEASIBLE)


def test_two_squares_width_one():
    P, res = solve_from_seed(squares(2), 1.0)
    assert res.objective == pytest.approx(2.0, abs=1e-3)
    assert res.status is Status.OPTIMAL
    assert_sound(P, res)


def test_two_squares_width_two_side_by_side():
    pcs = squares(2)
    P = build_problem(pcs, 2.0, z_upper=2.0)
    v = P.encode(2.0, [Placement(0, 0, 0), Placement(1, 0, 0)], [SeparationLineVar(1.0, 0.0, -math.pi / 2)])
    res = solve(P, v)
    # a local solver may stop at the side-by-side layout; it must stay feasible
    assert 1.0 - 1e-3 <= res.objective <= 2.0 + 1e-9
    assert_sound(P, res)


def test_result_never_longer_than_feasible_start():
    inst = load("poly1a")
    P, res = solve_from_seed(inst.pieces, inst.strip_width, 20, 2, max_time_seconds=5)
    assert res.objective <= P.upper[0] + 1e-9
    assert res.status in (Status.OPTIMAL, Status.FEASIBLE)
    assert_sound(P, res)


def test_time_limit_respected():
    inst = load("poly2a")
    _, res = solve_from_seed(inst.pieces, inst.strip_width, 5, 0, max_time_seconds=2)
    assert res.wall_time < 2 + 3.0


def test_non_finite_start_rejected():
    P = build_problem(squares(1), 1.0)
    with pytest.raises(NonFiniteEvaluation):
        solve(P, np.array([np.nan, 0, 0, 0]))


def test_bad_options():
    with pytest.raises(ValueError):
        SolverOptions(penalty_growth=1.0)
    with pytest.raises(ValueError):
        SolverOptions(feasibility_tol=0)


def test_optimal_point_passes_independent_kkt():
    P, res = solve_from_seed(squares(2), 1.0)
    assert res.status is Status.OPTIMAL
    r_ind, lam, active = independent_kkt(P, res.point)
    assert r_ind <= 1e-5
    assert (lam >= 0).all() and active.size > 0


def test_kkt_residual_detects_non_stationary_point():
    P = build_problem(squares(1), 1.0)
    v = P.encode(2.0, [Placement(0, 0, 0)], [])
    # z is above its lower bound with no active constraint pushing back
    assert kkt_residual(P, v, np.zeros(P.n_constraints)) >= 1.0
    r_ind, _, _ = independent_kkt(P, v)
    assert r_ind >= 1.0


def test_start_seeds_distinct_and_stable():
    a = start_seeds(42, 10)
    assert len(set(a)) == 10
    assert a == start_seeds(42, 10)
    assert start_seeds(42, 3) == a[:3]


def test_multi_start_two_squares():
    res = multi_start(squares(2), 1.0, k_starts=3, bl_iterations=5, rng_seed=1)
    lens = res.feasible_lengths()
    assert len(lens) == 3
    for x in lens:
        assert x == pytest.approx(2.0, abs=1e-3)


def test_multi_start_more_starts_never_worse():
    inst = load("poly1a")
    opts = SolverOptions(max_time_seconds=3)
    one = multi_start(inst.pieces, inst.strip_width, 1, opts, 5, 20)
    three = multi_start(inst.pieces, inst.strip_width, 3, opts, 5, 20)
    assert min(three.feasible_lengths()) <= min(one.feasible_lengths()) + 1e-12


def test_multi_start_rejects_zero_starts():
    with pytest.raises(ValueError):
        multi_start(squares(1), 1.0, k_starts=0)


def test_all_starts_failed_carries_records(monkeypatch):
    from nestline import solver as S

    def broken(problem, start, opts=None):
        raise S.NonFiniteEvaluation("boom")

    monkeypatch.setattr(S, "solve", broken)
    with pytest.raises(AllStartsFailed) as ei:
        multi_start(squares(2), 1.0, k_starts=2, bl_iterations=2)
    assert [r.status for r in ei.value.records] == ["Error", "Error"]
