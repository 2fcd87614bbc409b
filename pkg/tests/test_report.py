import json
import math

import pytest

from nestline.report import Layout, RunReport, StartEntry, dumps, report_table


def entry(k, length, status="Feasible", t=1.234):
    return StartEntry(start=k, rng_seed=k, seed_length=length + 1, final_length=length, status=status,
                      max_violation=0.0, iterations=3, seed_time=t, solve_time=2 * t)


def report(name, lengths, statuses=None):
    statuses = statuses or ["Feasible"] * len(lengths)
    return RunReport(instance=name, k_starts=len(lengths), rng_seed=0, bl_iterations=10,
                     raster_scale=1.0, options={}, starts=[entry(k, x, s) for k, (x, s) in
                                                          enumerate(zip(lengths, statuses))],
                     raster_time=0.5)


def test_single_row_six_numeric_columns():
    text, rows = report_table([report("a", [3.0, 4.0])])
    body = text.splitlines()[2].split()
    assert body[0] == "a"
    nums = body[1:]
    assert len(nums) == 6
    [float(x) for x in nums]  # all numeric


def test_infeasible_start_excluded_and_footnoted():
    rep = report("a", [3.0, 1.0, 5.0], ["Feasible", "Infeasible", "Optimal"])
    text, rows = report_table([rep])
    assert rows[0]["min"] == 3.0 and rows[0]["max"] == 5.0 and rows[0]["avg"] == 4.0
    assert rows[0]["excluded_starts"] == [1]
    assert "starts 1 not feasible" in text.splitlines()[-1]


def test_rows_sorted_by_name():
    _, rows = report_table([report("c", [1.0]), report("a", [1.0]), report("b", [1.0])])
    assert [r["instance"] for r in rows] == ["a", "b", "c"]


def test_empty_table_rejected():
    with pytest.raises(ValueError):
        report_table([])


def test_summary_arithmetic_matches_records():
    rep = report("x", [3.3, 2.2, 7.7, 1.1])
    doc = json.loads(dumps(rep.to_dict()))
    lens = [s["final_length"] for s in doc["starts"] if s["status"] in ("Optimal", "Feasible")]
    s = doc["summary"]
    assert s["min_length"] == min(lens) and s["max_length"] == max(lens)
    assert s["avg_length"] == math.fsum(lens) / len(lens)
    assert s["min_length"] <= s["avg_length"] <= s["max_length"]


def test_times_two_decimals_and_amortized():
    doc = report("x", [1.0, 2.0]).to_dict()
    assert doc["starts"][0]["seed_time"] == 1.23
    assert doc["summary"]["avg_seed_time_amortized"] == round(1.234 + 0.25, 2)


def test_untimed_report_has_no_time_fields():
    rep = report("x", [1.0])
    for s in rep.starts:
        s.seed_time = s.solve_time = None
    rep.raster_time = None
    text = dumps(rep.to_dict())
    assert "_time" not in text


def test_report_round_trip():
    rep = report("x", [1.0, 2.0])
    rep.layout = Layout("x", 1.0, 2.0, ["a"], [], [], [])
    back = RunReport.from_dict(json.loads(dumps(rep.to_dict())))
    assert dumps(back.to_dict()) == dumps(rep.to_dict())


def test_layout_angles_reduced():
    from nestline.geometry import Placement

    lay = Layout("x", 1.0, 1.0, ["a"], [Placement(0, 0, -math.pi / 2 - 4 * math.pi)])
    th = lay.to_dict()["placements"][0]["theta"]
    assert 0 <= th < 2 * math.pi
    assert th == pytest.approx(1.5 * math.pi)
