"""Run reports, layout documents and the summary table."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

from . import __version__
from .geometry import Placement
from .model import NlpProblem, PairIndex, SeparationLineVar

REPORT_FORMAT = "nestline-report/1"
LAYOUT_FORMAT = "nestline-layout/1"
TWO_PI = 2.0 * math.pi
FEASIBLE = ("Optimal", "Feasible")


def _angle(a: float) -> float:
    r = math.fmod(a, TWO_PI)
    if r < 0:
        r += TWO_PI
    return 0.0 if r == TWO_PI else r


def _t(x: Optional[float]) -> Optional[float]:
    return None if x is None else round(float(x), 2)


def dumps(doc: dict) -> str:
    """Canonical JSON text (sorted keys, fixed indentation, trailing newline)."""
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


# --- layouts ---------------------------------------------------------------

@dataclass
class Layout:
    instance: str
    strip_width: float
    length: float
    ids: list[str]
    placements: list[Placement]
    pairs: list[PairIndex] = field(default_factory=list)
    lines: list[SeparationLineVar] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "format": LAYOUT_FORMAT,
            "instance": self.instance,
            "strip_width": self.strip_width,
            "length": self.length,
            "placements": [
                {"id": i, "tx": p.tx, "ty": p.ty, "theta": _angle(p.theta)}
                for i, p in zip(self.ids, self.placements)
            ],
            "lines": [
                {"pair": list(pr), "x_bar": ln.x_bar, "y_bar": ln.y_bar, "alpha": _angle(ln.alpha)}
                for pr, ln in zip(self.pairs, self.lines)
            ],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Layout":
        if "layout" in doc and "placements" not in doc:
            doc = doc["layout"]
        try:
            pls = [Placement(float(p["tx"]), float(p["ty"]), float(p["theta"])) for p in doc["placements"]]
            ids = [str(p.get("id", k)) for k, p in enumerate(doc["placements"])]
            pairs = [PairIndex(*map(int, ln["pair"])) for ln in doc.get("lines", [])]
            lines = [SeparationLineVar(float(ln["x_bar"]), float(ln["y_bar"]), float(ln["alpha"]))
                     for ln in doc.get("lines", [])]
            return cls(str(doc.get("instance", "")), float(doc.get("strip_width", math.nan)),
                       float(doc["length"]), ids, pls, pairs, lines)
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed layout document: {exc}") from exc

    @classmethod
    def from_vector(cls, problem: NlpProblem, v, instance: str = "") -> "Layout":
        z, pls, lines = problem.decode(v)
        return cls(instance, problem.strip_width, z, [p.id for p in problem.pieces], pls,
                   list(problem.pairs), lines)


# --- run reports -----------------------------------------------------------

@dataclass
class StartEntry:
    start: int
    rng_seed: int
    seed_length: float
    final_length: float
    status: str
    max_violation: Optional[float]
    iterations: int
    seed_time: Optional[float] = None
    solve_time: Optional[float] = None


@dataclass
class RunReport:
    instance: str
    k_starts: int
    rng_seed: int
    bl_iterations: int
    raster_scale: float
    options: dict
    starts: list[StartEntry]
    raster_time: Optional[float] = None
    layout: Optional[Layout] = None
    seed_layout: Optional[Layout] = None
    code_version: str = __version__

    def feasible_lengths(self) -> list[float]:
        return [s.final_length for s in self.starts if s.status in FEASIBLE]

    @property
    def timed(self) -> bool:
        return any(s.seed_time is not None for s in self.starts)

    def summary(self) -> dict:
        lens = self.feasible_lengths()
        out = {
            "n_feasible": len(lens),
            "min_length": min(lens) if lens else None,
            "avg_length": math.fsum(lens) / len(lens) if lens else None,
            "max_length": max(lens) if lens else None,
        }
        if self.timed:
            k = len(self.starts)
            seed_avg = math.fsum(s.seed_time for s in self.starts) / k
            out["avg_seed_time"] = _t(seed_avg)
            out["avg_seed_time_amortized"] = _t(seed_avg + (self.raster_time or 0.0) / k)
            out["avg_solve_time"] = _t(math.fsum(s.solve_time for s in self.starts) / k)
            out["raster_time"] = _t(self.raster_time)
        return out

    def to_dict(self) -> dict:
        starts = []
        for s in self.starts:
            d = asdict(s)
            if s.seed_time is None:
                del d["seed_time"], d["solve_time"]
            else:
                d["seed_time"], d["solve_time"] = _t(s.seed_time), _t(s.solve_time)
            starts.append(d)
        doc = {
            "format": REPORT_FORMAT,
            "instance": self.instance,
            "code_version": self.code_version,
            "rng_seed": self.rng_seed,
            "k_starts": self.k_starts,
            "bl_iterations": self.bl_iterations,
            "raster_scale": self.raster_scale,
            "options": dict(self.options),
            "starts": starts,
            "summary": self.summary(),
        }
        if self.layout is not None:
            doc["layout"] = self.layout.to_dict()
        if self.seed_layout is not None:
            doc["seed_layout"] = self.seed_layout.to_dict()
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "RunReport":
        starts = [StartEntry(**s) for s in doc["starts"]]
        return cls(
            instance=doc["instance"], k_starts=int(doc["k_starts"]), rng_seed=int(doc["rng_seed"]),
            bl_iterations=int(doc["bl_iterations"]), raster_scale=float(doc["raster_scale"]),
            options=dict(doc.get("options", {})), starts=starts,
            raster_time=doc.get("summary", {}).get("raster_time"),
            layout=Layout.from_dict(doc["layout"]) if "layout" in doc else None,
            seed_layout=Layout.from_dict(doc["seed_layout"]) if "seed_layout" in doc else None,
            code_version=doc.get("code_version", ""),
        )


def report_from_run(instance: str, result, rng_seed: int, bl_iterations: int,
                    raster_scale: float, options: dict, timings: bool = True) -> RunReport:
    """Build a report from a ``solver.MultiStartResult``."""
    starts = [
        StartEntry(
            start=r.start, rng_seed=r.rng_seed, seed_length=r.seed_length,
            final_length=r.final_length, status=r.status,
            max_violation=r.max_violation if math.isfinite(r.max_violation) else None,
            iterations=r.iterations,
            seed_time=r.seed_time if timings else None,
            solve_time=r.solve_time if timings else None,
        )
        for r in result.records
    ]
    return RunReport(
        instance=instance, k_starts=len(starts), rng_seed=rng_seed,
        bl_iterations=bl_iterations, raster_scale=raster_scale, options=options,
        starts=starts, raster_time=result.raster_time if timings else None,
        layout=Layout.from_vector(result.problem, result.best_point, instance),
        seed_layout=Layout.from_vector(result.problem, result.best_seed_point, instance),
    )


# --- table -----------------------------------------------------------------

_HEAD = ("Instance", "Starts", "Min. Sol.", "Avg. Sol.", "Max. Sol.", "SP Avg. time(s)", "Solve Avg. time(s)")


def _fmt(x, nd=2) -> str:
    return "-" if x is None else f"{x:.{nd}f}"


def report_table(reports: Sequence[RunReport]) -> tuple[str, list[dict]]:
    """Aligned text table plus its rows as JSON-ready dicts, sorted by instance."""
    if not reports:
        raise ValueError("report_table needs at least one report")
    rows, notes = [], []
    for rep in sorted(reports, key=lambda r: r.instance):
        s = rep.summary()
        row = {
            "instance": rep.instance,
            "starts": rep.k_starts,
            "min": s["min_length"],
            "avg": s["avg_length"],
            "max": s["max_length"],
            "sp_avg_time": s.get("avg_seed_time_amortized"),
            "solve_avg_time": s.get("avg_solve_time"),
        }
        bad = [e.start for e in rep.starts if e.status not in FEASIBLE]
        if bad:
            row["excluded_starts"] = bad
            notes.append(f"* {rep.instance}: starts {', '.join(map(str, bad))} "
                         "not feasible, excluded from Min/Avg/Max")
        rows.append(row)
    cells = [list(_HEAD)]
    for row in rows:
        mark = "*" if "excluded_starts" in row else ""
        cells.append([
            row["instance"] + mark, str(row["starts"]), _fmt(row["min"]), _fmt(row["avg"]),
            _fmt(row["max"]), _fmt(row["sp_avg_time"]), _fmt(row["solve_avg_time"]),
        ])
    widths = [max(len(c[k]) for c in cells) for k in range(len(_HEAD))]
    lines = []
    for c in cells:
        lines.append("  ".join(
            c[k].ljust(widths[k]) if k == 0 else c[k].rjust(widths[k]) for k in range(len(c))
        ).rstrip())
    lines.insert(1, "  ".join("-" * w for w in widths))
    lines.extend(notes)
    return "\n".join(lines) + "\n", rows
