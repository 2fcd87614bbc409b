"""JSON instance files.

Format::

    {"name": str, "strip_width": float, "raster_scale": float (optional),
     "pieces": [{"id": str, "count": int (optional, default 1),
                 "vertices": [[x, y], ...],
                 "parts": [[[x, y], ...], ...] (optional convex decomposition)}]}
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .geometry import GeometryError, Piece, normalize_piece


class ParseError(ValueError):
    pass


class ValidationError(ValueError):
    pass


@dataclass(frozen=True)
class PieceRecord:
    id: str
    vertices: tuple[tuple[float, float], ...]
    count: int = 1
    parts: Optional[tuple[tuple[tuple[float, float], ...], ...]] = None


@dataclass
class NestingInstance:
    name: str
    strip_width: float
    records: list[PieceRecord]
    raster_scale: Optional[float] = None
    pieces: list[Piece] = field(default_factory=list, repr=False)

    @property
    def n(self) -> int:
        return len(self.pieces)

    def to_dict(self) -> dict:
        out = {"name": self.name, "strip_width": self.strip_width}
        if self.raster_scale is not None:
            out["raster_scale"] = self.raster_scale
        recs = []
        for r in self.records:
            d = {"id": r.id}
            if r.count != 1:
                d["count"] = r.count
            d["vertices"] = [list(p) for p in r.vertices]
            if r.parts is not None:
                d["parts"] = [[list(p) for p in part] for part in r.parts]
            recs.append(d)
        out["pieces"] = recs
        return out


def _pts(obj, what: str) -> tuple[tuple[float, float], ...]:
    if not isinstance(obj, list) or len(obj) < 3:
        raise ParseError(f"{what}: expected a list of at least 3 [x, y] pairs")
    out = []
    for p in obj:
        if not isinstance(p, (list, tuple)) or len(p) != 2:
            raise ParseError(f"{what}: bad vertex {p!r}")
        try:
            x, y = float(p[0]), float(p[1])
        except (TypeError, ValueError) as exc:
            raise ParseError(f"{what}: bad vertex {p!r}") from exc
        if not (math.isfinite(x) and math.isfinite(y)):
            raise ParseError(f"{what}: non-finite vertex {p!r}")
        out.append((x, y))
    return tuple(out)


def _fits(piece: Piece, width: float) -> bool:
    for theta in (0.0, 0.5 * math.pi):
        x0, y0, x1, y1 = piece.bbox(theta)
        if y1 - y0 <= width * (1 + 1e-12):
            return True
    return False


def instance_from_dict(doc: dict, name: Optional[str] = None) -> NestingInstance:
    if not isinstance(doc, dict):
        raise ParseError("instance document must be a JSON object")
    for key in ("strip_width", "pieces"):
        if key not in doc:
            raise ParseError(f"missing field {key!r}")
    try:
        width = float(doc["strip_width"])
    except (TypeError, ValueError) as exc:
        raise ParseError("strip_width must be a number") from exc
    if not (width > 0 and math.isfinite(width)):
        raise ValidationError(f"strip width must be positive, got {width}")
    scale = doc.get("raster_scale")
    if scale is not None:
        scale = float(scale)
        if not scale > 0:
            raise ValidationError("raster_scale must be positive")
    if not isinstance(doc["pieces"], list) or not doc["pieces"]:
        raise ParseError("pieces must be a non-empty list")

    records: list[PieceRecord] = []
    pieces: list[Piece] = []
    for k, rec in enumerate(doc["pieces"]):
        if not isinstance(rec, dict):
            raise ParseError(f"piece #{k} must be an object")
        pid = str(rec.get("id", k))
        count = rec.get("count", 1)
        if not isinstance(count, int) or count < 1:
            raise ValidationError(f"piece {pid!r}: count must be a positive integer")
        verts = _pts(rec.get("vertices"), f"piece {pid!r}")
        parts = None
        if rec.get("parts") is not None:
            if not isinstance(rec["parts"], list) or not rec["parts"]:
                raise ParseError(f"piece {pid!r}: parts must be a non-empty list")
            parts = tuple(_pts(p, f"piece {pid!r} part {j}") for j, p in enumerate(rec["parts"]))
        try:
            base = normalize_piece(verts, pid, parts)
        except GeometryError as exc:
            raise ValidationError(f"piece {pid!r}: {exc}") from exc
        if not _fits(base, width):
            raise ValidationError(f"piece {pid!r} is wider than the strip at every rotation")
        records.append(PieceRecord(pid, verts, count, parts))
        for c in range(count):
            pieces.append(Piece(
                id=pid if count == 1 else f"{pid}#{c + 1}",
                outline=base.outline, parts=base.parts, reference=base.reference,
            ))
    return NestingInstance(
        name=str(doc.get("name", name or "instance")),
        strip_width=width,
        records=records,
        raster_scale=scale,
        pieces=pieces,
    )


def parse_instance(path) -> NestingInstance:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"{path}: {exc}") from exc
    return instance_from_dict(doc, name=path.stem)


def write_instance(inst: NestingInstance, path) -> None:
    Path(path).write_text(json.dumps(inst.to_dict(), indent=1) + "\n", encoding="utf-8")
