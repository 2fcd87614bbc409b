#!/usr/bin/env python3
"""Convert ESICUP nesting benchmark files to nestline instance JSON.

Two source layouts are understood:

* the XML description (``<nesting>`` root with ``<boards>``, ``<lot>`` and
  ``<polygons>``); the strip width is the short side of the board polygon.
* the plain-text layout used by the older archives::

      <number of piece types>
      <strip width>
      <quantity>            # repeated per piece type
      <number of vertices>
      x y                   # one line per vertex
      ...

Usage::

    python tools/esicup_convert.py SRC.xml -o data/name.json [--name NAME] [--scale S]
"""

from __future__ import annotations

import argparse
import json
import re
import sys
import xml.etree.ElementTree as ET
from pathlib import Path


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _children(el, name):
    return [c for c in el if _local(c.tag) == name]


def _find(el, name, required=True):
    for c in el.iter():
        if _local(c.tag) == name:
            return c
    if required:
        raise ValueError(f"missing <{name}> element")
    return None


def _polygon_vertices(poly) -> list[list[float]]:
    lines = _find(poly, "lines")
    segs = sorted(_children(lines, "segment"), key=lambda s: int(s.get("n", 0)))
    return [[float(s.get("x0")), float(s.get("y0"))] for s in segs]


def convert_xml(text: str, name: str | None = None) -> dict:
    root = ET.fromstring(text)
    polys = {}
    pel = _find(root, "polygons")
    for poly in _children(pel, "polygon"):
        polys[poly.get("id")] = _polygon_vertices(poly)

    board = _find(_find(root, "boards"), "piece")
    bpts = polys[_find(board, "component").get("idPolygon")]
    xs = [p[0] for p in bpts]
    ys = [p[1] for p in bpts]
    width = min(max(xs) - min(xs), max(ys) - min(ys))

    pieces = []
    for pc in _children(_find(root, "lot"), "piece"):
        comps = _children(pc, "component")
        parts = []
        for comp in comps:
            dx = float(comp.get("xOffset", 0) or 0)
            dy = float(comp.get("yOffset", 0) or 0)
            parts.append([[x + dx, y + dy] for x, y in polys[comp.get("idPolygon")]])
        rec = {"id": pc.get("id"), "count": int(pc.get("quantity", 1)), "vertices": parts[0]}
        if len(parts) > 1:
            # components become the convex parts; the outline is their union
            rec["parts"] = parts
            rec["vertices"] = _outline_of(parts)
        if rec["count"] == 1:
            del rec["count"]
        pieces.append(rec)
    name_el = _find(root, "name", required=False)
    nm = name or (name_el.text.strip() if name_el is not None and name_el.text else "instance")
    return {"name": nm, "strip_width": width, "pieces": pieces}


def _outline_of(parts):
    """Outline of a union of convex parts that meet along shared edges."""
    edges = {}
    for part in parts:
        m = len(part)
        for k in range(m):
            a, b = tuple(part[k]), tuple(part[(k + 1) % m])
            if (b, a) in edges:
                del edges[(b, a)]
            else:
                edges[(a, b)] = True
    nxt = {a: b for a, b in edges}
    start = min(nxt)
    out, cur = [list(start)], nxt[start]
    while cur != start:
        out.append(list(cur))
        cur = nxt[cur]
    return out


def convert_text(text: str, name: str) -> dict:
    tok = re.findall(r"[-+0-9.eE]+", text)
    pos = 0

    def take():
        nonlocal pos
        pos += 1
        return tok[pos - 1]

    n_types = int(float(take()))
    width = float(take())
    pieces = []
    for k in range(n_types):
        qty = int(float(take()))
        nv = int(float(take()))
        verts = [[float(take()), float(take())] for _ in range(nv)]
        rec = {"id": f"P{k + 1}", "vertices": verts}
        if qty != 1:
            rec["count"] = qty
        pieces.append(rec)
    return {"name": name, "strip_width": width, "pieces": pieces}


def _scaled(doc: dict, s: float) -> dict:
    if s == 1.0:
        return doc
    doc["strip_width"] *= s
    for p in doc["pieces"]:
        p["vertices"] = [[x * s, y * s] for x, y in p["vertices"]]
        if "parts" in p:
            p["parts"] = [[[x * s, y * s] for x, y in part] for part in p["parts"]]
    return doc


def convert(path, name: str | None = None, scale: float = 1.0) -> dict:
    path = Path(path)
    text = path.read_text(encoding="utf-8", errors="replace")
    if text.lstrip().startswith("<"):
        doc = convert_xml(text, name)
    else:
        doc = convert_text(text, name or path.stem)
    return _scaled(doc, scale)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("source")
    ap.add_argument("-o", "--output", required=True)
    ap.add_argument("--name")
    ap.add_argument("--scale", type=float, default=1.0, help="multiply all coordinates")
    ap.add_argument("--raster-scale", type=float)
    args = ap.parse_args(argv)
    try:
        doc = convert(args.source, args.name, args.scale)
    except (OSError, ET.ParseError, ValueError, KeyError, AttributeError, IndexError) as exc:
        print(f"error: cannot convert {args.source}: {exc}", file=sys.stderr)
        return 2
    if args.raster_scale:
        doc["raster_scale"] = args.raster_scale
    Path(args.output).write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")
    print(f"{doc['name']}: {len(doc['pieces'])} piece types, strip width {doc['strip_width']}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
