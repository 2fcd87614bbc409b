import importlib.util
import json
from pathlib import Path

from nestline.instance import parse_instance

TOOL = Path(__file__).resolve().parent.parent / "tools" / "esicup_convert.py"
spec = importlib.util.spec_from_file_location("esicup_convert", TOOL)
conv = importlib.util.module_from_spec(spec)
spec.loader.exec_module(conv)

XML = """<?xml version="1.0"?>
<nesting xmlns="http://globalnest.fe.up.pt/nesting">
  <name>tiny</name>
  <problem>
    <boards><piece id="board0" quantity="1"><component idPolygon="polygon0" type="0"/></piece></boards>
    <lot>
      <piece id="piece0" quantity="2"><component idPolygon="polygon1" type="0" xOffset="0" yOffset="0"/></piece>
      <piece id="piece1" quantity="1"><component idPolygon="polygon2" type="0" xOffset="0" yOffset="0"/></piece>
    </lot>
  </problem>
  <polygons>
    <polygon id="polygon0" nVertices="4"><lines>
      <segment n="1" x0="0" y0="0" x1="100" y1="0"/><segment n="2" x0="100" y0="0" x1="100" y1="4"/>
      <segment n="3" x0="100" y0="4" x1="0" y1="4"/><segment n="4" x0="0" y0="4" x1="0" y1="0"/>
    </lines></polygon>
    <polygon id="polygon1" nVertices="3"><lines>
      <segment n="1" x0="0" y0="0" x1="2" y1="0"/><segment n="2" x0="2" y0="0" x1="0" y1="2"/>
      <segment n="3" x0="0" y0="2" x1="0" y1="0"/>
    </lines></polygon>
    <polygon id="polygon2" nVertices="4"><lines>
      <segment n="1" x0="0" y0="0" x1="1" y1="0"/><segment n="2" x0="1" y0="0" x1="1" y1="1"/>
      <segment n="3" x0="1" y0="1" x1="0" y1="1"/><segment n="4" x0="0" y0="1" x1="0" y1="0"/>
    </lines></polygon>
  </polygons>
</nesting>
"""

TEXT = """2
4
2
3
0 0
2 0
0 2
1
4
0 0
1 0
1 1
0 1
"""


def test_xml(tmp_path):
    src = tmp_path / "tiny.xml"
    src.write_text(XML)
    out = tmp_path / "tiny.json"
    assert conv.main([str(src), "-o", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["strip_width"] == 4.0 and doc["name"] == "tiny"
    inst = parse_instance(out)
    assert inst.n == 3


def test_text(tmp_path):
    src = tmp_path / "tiny.dat"
    src.write_text(TEXT)
    out = tmp_path / "tiny.json"
    assert conv.main([str(src), "-o", str(out), "--scale", "2"]) == 0
    inst = parse_instance(out)
    assert inst.strip_width == 8.0 and inst.n == 3
    assert abs(inst.pieces[0].area - 8.0) < 1e-12


def test_multi_component_outline():
    parts = [[[0, 0], [1, 0], [1, 1], [0, 1]], [[1, 0], [2, 0], [2, 1], [1, 1]]]
    assert sorted(map(tuple, conv._outline_of(parts))) == [(0, 0), (0, 1), (1, 0), (1, 1), (2, 0), (2, 1)]


def test_bad_source(tmp_path):
    src = tmp_path / "bad.xml"
    src.write_text("<nesting><oops/></nesting>")
    assert conv.main([str(src), "-o", str(tmp_path / "o.json")]) == 2
