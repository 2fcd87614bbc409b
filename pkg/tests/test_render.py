import re

import pytest

from nestline.geometry import Placement
from nestline.instance import ValidationError
from nestline.render import layout_svg, render_svg
from nestline.report import Layout

from conftest import squares


def two_squares_layout():
    return Layout("two", 1.0, 2.0, ["S0", "S1"], [Placement(0, 0, 0), Placement(1, 0, 0)])


def test_two_squares_polygons_and_frame():
    svg = layout_svg(two_squares_layout(), squares(2), 1.0)
    assert svg.count("<polygon") == 2
    assert svg.count("<rect") == 1
    assert 'stroke-dasharray' in svg
    assert 'version="1.1"' in svg


def test_deterministic_bytes(tmp_path):
    render_svg(two_squares_layout(), squares(2), 1.0, tmp_path / "a.svg")
    render_svg(two_squares_layout(), squares(2), 1.0, tmp_path / "b.svg")
    assert (tmp_path / "a.svg").read_bytes() == (tmp_path / "b.svg").read_bytes()


def test_length_marker_position():
    svg = layout_svg(two_squares_layout(), squares(2), 1.0)
    assert re.search(r'<line x1="2" y1="0" x2="2"', svg)


def test_empty_layout_rejected():
    with pytest.raises(ValidationError):
        layout_svg(Layout("e", 1.0, 0.0, [], []), [], 1.0)


def test_piece_count_mismatch_rejected():
    with pytest.raises(ValidationError):
        layout_svg(two_squares_layout(), squares(3), 1.0)
