import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nestline.geometry import (
    Degenerate, GeometryError, Placement, Point, SelfIntersecting, cos_sin, decompose, is_convex,
    normalize_piece, overlap_area, rotate_points, separating_axis, side_residual, signed_area,
    transform_vertex,
)

from conftest import ARROW_OUTLINE, ARROW_PARTS, UNIT_SQUARE, random_simple_polygon


def sq(x0, y0, x1, y1):
    return [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]


# --- normalize_piece -------------------------------------------------------

def test_normalize_clockwise_square_translated():
    cw = [(3, 3), (3, 4), (4, 4), (4, 3)]
    pc = normalize_piece(cw, "s")
    assert pc.outline[0] == (0.0, 0.0)
    assert signed_area(pc.outline) == pytest.approx(1.0)
    assert sorted(pc.outline) == [(0, 0), (0, 1), (1, 0), (1, 1)]


def test_normalize_identity_when_origin_is_vertex():
    pc = normalize_piece(UNIT_SQUARE)
    assert list(pc.outline) == UNIT_SQUARE
    assert pc.reference == (0.0, 0.0)


def test_arrow_parts_sum_to_outline_area():
    pc = normalize_piece(ARROW_OUTLINE, "arrow")
    total = sum(p.area for p in pc.parts)
    assert total == pytest.approx(pc.area, rel=1e-9)


def test_arrow_with_supplied_parts():
    pc = normalize_piece(ARROW_OUTLINE, "arrow", ARROW_PARTS)
    assert len(pc.parts) == 5
    assert sum(p.area for p in pc.parts) == pytest.approx(pc.area, rel=1e-9)


def test_bowtie_rejected():
    with pytest.raises(SelfIntersecting):
        normalize_piece([(0, 0), (1, 1), (1, 0), (0, 1)])


def test_degenerate_rejected():
    with pytest.raises(Degenerate):
        normalize_piece([(0, 0), (1, 0), (2, 0)])


def test_nonconvex_supplied_part_rejected():
    L = [(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)]
    with pytest.raises(GeometryError):
        normalize_piece(L, "L", [L])


def test_supplied_parts_with_wrong_area_rejected():
    L = [(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)]
    with pytest.raises(GeometryError):
        normalize_piece(L, "L", [sq(0, 0, 2, 1)])


def test_collinear_vertices_retained():
    pts = [(0, 0), (1, 0), (2, 0), (2, 2), (0, 2)]
    pc = normalize_piece(pts)
    assert len(pc.outline) == 5


# --- decompose -------------------------------------------------------------

def test_decompose_convex_pentagon_single_part():
    pent = [(math.cos(2 * math.pi * k / 5), math.sin(2 * math.pi * k / 5)) for k in range(5)]
    parts = decompose(pent)
    assert len(parts) == 1
    assert set(parts[0].vertices) == set(pent)


def test_decompose_l_shape():
    L = [(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)]
    parts = decompose(L)
    assert sum(p.area for p in parts) == pytest.approx(3.0)
    assert all(is_convex(p.vertices) for p in parts)
    for a in range(len(parts)):
        for b in range(a + 1, len(parts)):
            assert overlap_area(parts[a].vertices, parts[b].vertices) == pytest.approx(0.0, abs=1e-12)


def test_decompose_arrow_part_bound():
    parts = decompose(ARROW_OUTLINE)
    assert len(parts) <= len(ARROW_OUTLINE) - 2
    assert sum(p.area for p in parts) == pytest.approx(abs(signed_area(ARROW_OUTLINE)), rel=1e-9)


def test_decompose_random_simple_polygons():
    rng = np.random.default_rng(7)
    for _ in range(500):
        poly = random_simple_polygon(rng)
        parts = decompose(poly)
        area = abs(signed_area(poly))
        assert sum(p.area for p in parts) == pytest.approx(area, rel=1e-9)
        assert len(parts) <= len(poly) - 2
        assert all(is_convex(p.vertices) for p in parts)
        for a in range(len(parts)):
            for b in range(a + 1, len(parts)):
                assert overlap_area(parts[a].vertices, parts[b].vertices) <= 1e-9 * area


# --- transforms ------------------------------------------------------------

@pytest.mark.parametrize("v, pl, expected", [
    ((1, 0), Placement(0, 0, 0.0), (1, 0)),
    ((1, 0), Placement(0, 0, math.pi / 2), (0, 1)),
    ((2, 1), Placement(5, 5, math.pi), (3, 4)),
])
def test_transform_vertex(v, pl, expected):
    p = transform_vertex(v, pl)
    assert p.x == pytest.approx(expected[0], abs=1e-15)
    assert p.y == pytest.approx(expected[1], abs=1e-15)


def test_cos_sin_exact_quarter_turns():
    assert cos_sin(0.0) == (1.0, 0.0)
    assert cos_sin(math.pi / 2) == (0.0, 1.0)
    assert cos_sin(math.pi) == (-1.0, 0.0)
    assert cos_sin(1.5 * math.pi) == (0.0, -1.0)


@settings(max_examples=200, deadline=None)
@given(st.floats(-10, 10), st.floats(-10, 10), st.floats(-20, 20))
def test_transform_is_isometry(tx, ty, theta):
    pts = [(0, 0), (3, 1), (1, 4)]
    placed = [transform_vertex(p, Placement(tx, ty, theta)) for p in pts]
    for i in range(3):
        for j in range(3):
            d0 = math.dist(pts[i], pts[j])
            assert math.dist(placed[i], placed[j]) == pytest.approx(d0, abs=1e-9)
    assert signed_area(placed) == pytest.approx(signed_area(pts), abs=1e-9)


# --- overlap oracle --------------------------------------------------------

@pytest.mark.parametrize("a, b, area", [
    (sq(0, 0, 1, 1), sq(0, 0, 1, 1), 1.0),
    (sq(0, 0, 1, 1), sq(2, 0, 3, 1), 0.0),
    (sq(0, 0, 1, 1), sq(0.5, 0, 1.5, 1), 0.5),
])
def test_overlap_area_examples(a, b, area):
    assert overlap_area(a, b) == pytest.approx(area, abs=1e-15)


@settings(max_examples=200, deadline=None)
@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(0, 2 * math.pi))
def test_overlap_symmetric_and_bounded(dx, dy, th):
    a = rotate_points(sq(0, 0, 1, 1), 0.3)
    b = [transform_vertex(p, Placement(dx, dy, th)) for p in [(0, 0), (2, 0), (1, 1.5)]]
    ab, ba = overlap_area(a, b), overlap_area(b, a)
    assert ab == pytest.approx(ba, abs=1e-12)
    assert -1e-12 <= ab <= min(abs(signed_area(a)), abs(signed_area(b))) + 1e-12


# --- separating axis -------------------------------------------------------

def test_separator_between_disjoint_squares():
    anchor, angle = separating_axis(sq(0, 0, 1, 1), sq(2, 0, 3, 1))
    assert anchor.x == pytest.approx(1.5)
    assert anchor.y == pytest.approx(0.0)
    assert angle == pytest.approx(math.pi / 2)


def test_separator_through_shared_edge():
    anchor, angle = separating_axis(sq(0, 0, 1, 1), sq(1, 0, 2, 1))
    assert anchor.x == pytest.approx(1.0)
    assert math.cos(angle) == pytest.approx(0.0, abs=1e-15)
    for p in sq(0, 0, 1, 1):
        assert side_residual(p, anchor, angle) >= -1e-15
    for p in sq(1, 0, 2, 1):
        assert side_residual(p, anchor, angle) <= 1e-15


def test_no_separator_for_overlapping_squares():
    assert separating_axis(sq(0, 0, 2, 2), sq(1, 1, 3, 3)) is None


@settings(max_examples=300, deadline=None)
@given(st.floats(-4, 4), st.floats(-4, 4), st.floats(0, 2 * math.pi), st.floats(0, 2 * math.pi))
def test_separator_agrees_with_overlap_oracle(dx, dy, t1, t2):
    a = [transform_vertex(p, Placement(0, 0, t1)) for p in [(0, 0), (2, 0), (2, 1), (0, 1)]]
    b = [transform_vertex(p, Placement(dx, dy, t2)) for p in [(0, 0), (1, 0), (0.5, 1)]]
    sep = separating_axis(a, b)
    ov = overlap_area(a, b)
    if sep is None:
        assert ov > 0
    else:
        anchor, ang = sep
        d = 1e-9 * 10
        assert all(side_residual(p, anchor, ang) >= -d for p in a)
        assert all(side_residual(p, anchor, ang) <= d for p in b)
        assert ov <= 1e-8
