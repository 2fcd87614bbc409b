"""Bottom-left starting layouts on a raster and line initialization.

A piece is rasterized conservatively: every grid cell whose square shares
interior with the rotated piece is marked.  Two masks that do not share a
cell therefore describe pieces whose exact overlap area is zero, so every
raster-feasible layout is also feasible in exact geometry.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kernels
from .geometry import Piece, Placement, bbox, rotate_points, separating_axis, transform_vertex
from .model import PairIndex, SeparationLineVar, enumerate_pairs

ROTATIONS = (0.0, 0.5 * math.pi, math.pi, 1.5 * math.pi)
DEFAULT_SCALES = {"albano": 0.02, "dagli": 0.5, "swim": 0.00005}


class DoesNotFit(ValueError):
    pass


class NoSeparator(RuntimeError):
    pass


class ScaleTooCoarse(UserWarning):
    pass


def default_scale(name: str) -> float:
    return DEFAULT_SCALES.get(name.lower(), 1.0)


@dataclass(frozen=True)
class PieceMask:
    piece_id: str
    rotation: int  # quarter turns, 0..3
    rows: np.ndarray
    cols: np.ndarray
    height_cells: int
    width_cells: int
    extent: tuple[float, float]  # rotated bbox size (length, width)
    offset: tuple[float, float]  # rotated bbox min corner
    piece_index: int = -1

    @property
    def cells(self) -> set[tuple[int, int]]:
        return set(zip(self.rows.tolist(), self.cols.tolist()))


@dataclass
class RasterGrid:
    scale: float
    strip_width: float
    occupancy: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.scale <= 0:
            raise ValueError("raster scale must be positive")
        if self.occupancy is None:
            self.occupancy = np.zeros((self.width_cells + 1, 64), dtype=np.uint8)

    @property
    def width_cells(self) -> int:
        return max(1, math.ceil(self.strip_width / self.scale - 1e-9))

    def ensure_length(self, cols: int) -> None:
        have = self.occupancy.shape[1]
        if cols > have:
            grow = max(cols, 2 * have)
            pad = np.zeros((self.occupancy.shape[0], grow - have), dtype=np.uint8)
            self.occupancy = np.ascontiguousarray(np.concatenate([self.occupancy, pad], axis=1))

    def max_row(self, mask: PieceMask) -> int:
        room = self.strip_width - mask.extent[1]
        if room < -1e-9 * max(1.0, self.strip_width):
            return -1
        return int(math.floor(max(room, 0.0) / self.scale + 1e-9))


@dataclass
class SeedLayout:
    placements: list[Placement]
    length: float
    line_init: list[SeparationLineVar] = field(default_factory=list)
    order: list[int] = field(default_factory=list)
    rotations: list[int] = field(default_factory=list)
    iteration: int = 0


def _cells_hit(poly: list, x0: float, y0: float, nx: int, ny: int, scale: float):
    """Boolean [row, col] array of cells whose interior meets the convex polygon."""
    P = np.asarray(poly, dtype=float)
    cx = x0 + scale * np.arange(nx)
    cy = y0 + scale * np.arange(ny)
    CX, CY = np.meshgrid(cx, cy)  # [row, col]
    hit = np.ones((ny, nx), dtype=bool)
    # cell axes
    hit &= (CX < P[:, 0].max()) & (CX + scale > P[:, 0].min())
    hit &= (CY < P[:, 1].max()) & (CY + scale > P[:, 1].min())
    m = len(P)
    for i in range(m):
        ex, ey = P[(i + 1) % m] - P[i]
        L = math.hypot(ex, ey)
        if L == 0:
            continue
        nxv, nyv = ey / L, -ex / L  # outward for ccw
        proj_poly = P @ np.array([nxv, nyv])
        pmin, pmax = proj_poly.min(), proj_poly.max()
        c0 = CX * nxv + CY * nyv
        corners = np.stack([c0, c0 + scale * nxv, c0 + scale * nyv, c0 + scale * (nxv + nyv)])
        cmin, cmax = corners.min(axis=0), corners.max(axis=0)
        # touching (shared boundary only) counts as separated
        hit &= (cmin < pmax) & (cmax > pmin)
    return hit


def rasterize(piece: Piece, rotation: int, scale: float, piece_index: int = -1) -> PieceMask:
    """Conservative cell cover of ``piece`` after ``rotation`` quarter turns.

    The mask grid is anchored at the rotated bounding-box corner and spans
    ``ceil(extent / scale)`` cells in each direction.
    """
    if scale <= 0:
        raise ValueError("scale must be positive")
    theta = ROTATIONS[rotation % 4]
    rot_outline = rotate_points(piece.outline, theta)
    x0, y0, x1, y1 = bbox(rot_outline)
    w, h = x1 - x0, y1 - y0
    if w < scale or h < scale:
        warnings.warn(
            f"piece {piece.id!r} is narrower than one raster cell at scale {scale}",
            ScaleTooCoarse,
            stacklevel=2,
        )
    nx = max(1, math.ceil(w / scale - 1e-9))
    ny = max(1, math.ceil(h / scale - 1e-9))
    hit = np.zeros((ny, nx), dtype=bool)
    for part in piece.parts:
        hit |= _cells_hit(rotate_points(part.vertices, theta), x0, y0, nx, ny, scale)
    rows, cols = np.nonzero(hit)
    return PieceMask(
        piece_id=piece.id,
        rotation=rotation % 4,
        rows=rows.astype(np.int64),
        cols=cols.astype(np.int64),
        height_cells=ny,
        width_cells=nx,
        extent=(w, h),
        offset=(x0, y0),
        piece_index=piece_index,
    )


def mask_table(pieces: Sequence[Piece], scale: float) -> list[list[PieceMask]]:
    """Masks for every piece at each of the four rotations."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ScaleTooCoarse)
        return [[rasterize(p, r, scale, i) for r in range(4)] for i, p in enumerate(pieces)]


def place_mask(grid: RasterGrid, mask: PieceMask, max_col: int) -> tuple[int, int]:
    grid.ensure_length(max_col + mask.width_cells + 2)
    return kernels.bl_search(grid.occupancy, mask.rows, mask.cols, grid.max_row(mask), max_col)


def bottom_left_place(masks: Sequence[PieceMask], grid: RasterGrid) -> list[tuple[int, int]]:
    """Place masks in order at the leftmost, then lowest, free grid position.

    Returns the ``(col, row)`` cell of each mask's anchor.  The grid is
    updated in place.
    """
    positions = []
    used_cols = 0
    for mask in masks:
        if grid.max_row(mask) < 0:
            raise DoesNotFit(f"piece {mask.piece_id!r} is wider than the strip")
        c, r = place_mask(grid, mask, used_cols)
        if c < 0:  # pragma: no cover - column used_cols is always empty
            raise DoesNotFit(f"no position for piece {mask.piece_id!r}")
        grid.occupancy[mask.rows + r, mask.cols + c] = 1
        used_cols = max(used_cols, c + mask.width_cells)
        positions.append((c, r))
    return positions


def mask_placement(mask: PieceMask, col: int, row: int, scale: float) -> Placement:
    theta = ROTATIONS[mask.rotation]
    return Placement(col * scale - mask.offset[0], row * scale - mask.offset[1], theta)


def layout_length(pieces: Sequence[Piece], placements: Sequence[Placement]) -> float:
    return max(
        transform_vertex(v, pl).x
        for pc, pl in zip(pieces, placements)
        for v in pc.outline
    )


def _fitting_rotation(table: list[PieceMask], grid: RasterGrid, first: int) -> int:
    for k in range(4):
        r = (first + k) % 4
        if grid.max_row(table[r]) >= 0:
            return r
    raise DoesNotFit(f"piece {table[0].piece_id!r} does not fit the strip at any rotation")


def construct(pieces: Sequence[Piece], masks: list[list[PieceMask]], strip_width: float,
              scale: float, order: Sequence[int], rotations: Sequence[int]) -> SeedLayout:
    grid = RasterGrid(scale, strip_width)
    chosen = []
    rots = []
    for i in order:
        r = _fitting_rotation(masks[i], grid, rotations[i])
        rots.append(r)
        chosen.append(masks[i][r])
    pos = bottom_left_place(chosen, grid)
    placements: list[Placement] = [None] * len(pieces)  # type: ignore[list-item]
    for i, m, (c, r) in zip(order, chosen, pos):
        placements[i] = mask_placement(m, c, r, scale)
    return SeedLayout(
        placements=placements,
        length=layout_length(pieces, placements),
        order=list(order),
        rotations=rots,
    )


def generate_start(pieces: Sequence[Piece], strip_width: float, iterations: int = 1000,
                   rng_seed: int = 0, scale: float = 1.0,
                   masks: list[list[PieceMask]] | None = None,
                   with_lines: bool = True) -> SeedLayout:
    """Best of ``iterations`` bottom-left constructions over random orders.

    Each iteration draws a uniform random permutation of the pieces and an
    independent uniform rotation per piece.  Ties in length keep the earlier
    iteration.
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    if masks is None:
        masks = mask_table(pieces, scale)
    rng = np.random.Generator(np.random.PCG64(rng_seed))
    n = len(pieces)
    best = None
    for it in range(iterations):
        order = rng.permutation(n).tolist()
        rotations = rng.integers(0, 4, size=n).tolist()
        lay = construct(pieces, masks, strip_width, scale, order, rotations)
        if best is None or lay.length < best.length:
            lay.iteration = it
            best = lay
    if with_lines:
        best.line_init = init_lines(best.placements, pieces)
    return best


def line_from_separator(anchor, angle: float) -> SeparationLineVar:
    # separating_axis puts the first polygon on the left; the model wants it
    # on the right (r <= 0), so reverse the direction.
    return SeparationLineVar(anchor[0], anchor[1], angle + math.pi)


def init_lines(placements: Sequence[Placement], pieces: Sequence[Piece],
               pairs: Sequence[PairIndex] | None = None) -> list[SeparationLineVar]:
    """A valid separation line for every cross-piece part pair of a layout."""
    if pairs is None:
        pairs = enumerate_pairs(pieces)
    placed = {
        (i, j): [transform_vertex(v, placements[i]) for v in part.vertices]
        for i, pc in enumerate(pieces)
        for j, part in enumerate(pc.parts)
    }
    out = []
    for pr in pairs:
        sep = separating_axis(placed[(pr.piece_i, pr.part_j)], placed[(pr.piece_r, pr.part_s)])
        if sep is None:
            raise NoSeparator(f"parts {pr} overlap in the seed layout")
        out.append(line_from_separator(*sep))
    return out


def timed_start(*args, **kwargs) -> tuple[SeedLayout, float]:
    t0 = time.perf_counter()
    lay = generate_start(*args, **kwargs)
    return lay, time.perf_counter() - t0
