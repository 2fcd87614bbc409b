"""The separation-line nonlinear program.

Decision vector layout::

    v = [z, tx_1, ty_1, theta_1, ..., tx_n, ty_n, theta_n,
         xb_1, yb_1, alpha_1, ..., xb_Q, yb_Q, alpha_Q]

All constraints are ``g(v) <= 0``.  For every convex-part vertex there are
four containment rows ``(-y, y - e, -x, x - z)``; then, for every
cross-piece part pair, one separation row per vertex of either part.  A
separation row is the signed distance of the vertex to the pair's line,
``r = (y - yb) cos(alpha) - (x - xb) sin(alpha)``: the first part of the pair
must have ``r <= 0``, the second ``-r <= 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np
import scipy.sparse as sp

from . import kernels
from .geometry import Piece, Placement, overlap_area, transform_vertex


class EmptyInstance(ValueError):
    pass


class DimensionMismatch(ValueError):
    pass


class SeparationLineVar(NamedTuple):
    x_bar: float
    y_bar: float
    alpha: float


class PairIndex(NamedTuple):
    piece_i: int
    part_j: int
    piece_r: int
    part_s: int


def enumerate_pairs(pieces: Sequence[Piece]) -> list[PairIndex]:
    """All cross-piece convex-part pairs in lexicographic (i, j, r, s) order."""
    out = []
    for i, a in enumerate(pieces):
        for j in range(len(a.parts)):
            for r in range(i + 1, len(pieces)):
                for s in range(len(pieces[r].parts)):
                    out.append(PairIndex(i, j, r, s))
    return out


def pair_count_formula(part_counts: Sequence[int]) -> int:
    """Closed form ``sum_i p_i * (N - sum_{k<=i} p_k)`` for the number of lines."""
    N = sum(part_counts)
    total = 0
    running = 0
    for p in part_counts[:-1]:
        running += p
        total += p * (N - running)
    return total


def placed_vertex(vertex: Sequence[float], pl: Placement):
    """Placed coordinates of a local vertex and their partials.

    Returns ``((x, y), dx, dy)`` where ``dx``/``dy`` are the gradients with
    respect to ``(tx, ty, theta)``.
    """
    c, s = math.cos(pl.theta), math.sin(pl.theta)
    vx, vy = vertex
    x = vx * c - vy * s + pl.tx
    y = vx * s + vy * c + pl.ty
    dx = (1.0, 0.0, -vx * s - vy * c)
    dy = (0.0, 1.0, vx * c - vy * s)
    return (x, y), dx, dy


def separation_residual(point: Sequence[float], line: SeparationLineVar, first: bool = True):
    """Signed residual of a placed vertex against a line, with gradient.

    ``first`` selects the block of the pair's first part (``r <= 0``); the
    second part's rows carry the opposite sign.  The gradient is with respect
    to ``(x, y, x_bar, y_bar, alpha)``; chain it with :func:`placed_vertex`
    for the piece variables.
    """
    x, y = point
    ca, sa = math.cos(line.alpha), math.sin(line.alpha)
    sign = 1.0 if first else -1.0
    r = (y - line.y_bar) * ca - (x - line.x_bar) * sa
    grad = (
        -sa,
        ca,
        sa,
        -ca,
        -(y - line.y_bar) * sa - (x - line.x_bar) * ca,
    )
    return sign * r, tuple(sign * g for g in grad)


@dataclass
class FeasibilityReport:
    max_violation: float
    families: dict
    max_overlap: float
    overlapping_pairs: list = field(default_factory=list)
    worst_rows: dict = field(default_factory=dict)

    def ok(self, tol: float = 1e-6, overlap_tol: float = 0.0) -> bool:
        return self.max_violation <= tol and self.max_overlap <= overlap_tol


class NlpProblem:
    """Objective, constraints, derivatives and bounds for one instance.

    Evaluation goes through :mod:`nestline.kernels`, so the compiled or numpy
    path is picked up transparently.  Arrays are read-only after construction.
    """

    def __init__(self, pieces: Sequence[Piece], strip_width: float,
                 pairs: Optional[Sequence[PairIndex]] = None,
                 z_upper: float = math.inf):
        if not pieces:
            raise EmptyInstance("instance has no pieces")
        self.pieces = tuple(pieces)
        self.strip_width = float(strip_width)
        self.pairs = tuple(enumerate_pairs(pieces) if pairs is None else pairs)
        self.n = len(pieces)
        self.Q = len(self.pairs)
        self.dimension = 1 + 3 * self.n + 3 * self.Q

        vp, vx, vy, vpart = [], [], [], []
        part_rows: dict[tuple[int, int], list[int]] = {}
        gpart = 0
        for i, pc in enumerate(pieces):
            for j, part in enumerate(pc.parts):
                rows = part_rows.setdefault((i, j), [])
                for vert in part.vertices:
                    rows.append(len(vp))
                    vp.append(i)
                    vx.append(vert.x)
                    vy.append(vert.y)
                    vpart.append(gpart)
                gpart += 1
        sk, sl, ssign = [], [], []
        for ell, pr in enumerate(self.pairs):
            for k in part_rows[(pr.piece_i, pr.part_j)]:
                sk.append(k)
                sl.append(ell)
                ssign.append(1.0)
            for k in part_rows[(pr.piece_r, pr.part_s)]:
                sk.append(k)
                sl.append(ell)
                ssign.append(-1.0)

        def ro(a, dtype):
            arr = np.ascontiguousarray(a, dtype=dtype)
            arr.setflags(write=False)
            return arr

        self.vp = ro(vp, np.int64)
        self.vx = ro(vx, np.float64)
        self.vy = ro(vy, np.float64)
        self.vpart = ro(vpart, np.int64)
        self.sk = ro(sk, np.int64)
        self.sl = ro(sl, np.int64)
        self.ssign = ro(ssign, np.float64)
        self.part_rows = part_rows
        self.n_vertices = len(vp)
        self.n_containment = 4 * self.n_vertices
        self.n_constraints = self.n_containment + len(sk)

        area = sum(p.area for p in pieces)
        lower = np.full(self.dimension, -np.inf)
        upper = np.full(self.dimension, np.inf)
        lower[0] = area / self.strip_width
        upper[0] = z_upper
        self.lower = ro(lower, np.float64)
        self.upper = ro(upper, np.float64)
        self.total_area = area

        fam = np.empty(self.n_constraints, dtype=np.int8)
        fam[0:self.n_containment:4] = 0
        fam[1:self.n_containment:4] = 0
        fam[2:self.n_containment:4] = 1
        fam[3:self.n_containment:4] = 1
        fam[self.n_containment:] = 2
        self.family = ro(fam, np.int8)

    FAMILIES = ("containment_y", "containment_x", "separation")

    def _args(self):
        return (self.strip_width, self.n, self.vp, self.vx, self.vy,
                self.sk, self.sl, self.ssign)

    def _check(self, v) -> np.ndarray:
        v = np.ascontiguousarray(v, dtype=np.float64)
        if v.shape != (self.dimension,):
            raise DimensionMismatch(f"expected vector of length {self.dimension}, got {v.shape}")
        return v

    # objective is the strip length variable itself
    def objective(self, v) -> float:
        return float(self._check(v)[0])

    def objective_grad(self, v) -> np.ndarray:
        self._check(v)
        g = np.zeros(self.dimension)
        g[0] = 1.0
        return g

    def constraints(self, v) -> np.ndarray:
        return np.asarray(kernels.constraints(self._check(v), *self._args()))

    def jt_vec(self, v, w) -> np.ndarray:
        w = np.ascontiguousarray(w, dtype=np.float64)
        return np.asarray(kernels.jt_vec(self._check(v), w, *self._args()))

    def al_value_grad(self, v, lam, rho, g_out):
        return kernels.al_value_grad(self._check(v), lam, float(rho), *self._args(), g_out)

    def jacobian(self, v) -> sp.csr_matrix:
        """Sparse constraint Jacobian (rows = constraints)."""
        v = self._check(v)
        n, K = self.n, self.n_vertices
        th = v[3 + 3 * self.vp]
        c, s = np.cos(th), np.sin(th)
        dXdth = -self.vx * s - self.vy * c
        dYdth = self.vx * c - self.vy * s
        X = self.vx * c - self.vy * s + v[1 + 3 * self.vp]
        Y = self.vx * s + self.vy * c + v[2 + 3 * self.vp]
        tcol = 1 + 3 * self.vp
        kk = np.arange(K)
        rows, cols, vals = [], [], []

        def add(r, cc, vv):
            rows.append(r)
            cols.append(cc)
            vals.append(vv)

        add(4 * kk, tcol + 1, -np.ones(K))
        add(4 * kk, tcol + 2, -dYdth)
        add(4 * kk + 1, tcol + 1, np.ones(K))
        add(4 * kk + 1, tcol + 2, dYdth)
        add(4 * kk + 2, tcol, -np.ones(K))
        add(4 * kk + 2, tcol + 2, -dXdth)
        add(4 * kk + 3, tcol, np.ones(K))
        add(4 * kk + 3, tcol + 2, dXdth)
        add(4 * kk + 3, np.zeros(K, dtype=np.int64), -np.ones(K))

        S = len(self.sk)
        ri = self.n_containment + np.arange(S)
        base = 1 + 3 * n + 3 * self.sl
        xb, yb, al = v[base], v[base + 1], v[base + 2]
        ca, sa = np.cos(al), np.sin(al)
        sg = self.ssign
        k = self.sk
        pc = tcol[k]
        add(ri, pc, -sg * sa)
        add(ri, pc + 1, sg * ca)
        add(ri, pc + 2, sg * (dYdth[k] * ca - dXdth[k] * sa))
        add(ri, base, sg * sa)
        add(ri, base + 1, -sg * ca)
        add(ri, base + 2, sg * (-(Y[k] - yb) * sa - (X[k] - xb) * ca))
        J = sp.coo_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(self.n_constraints, self.dimension),
        )
        return J.tocsr()

    # --- encoding -------------------------------------------------------
    def encode(self, z: float, placements: Sequence[Placement],
               lines: Sequence[SeparationLineVar]) -> np.ndarray:
        if len(placements) != self.n or len(lines) != self.Q:
            raise DimensionMismatch("placement/line counts do not match the problem")
        v = np.empty(self.dimension)
        v[0] = z
        v[1:1 + 3 * self.n] = np.asarray(placements, dtype=float).reshape(-1)
        if self.Q:
            v[1 + 3 * self.n:] = np.asarray(lines, dtype=float).reshape(-1)
        return v

    def decode(self, v):
        v = self._check(v)
        pls = [Placement(*map(float, v[1 + 3 * i:4 + 3 * i])) for i in range(self.n)]
        lo = 1 + 3 * self.n
        lines = [SeparationLineVar(*map(float, v[lo + 3 * q:lo + 3 * q + 3])) for q in range(self.Q)]
        return float(v[0]), pls, lines

    def placed_parts(self, placements: Sequence[Placement]):
        """Placed vertex lists indexed by (piece, part)."""
        return {
            (i, j): [transform_vertex(vt, placements[i]) for vt in part.vertices]
            for i, pc in enumerate(self.pieces)
            for j, part in enumerate(pc.parts)
        }

    def max_vertex_x(self, v) -> float:
        v = self._check(v)
        g = self.constraints(v)
        return float(np.max(g[3:self.n_containment:4]) + v[0])


def build_problem(pieces: Sequence[Piece], strip_width: float,
                  pairs: Optional[Sequence[PairIndex]] = None,
                  z_upper: float = math.inf) -> NlpProblem:
    return NlpProblem(pieces, strip_width, pairs, z_upper)


def pair_overlaps(problem: NlpProblem, placements: Sequence[Placement]):
    """Exact overlap area of every cross-piece part pair (bbox-filtered)."""
    placed = problem.placed_parts(placements)
    boxes = {}
    for key, pts in placed.items():
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        boxes[key] = (min(xs), min(ys), max(xs), max(ys))
    out = []
    for pr in problem.pairs:
        a = (pr.piece_i, pr.part_j)
        b = (pr.piece_r, pr.part_s)
        ba, bb = boxes[a], boxes[b]
        if ba[2] <= bb[0] or bb[2] <= ba[0] or ba[3] <= bb[1] or bb[3] <= ba[1]:
            continue
        area = overlap_area(placed[a], placed[b])
        if area > 0.0:
            out.append((pr, area))
    return out


def check_feasibility(v, problem: NlpProblem) -> FeasibilityReport:
    """Constraint violations per family plus the exact overlap cross-check."""
    g = problem.constraints(v)
    fam = {}
    worst = {}
    for f, name in enumerate(NlpProblem.FAMILIES):
        sel = np.flatnonzero(problem.family == f)
        if sel.size:
            i = int(sel[np.argmax(g[sel])])
            fam[name] = max(0.0, float(g[i]))
            worst[name] = i
        else:
            fam[name] = 0.0
    _, pls, _ = problem.decode(v)
    overlaps = pair_overlaps(problem, pls)
    return FeasibilityReport(
        max_violation=max(fam.values()),
        families=fam,
        max_overlap=max((a for _, a in overlaps), default=0.0),
        overlapping_pairs=overlaps,
        worst_rows=worst,
    )


def min_part_area(pieces: Sequence[Piece]) -> float:
    return min(part.area for pc in pieces for part in pc.parts)
