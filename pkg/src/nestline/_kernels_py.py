"""Numpy implementations of the hot loops.

Used when the compiled ``_kernels`` extension is unavailable and as the
reference the compiled version is tested against.
"""

import numpy as np


def bl_search(occ, rows, cols, max_row, max_col):
    """Lexicographically smallest collision-free (col, row) for a mask.

    ``occ`` is the occupancy grid indexed ``[row, col]``; ``rows``/``cols``
    are the mask cell offsets.  Returns ``(-1, -1)`` when nothing fits in
    ``0..max_col``.
    """
    if max_row < 0:
        return -1, -1
    h = max_row + 1
    w = max_col + 1
    need_c = w + (int(cols.max()) if len(cols) else 0)
    if occ.shape[1] < need_c:
        pad = np.zeros((occ.shape[0], need_c - occ.shape[1]), dtype=occ.dtype)
        occ = np.concatenate([occ, pad], axis=1)
    hit = np.zeros((h, w), dtype=bool)
    for dr, dc in zip(rows, cols):
        hit |= occ[dr:dr + h, dc:dc + w].astype(bool)
    free = ~hit.T  # [col, row]
    flat = np.flatnonzero(free.ravel())
    if flat.size == 0:
        return -1, -1
    c, r = divmod(int(flat[0]), h)
    return c, r


def placed_vertices(v, vp, vx, vy):
    th = v[3 + 3 * vp]
    c = np.cos(th)
    s = np.sin(th)
    tx = v[1 + 3 * vp]
    ty = v[2 + 3 * vp]
    return vx * c - vy * s + tx, vx * s + vy * c + ty, tx, ty


def constraints(v, e, n, vp, vx, vy, sk, sl, ssign):
    X, Y, _, _ = placed_vertices(v, vp, vx, vy)
    K = len(vp)
    g = np.empty(4 * K + len(sk))
    g[0:4 * K:4] = -Y
    g[1:4 * K:4] = Y - e
    g[2:4 * K:4] = -X
    g[3:4 * K:4] = X - v[0]
    base = 1 + 3 * n + 3 * sl
    xb = v[base]
    yb = v[base + 1]
    al = v[base + 2]
    g[4 * K:] = ssign * ((Y[sk] - yb) * np.cos(al) - (X[sk] - xb) * np.sin(al))
    return g


def jt_vec(v, w, e, n, vp, vx, vy, sk, sl, ssign):
    """Return J(v)^T w for the constraint Jacobian J."""
    X, Y, tx, ty = placed_vertices(v, vp, vx, vy)
    K = len(vp)
    dim = len(v)
    out = np.zeros(dim)
    w1, w2, w3, w4 = w[0:4 * K:4], w[1:4 * K:4], w[2:4 * K:4], w[3:4 * K:4]
    dX = X - tx
    dY = Y - ty
    gtx = w4 - w3
    gty = w2 - w1
    gth = (w2 - w1) * dX + (w3 - w4) * dY
    out[0] -= w4.sum()

    ws = w[4 * K:] * ssign
    base = 1 + 3 * n + 3 * sl
    xb = v[base]
    yb = v[base + 1]
    al = v[base + 2]
    ca = np.cos(al)
    sa = np.sin(al)
    Xs = X[sk]
    Ys = Y[sk]
    # per separation row contributions to the owning vertex
    sgtx = -ws * sa
    sgty = ws * ca
    sgth = ws * (dX[sk] * ca + dY[sk] * sa)
    gtx = gtx + np.bincount(sk, sgtx, minlength=K)
    gty = gty + np.bincount(sk, sgty, minlength=K)
    gth = gth + np.bincount(sk, sgth, minlength=K)
    out[1:1 + 3 * n:3] += np.bincount(vp, gtx, minlength=n)
    out[2:2 + 3 * n:3] += np.bincount(vp, gty, minlength=n)
    out[3:3 + 3 * n:3] += np.bincount(vp, gth, minlength=n)

    Q = (dim - 1 - 3 * n) // 3
    lo = 1 + 3 * n
    out[lo::3] += np.bincount(sl, ws * sa, minlength=Q)
    out[lo + 1::3] += np.bincount(sl, -ws * ca, minlength=Q)
    out[lo + 2::3] += np.bincount(sl, -ws * ((Ys - yb) * sa + (Xs - xb) * ca), minlength=Q)
    return out


def al_value_grad(v, lam, rho, e, n, vp, vx, vy, sk, sl, ssign, g_out):
    """Augmented Lagrangian ``z + sum((max(0, lam + rho g)^2 - lam^2) / (2 rho))``.

    Writes the constraint values into ``g_out`` and returns ``(value, grad)``.
    """
    g = constraints(v, e, n, vp, vx, vy, sk, sl, ssign)
    g_out[:] = g
    w = np.maximum(0.0, lam + rho * g)
    val = v[0] + float(np.dot(w, w) - np.dot(lam, lam)) / (2.0 * rho)
    grad = jt_vec(v, w, e, n, vp, vx, vy, sk, sl, ssign)
    grad[0] += 1.0
    return val, grad
