# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot loops in ``_kernels_py``; same signatures."""

import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin

cnp.import_array()


def bl_search(const unsigned char[:, :] occ, const cnp.int64_t[:] rows, const cnp.int64_t[:] cols,
              long max_row, long max_col):
    cdef Py_ssize_t nr = occ.shape[0], nc = occ.shape[1]
    cdef Py_ssize_t m = rows.shape[0]
    cdef long c, r, k, rr, cc
    cdef bint ok
    if max_row < 0:
        return -1, -1
    for c in range(max_col + 1):
        for r in range(max_row + 1):
            ok = True
            for k in range(m):
                rr = r + rows[k]
                cc = c + cols[k]
                if cc < nc and rr < nr and occ[rr, cc]:
                    ok = False
                    break
            if ok:
                return c, r
    return -1, -1


cdef inline void _place(const double[:] v, const cnp.int64_t[:] vp, const double[:] vx,
                        const double[:] vy, double[:] X, double[:] Y,
                        double[:] cth, double[:] sth, long n):
    cdef Py_ssize_t k, p
    for p in range(n):
        cth[p] = cos(v[3 + 3 * p])
        sth[p] = sin(v[3 + 3 * p])
    for k in range(vp.shape[0]):
        p = vp[k]
        X[k] = vx[k] * cth[p] - vy[k] * sth[p] + v[1 + 3 * p]
        Y[k] = vx[k] * sth[p] + vy[k] * cth[p] + v[2 + 3 * p]


def constraints(double[:] v, double e, long n, const cnp.int64_t[:] vp, const double[:] vx,
                const double[:] vy, const cnp.int64_t[:] sk, const cnp.int64_t[:] sl,
                const double[:] ssign):
    cdef Py_ssize_t K = vp.shape[0], S = sk.shape[0], i, k, b
    cdef double[:] X = np.empty(K), Y = np.empty(K)
    cdef double[:] cth = np.empty(n), sth = np.empty(n)
    out = np.empty(4 * K + S)
    cdef double[:] g = out
    _place(v, vp, vx, vy, X, Y, cth, sth, n)
    for k in range(K):
        g[4 * k] = -Y[k]
        g[4 * k + 1] = Y[k] - e
        g[4 * k + 2] = -X[k]
        g[4 * k + 3] = X[k] - v[0]
    for i in range(S):
        k = sk[i]
        b = 1 + 3 * n + 3 * sl[i]
        g[4 * K + i] = ssign[i] * ((Y[k] - v[b + 1]) * cos(v[b + 2])
                                   - (X[k] - v[b]) * sin(v[b + 2]))
    return out


cdef void _jt_accumulate(const double[:] v, const double[:] w, long n,
                         const cnp.int64_t[:] vp, const double[:] X, const double[:] Y,
                         const cnp.int64_t[:] sk, const cnp.int64_t[:] sl, const double[:] ssign,
                         double[:] out):
    cdef Py_ssize_t K = vp.shape[0], S = sk.shape[0], i, k, p, b
    cdef double dX, dY, ws, ca, sa
    for k in range(K):
        p = vp[k]
        dX = X[k] - v[1 + 3 * p]
        dY = Y[k] - v[2 + 3 * p]
        out[1 + 3 * p] += w[4 * k + 3] - w[4 * k + 2]
        out[2 + 3 * p] += w[4 * k + 1] - w[4 * k]
        out[3 + 3 * p] += (w[4 * k + 1] - w[4 * k]) * dX + (w[4 * k + 2] - w[4 * k + 3]) * dY
        out[0] -= w[4 * k + 3]
    for i in range(S):
        ws = w[4 * K + i]
        if ws == 0.0:
            continue
        ws = ws * ssign[i]
        k = sk[i]
        p = vp[k]
        b = 1 + 3 * n + 3 * sl[i]
        ca = cos(v[b + 2])
        sa = sin(v[b + 2])
        dX = X[k] - v[1 + 3 * p]
        dY = Y[k] - v[2 + 3 * p]
        out[1 + 3 * p] -= ws * sa
        out[2 + 3 * p] += ws * ca
        out[3 + 3 * p] += ws * (dX * ca + dY * sa)
        out[b] += ws * sa
        out[b + 1] -= ws * ca
        out[b + 2] -= ws * ((Y[k] - v[b + 1]) * sa + (X[k] - v[b]) * ca)


def jt_vec(double[:] v, double[:] w, double e, long n, const cnp.int64_t[:] vp,
           const double[:] vx, const double[:] vy, const cnp.int64_t[:] sk, const cnp.int64_t[:] sl,
           const double[:] ssign):
    cdef Py_ssize_t K = vp.shape[0]
    cdef double[:] X = np.empty(K), Y = np.empty(K)
    cdef double[:] cth = np.empty(n), sth = np.empty(n)
    res = np.zeros(v.shape[0])
    _place(v, vp, vx, vy, X, Y, cth, sth, n)
    _jt_accumulate(v, w, n, vp, X, Y, sk, sl, ssign, res)
    return res


def al_value_grad(double[:] v, double[:] lam, double rho, double e, long n,
                  const cnp.int64_t[:] vp, const double[:] vx, const double[:] vy,
                  const cnp.int64_t[:] sk, const cnp.int64_t[:] sl, const double[:] ssign,
                  double[:] g_out):
    cdef Py_ssize_t K = vp.shape[0], S = sk.shape[0], m = 4 * K + S, i, k, b
    cdef double[:] X = np.empty(K), Y = np.empty(K)
    cdef double[:] cth = np.empty(n), sth = np.empty(n)
    cdef double[:] w = np.empty(m)
    cdef double gi, wi, acc = 0.0, ca, sa
    cdef long Q = (v.shape[0] - 1 - 3 * n) // 3
    cdef double[:] cal = np.empty(Q), sal = np.empty(Q)
    _place(v, vp, vx, vy, X, Y, cth, sth, n)
    for i in range(Q):
        b = 1 + 3 * n + 3 * i
        cal[i] = cos(v[b + 2])
        sal[i] = sin(v[b + 2])
    for k in range(K):
        g_out[4 * k] = -Y[k]
        g_out[4 * k + 1] = Y[k] - e
        g_out[4 * k + 2] = -X[k]
        g_out[4 * k + 3] = X[k] - v[0]
    for i in range(S):
        k = sk[i]
        b = 1 + 3 * n + 3 * sl[i]
        g_out[4 * K + i] = ssign[i] * ((Y[k] - v[b + 1]) * cal[sl[i]]
                                       - (X[k] - v[b]) * sal[sl[i]])
    for i in range(m):
        wi = lam[i] + rho * g_out[i]
        if wi < 0.0:
            wi = 0.0
        w[i] = wi
        acc += wi * wi - lam[i] * lam[i]
    grad = np.zeros(v.shape[0])
    cdef double[:] gr = grad
    _jt_accumulate(v, w, n, vp, X, Y, sk, sl, ssign, gr)
    gr[0] += 1.0
    return v[0] + acc / (2.0 * rho), grad
