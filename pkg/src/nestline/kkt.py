"""First-order optimality measures for ``min f(v) s.t. g(v) <= 0, lo <= v <= hi``."""

from __future__ import annotations

import numpy as np
from scipy.optimize import lsq_linear


def _projected(v, d, lo, hi):
    return v - np.clip(v - d, lo, hi)


def kkt_residual(problem, v, lam, g=None) -> float:
    """Stationarity/complementarity residual for given multipliers ``lam``.

    max of the projected Lagrangian gradient (inf-norm) and ``|lam_i g_i|``.
    """
    v = np.asarray(v, dtype=float)
    if g is None:
        g = problem.constraints(v)
    d = problem.objective_grad(v) + problem.jt_vec(v, lam)
    stat = float(np.max(np.abs(_projected(v, d, problem.lower, problem.upper))))
    comp = float(np.max(np.abs(lam * np.minimum(g, 0.0)), initial=0.0))
    return max(stat, comp)


def independent_kkt(problem, v, active_tol: float = 1e-5):
    """Best-case stationarity residual with nonnegative least-squares multipliers.

    Multipliers are fitted from scratch on the constraints with
    ``g >= -active_tol``, using the assembled sparse Jacobian rather than the
    solver's multiplier estimates.  Returns ``(residual, multipliers, active)``.
    """
    v = np.asarray(v, dtype=float)
    g = problem.constraints(v)
    active = np.flatnonzero(g >= -active_tol)
    grad_f = problem.objective_grad(v)
    if active.size == 0:
        lam = np.zeros(0)
        r = grad_f
    else:
        JA = problem.jacobian(v)[active]
        sol = lsq_linear(JA.T.tocsr(), -grad_f, bounds=(0.0, np.inf), lsmr_tol="auto",
                         tol=1e-12, max_iter=5000)
        lam = sol.x
        r = grad_f + JA.T @ lam
    res = float(np.max(np.abs(_projected(v, r, problem.lower, problem.upper))))
    return res, lam, active
