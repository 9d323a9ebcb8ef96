"""Pure numpy implementations of the hot geometric kernels.

These are the fallback used when the compiled ``_ckernels`` extension is not
available. Both backends expose the same functions with the same semantics.
"""

import numpy as np

__all__ = [
    "box_lmo",
    "lp_lmo",
    "simplex_project",
    "lp_ball_project",
    "soft_threshold",
    "average_update",
]


def box_lmo(d, lo, hi):
    """Vertex of the box minimizing <x, d>; zero coordinates go to ``lo``."""
    return np.where(d > 0.0, lo, np.where(d < 0.0, hi, lo))


def lp_lmo(d, p, r):
    """Minimizer of <x, d> over the l_p ball of radius r (d must be nonzero)."""
    q = p / (p - 1.0)
    a = np.abs(d)
    m = a.max()
    # rescale before the power to keep things finite for large q
    u = (a / m) ** (q - 1.0)
    nrm = np.sum(u ** p) ** (1.0 / p)
    return -np.sign(d) * (r / nrm) * u


def simplex_project(v):
    """Euclidean projection onto the probability simplex (sort based)."""
    n = v.shape[0]
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    ind = np.arange(1, n + 1)
    cond = u - css / ind > 0
    rho = ind[cond][-1]
    theta = css[rho - 1] / rho
    return np.maximum(v - theta, 0.0)


def _coord_solve(a, nu, p, iters=80):
    # solve u + nu * p * u^(p-1) = a for u in [0, a], vectorized bisection
    lo = np.zeros_like(a)
    hi = a.copy()
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        h = mid + nu * p * mid ** (p - 1.0) - a
        pos = h > 0.0
        hi = np.where(pos, mid, hi)
        lo = np.where(pos, lo, mid)
    return 0.5 * (lo + hi)


def lp_ball_project(v, p, r):
    """Euclidean projection onto {x : ||x||_p <= r} by nested bisection."""
    a = np.abs(v)
    if np.sum(a ** p) <= r ** p:
        return v.copy()
    target = r ** p
    nu_lo, nu_hi = 0.0, 1.0
    while np.sum(_coord_solve(a, nu_hi, p) ** p) > target:
        nu_lo = nu_hi
        nu_hi *= 2.0
    for _ in range(100):
        nu = 0.5 * (nu_lo + nu_hi)
        if np.sum(_coord_solve(a, nu, p) ** p) > target:
            nu_lo = nu
        else:
            nu_hi = nu
        if nu_hi - nu_lo <= 1e-16 * nu_hi:
            break
    u = _coord_solve(a, nu_hi, p)
    # land exactly on the sphere
    u *= r / np.sum(u ** p) ** (1.0 / p)
    return np.sign(v) * u


def soft_threshold(v, t):
    """Coordinatewise sign(v) * max(|v| - t, 0)."""
    return np.sign(v) * np.maximum(np.abs(v) - t, 0.0)


def average_update(avg, a_prev, x, alpha):
    """Return (a_prev * avg + alpha * x) / (a_prev + alpha)."""
    return (a_prev * avg + alpha * x) / (a_prev + alpha)
