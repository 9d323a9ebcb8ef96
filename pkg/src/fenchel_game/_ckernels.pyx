# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the geometric kernels in ``_kernels_py``."""

import numpy as np
from libc.math cimport fabs, pow, copysign


def box_lmo(const double[::1] d, const double[::1] lo, const double[::1] hi):
    cdef Py_ssize_t i, n = d.shape[0]
    out = np.empty(n)
    cdef double[::1] o = out
    for i in range(n):
        if d[i] < 0.0:
            o[i] = hi[i]
        else:
            o[i] = lo[i]
    return out


def lp_lmo(const double[::1] d, double p, double r):
    cdef Py_ssize_t i, n = d.shape[0]
    cdef double q = p / (p - 1.0)
    cdef double m = 0.0, s = 0.0, u
    for i in range(n):
        if fabs(d[i]) > m:
            m = fabs(d[i])
    out = np.empty(n)
    cdef double[::1] o = out
    for i in range(n):
        u = pow(fabs(d[i]) / m, q - 1.0)
        o[i] = u
        s += pow(u, p)
    s = r / pow(s, 1.0 / p)
    for i in range(n):
        if d[i] > 0.0:
            o[i] = -o[i] * s
        elif d[i] < 0.0:
            o[i] = o[i] * s
        else:
            o[i] = 0.0
    return out


def simplex_project(const double[::1] v):
    cdef Py_ssize_t i, n = v.shape[0]
    u = np.sort(np.asarray(v))[::-1].copy()
    cdef double[::1] us = u
    cdef double css = 0.0, theta = 0.0
    for i in range(n):
        css += us[i]
        if us[i] - (css - 1.0) / (i + 1) > 0.0:
            theta = (css - 1.0) / (i + 1)
    out = np.empty(n)
    cdef double[::1] o = out
    for i in range(n):
        o[i] = v[i] - theta if v[i] > theta else 0.0
    return out


cdef double _coord_solve(double a, double nu, double p) nogil:
    cdef double lo = 0.0, hi = a, mid = 0.0
    cdef int k
    for k in range(80):
        mid = 0.5 * (lo + hi)
        if mid + nu * p * pow(mid, p - 1.0) - a > 0.0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


cdef double _mass(const double[::1] a, double nu, double p) nogil:
    cdef Py_ssize_t i
    cdef double s = 0.0
    for i in range(a.shape[0]):
        s += pow(_coord_solve(a[i], nu, p), p)
    return s


def lp_ball_project(const double[::1] v, double p, double r):
    cdef Py_ssize_t i, n = v.shape[0]
    a_arr = np.abs(np.asarray(v))
    cdef double[::1] a = a_arr
    cdef double s = 0.0, target = pow(r, p)
    for i in range(n):
        s += pow(a[i], p)
    if s <= target:
        return np.array(v, dtype=np.float64)
    cdef double nu_lo = 0.0, nu_hi = 1.0, nu
    cdef int k
    while _mass(a, nu_hi, p) > target:
        nu_lo = nu_hi
        nu_hi *= 2.0
    for k in range(100):
        nu = 0.5 * (nu_lo + nu_hi)
        if _mass(a, nu, p) > target:
            nu_lo = nu
        else:
            nu_hi = nu
        if nu_hi - nu_lo <= 1e-16 * nu_hi:
            break
    out = np.empty(n)
    cdef double[::1] o = out
    s = 0.0
    for i in range(n):
        o[i] = _coord_solve(a[i], nu_hi, p)
        s += pow(o[i], p)
    s = r / pow(s, 1.0 / p)
    for i in range(n):
        if v[i] > 0.0:
            o[i] = o[i] * s
        elif v[i] < 0.0:
            o[i] = -o[i] * s
        else:
            o[i] = 0.0
    return out


def soft_threshold(const double[::1] v, t):
    cdef Py_ssize_t i, n = v.shape[0]
    tt = np.broadcast_to(np.asarray(t, dtype=np.float64), (n,)).copy()
    cdef double[::1] tv = tt
    out = np.empty(n)
    cdef double[::1] o = out
    cdef double m
    for i in range(n):
        m = fabs(v[i]) - tv[i]
        if m > 0.0:
            o[i] = copysign(m, v[i])
        else:
            o[i] = 0.0
    return out


def average_update(const double[::1] avg, double a_prev, const double[::1] x, double alpha):
    cdef Py_ssize_t i, n = avg.shape[0]
    cdef double a = a_prev + alpha
    out = np.empty(n)
    cdef double[::1] o = out
    for i in range(n):
        o[i] = (a_prev * avg[i] + alpha * x[i]) / a
    return out
