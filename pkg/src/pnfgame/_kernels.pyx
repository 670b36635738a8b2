# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels for best production and best-response cardinality scans.

Mirrors ``_kernels_py`` function for function; see that module for the
contracts.  Specialised to the ``log1p`` benefit ``beta * log(1 + X)``.
"""

import numpy as np

from libc.math cimport pow, log1p, fabs, INFINITY

from .errors import NoRootError, NumericError

DEF NO_BRACKET = -1
DEF NON_FINITE = -2


cdef inline double _marginal(double z, double s, double rho, double beta) nogil:
    cdef double w, X
    if z <= 0.0:
        if s > 0.0:
            return INFINITY
        return beta
    if s <= 0.0:
        return beta / (1.0 + z)
    w = 1.0 + s * pow(z, -rho)
    X = z * pow(w, 1.0 / rho)
    return beta / (1.0 + X) * pow(w, (1.0 - rho) / rho)


cdef inline double _content_value(double z, double s, double rho, double beta, double c_eff) nogil:
    cdef double X
    if s <= 0.0:
        X = z
    elif z <= 0.0:
        X = pow(s, 1.0 / rho)
    else:
        X = pow(pow(z, rho) + s, 1.0 / rho)
    return beta * log1p(X) - c_eff * z


cdef int _best_production(double s, double c_eff, double rho, double beta, double abs_tol,
                          int max_doublings, int max_iter, double* out) nogil:
    cdef double lo, hi, mid, f
    cdef int k, it
    if c_eff <= 0.0:
        out[0] = INFINITY
        return 0
    if s <= 0.0 and beta <= c_eff:
        out[0] = 0.0
        return 0
    lo = 0.0
    hi = 1.0
    f = _marginal(hi, s, rho, beta)
    k = 0
    while f > c_eff:
        lo = hi
        hi *= 2.0
        k += 1
        if k > max_doublings:
            return NO_BRACKET
        f = _marginal(hi, s, rho, beta)
    if f != f:
        return NON_FINITE
    if f == c_eff:
        out[0] = hi
        return 0
    for it in range(max_iter):
        if hi - lo <= abs_tol:
            break
        mid = 0.5 * (lo + hi)
        f = _marginal(mid, s, rho, beta)
        if f != f:
            return NON_FINITE
        if f > c_eff:
            lo = mid
        else:
            hi = mid
    out[0] = 0.5 * (lo + hi)
    return 0


cdef _raise(int status, double s, double c_eff):
    if status == NO_BRACKET:
        raise NoRootError(f"no bracket for production root (s={s}, c_eff={c_eff})")
    raise NumericError(f"non-finite marginal benefit (s={s}, c_eff={c_eff})")


def marginal(double z, double s, double rho, double beta):
    return _marginal(z, s, rho, beta)


def content_value(double z, double s, double rho, double beta, double c_eff):
    return _content_value(z, s, rho, beta, c_eff)


def best_production(double s, double c_eff, double rho, double beta, double abs_tol,
                    int max_doublings, int max_iter):
    cdef double out = 0.0
    cdef int status = _best_production(s, c_eff, rho, beta, abs_tol, max_doublings, max_iter, &out)
    if status:
        _raise(status, s, c_eff)
    return out


def scan_links(double base_s, pows_in, double c, double link_cost, double rho, double beta,
               double abs_tol, int max_doublings, int max_iter):
    cdef double[::1] pows = np.ascontiguousarray(pows_in, dtype=np.float64)
    cdef Py_ssize_t m = pows.shape[0]
    z_arr = np.empty(m + 1)
    u_arr = np.empty(m + 1)
    cdef double[::1] z = z_arr
    cdef double[::1] u = u_arr
    cdef double s = base_s
    cdef double zk = 0.0
    cdef Py_ssize_t k
    cdef int status = 0
    with nogil:
        for k in range(m + 1):
            if k > 0:
                s += pows[k - 1]
            status = _best_production(s, c, rho, beta, abs_tol, max_doublings, max_iter, &zk)
            if status:
                break
            z[k] = zk
            u[k] = _content_value(zk, s, rho, beta, c) - link_cost * k
    if status:
        _raise(status, s, c)
    return z_arr, u_arr


def production_sweep(double[::1] x, const unsigned char[:, ::1] gbar, const long long[::1] order,
                     double c, double rho, double beta, double damping, double abs_tol,
                     int max_doublings, int max_iter):
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t a, i, j
    cdef double s, zi = 0.0, diff, resid = 0.0
    cdef int status = 0
    xr_arr = np.empty(n)
    cdef double[::1] xr = xr_arr
    for j in range(n):
        xr[j] = pow(x[j], rho)
    with nogil:
        for a in range(order.shape[0]):
            i = order[a]
            s = 0.0
            for j in range(n):
                if gbar[i, j]:
                    s += xr[j]
            status = _best_production(s, c, rho, beta, abs_tol, max_doublings, max_iter, &zi)
            if status:
                break
            diff = zi - x[i]
            if fabs(diff) > resid:
                resid = fabs(diff)
            x[i] = x[i] + damping * diff
            xr[i] = pow(x[i], rho)
    if status:
        _raise(status, s, c)
    return resid
