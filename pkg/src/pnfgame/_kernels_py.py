"""Pure-Python fallback for the compiled kernels in ``_kernels.pyx``.

Both modules expose the same functions with the same bracketing/bisection
steps, specialised to the ``log1p`` benefit ``beta * log(1 + X)``.  The
cardinality scan is vectorised with numpy here since it dominates the
runtime of best responses.
"""

import math

import numpy as np

from .errors import NoRootError, NumericError

_NO_BRACKET = -1
_NON_FINITE = -2


def marginal(z, s, rho, beta):
    """Marginal benefit of own production ``z`` given friends' aggregate ``s``."""
    if z <= 0.0:
        if s > 0.0:
            return math.inf
        return beta
    if s <= 0.0:
        return beta / (1.0 + z)
    w = 1.0 + s * math.pow(z, -rho)
    X = z * math.pow(w, 1.0 / rho)
    return beta / (1.0 + X) * math.pow(w, (1.0 - rho) / rho)


def content_value(z, s, rho, beta, c_eff):
    if s <= 0.0:
        X = z
    elif z <= 0.0:
        X = math.pow(s, 1.0 / rho)
    else:
        X = math.pow(math.pow(z, rho) + s, 1.0 / rho)
    return beta * math.log1p(X) - c_eff * z


def _raise(status, s, c_eff):
    if status == _NO_BRACKET:
        raise NoRootError(f"no bracket for production root (s={s}, c_eff={c_eff})")
    raise NumericError(f"non-finite marginal benefit (s={s}, c_eff={c_eff})")


def best_production(s, c_eff, rho, beta, abs_tol, max_doublings, max_iter):
    """Root of ``marginal(z, s) = c_eff``; ``inf`` if ``c_eff <= 0``, ``0`` at the corner."""
    if c_eff <= 0.0:
        return math.inf
    if s <= 0.0 and beta <= c_eff:
        return 0.0
    lo = 0.0
    hi = 1.0
    f = marginal(hi, s, rho, beta)
    k = 0
    while f > c_eff:
        lo = hi
        hi *= 2.0
        k += 1
        if k > max_doublings:
            _raise(_NO_BRACKET, s, c_eff)
        f = marginal(hi, s, rho, beta)
    if f != f:
        _raise(_NON_FINITE, s, c_eff)
    if f == c_eff:
        return hi
    for _ in range(max_iter):
        if hi - lo <= abs_tol:
            break
        mid = 0.5 * (lo + hi)
        f = marginal(mid, s, rho, beta)
        if f != f:
            _raise(_NON_FINITE, s, c_eff)
        if f > c_eff:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _marginal_vec(z, s, rho, beta):
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        w = 1.0 + s * np.power(z, -rho)
        X = z * np.power(w, 1.0 / rho)
        out = beta / (1.0 + X) * np.power(w, (1.0 - rho) / rho)
    out = np.where(z <= 0.0, np.where(s > 0.0, np.inf, beta), out)
    return out


def scan_links(base_s, pows, c, link_cost, rho, beta, abs_tol, max_doublings, max_iter):
    """Optimal production and utility for each prefix ``k = 0..m`` of ``pows``.

    ``pows`` holds the candidates' ``x_j ** rho`` in preference order; entry
    ``k`` of the result corresponds to subscribing to the first ``k``.
    Returns ``(z, u)`` arrays of length ``m + 1``.
    """
    pows = np.asarray(pows, dtype=float)
    s = np.empty(pows.shape[0] + 1)
    s[0] = base_s
    acc = base_s
    for k in range(pows.shape[0]):
        acc += pows[k]
        s[k + 1] = acc
    corner = (s <= 0.0) & (beta <= c)
    lo = np.zeros_like(s)
    hi = np.ones_like(s)
    f = _marginal_vec(hi, s, rho, beta)
    k = 0
    while True:
        grow = (f > c) & ~corner
        if not grow.any():
            break
        k += 1
        if k > max_doublings:
            _raise(_NO_BRACKET, float(s[grow][0]), c)
        lo = np.where(grow, hi, lo)
        hi = np.where(grow, hi * 2.0, hi)
        f = np.where(grow, _marginal_vec(hi, s, rho, beta), f)
    if np.any(np.isnan(f)):
        _raise(_NON_FINITE, base_s, c)
    exact = f == c
    for _ in range(max_iter):
        active = (hi - lo > abs_tol) & ~exact & ~corner
        if not active.any():
            break
        mid = 0.5 * (lo + hi)
        fm = _marginal_vec(mid, s, rho, beta)
        if np.any(np.isnan(fm[active])):
            _raise(_NON_FINITE, base_s, c)
        up = active & (fm > c)
        down = active & ~(fm > c)
        lo = np.where(up, mid, lo)
        hi = np.where(down, mid, hi)
    z = np.where(exact, hi, 0.5 * (lo + hi))
    z = np.where(corner, 0.0, z)
    with np.errstate(divide="ignore"):
        X = np.where(
            s <= 0.0,
            z,
            np.where(z <= 0.0, np.power(np.maximum(s, 0.0), 1.0 / rho),
                     np.power(np.power(z, rho) + s, 1.0 / rho)),
        )
    u = beta * np.log1p(X) - c * z - link_cost * np.arange(s.shape[0])
    return z, u


def production_sweep(x, gbar, order, c, rho, beta, damping, abs_tol, max_doublings, max_iter):
    """One Gauss-Seidel sweep of damped best production, updating ``x`` in place.

    Returns the largest absolute first-order residual ``|z_i - x_i|`` seen
    before each update.
    """
    xr = np.power(x, rho)
    resid = 0.0
    for i in order:
        s = float(np.dot(gbar[i], xr))
        z = best_production(s, c, rho, beta, abs_tol, max_doublings, max_iter)
        diff = z - x[i]
        if abs(diff) > resid:
            resid = abs(diff)
        x[i] = x[i] + damping * diff
        xr[i] = math.pow(x[i], rho)
    return resid
