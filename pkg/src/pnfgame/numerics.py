"""Scalar root solving and the named scalar quantities of the model.

Every quantity here is the root of a strictly decreasing function of one
production level, found by doubling an upper bracket and bisecting.  No
derivatives of the benefit are needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

from ._backend import kernels
from .errors import ConfigError, NoRootError, NumericError
from .model import GameConfig


@dataclass(frozen=True)
class SolverSettings:
    abs_tol: float = 1e-10
    max_bracket_doublings: int = 200
    max_bisection_iters: int = 200

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ConfigError(f"abs_tol must be positive, got {self.abs_tol}")


DEFAULT_SETTINGS = SolverSettings()


class RootResult(NamedTuple):
    root: float
    lo: float
    hi: float
    iterations: int


def solve_decreasing_root(
    fn: Callable[[float], float],
    target: float,
    settings: SolverSettings = DEFAULT_SETTINGS,
    start: float = 1.0,
    full_output: bool = False,
):
    """Find ``x >= 0`` with ``fn(x) = target`` for a strictly decreasing ``fn``.

    ``fn(0)`` may be ``+inf``.  The upper end of the bracket is doubled from
    ``start`` until ``fn`` drops to the target, then the bracket is bisected
    until its width is at most ``settings.abs_tol``; the midpoint is returned.

    Raises NoRootError if ``fn(0) < target`` or no upper bracket is found,
    and NumericError on a NaN evaluation.
    """
    f0 = fn(0.0)
    if f0 != f0:
        raise NumericError("fn(0) is NaN")
    if f0 < target:
        raise NoRootError(f"fn(0) = {f0} is already below the target {target}")
    if f0 == target:
        return RootResult(0.0, 0.0, 0.0, 0) if full_output else 0.0
    lo, hi = 0.0, float(start)
    f = fn(hi)
    doublings = 0
    while f > target:
        lo = hi
        hi *= 2.0
        doublings += 1
        if doublings > settings.max_bracket_doublings:
            raise NoRootError(f"no bracket for target {target} within {settings.max_bracket_doublings} doublings")
        f = fn(hi)
    if f != f:
        raise NumericError(f"fn({hi}) is NaN")
    it = 0
    if f != target:
        while hi - lo > settings.abs_tol and it < settings.max_bisection_iters:
            mid = 0.5 * (lo + hi)
            fm = fn(mid)
            if fm != fm:
                raise NumericError(f"fn({mid}) is NaN")
            if fm > target:
                lo = mid
            else:
                hi = mid
            it += 1
        root = 0.5 * (lo + hi)
    else:
        root = lo = hi
    if full_output:
        return RootResult(root, lo, hi, it)
    return root


def max_production(config: GameConfig, settings: SolverSettings = DEFAULT_SETTINGS) -> float:
    """Autarkic production, the root of ``v'(x) = c``; bounds every equilibrium production."""
    benefit = config.benefit
    if not benefit.alpha > config.c:
        raise ConfigError(f"v'(0) = {benefit.alpha} <= c = {config.c}: the network is not socially valuable")
    return solve_decreasing_root(benefit.derivative, config.c, settings)


def best_production(
    s: float, c_eff: float, config: GameConfig, settings: SolverSettings = DEFAULT_SETTINGS
) -> float:
    """Optimal own production when friends contribute ``s = sum x_j**rho``.

    Solves ``e(z, (z**rho + s)**(1/rho)) = c_eff``.  Returns ``inf`` when
    ``c_eff <= 0`` (the payoff is then unbounded in production) and ``0``
    when ``s == 0`` and ``c_eff >= v'(0)``.
    """
    return kernels.best_production(
        float(s), float(c_eff), config.rho, config.benefit.scale,
        settings.abs_tol, settings.max_bracket_doublings, settings.max_bisection_iters,
    )


def content_value(z: float, s: float, c_eff: float, config: GameConfig) -> float:
    """``v((z**rho + s)**(1/rho)) - c_eff * z``."""
    if math.isinf(z):
        return math.inf
    return kernels.content_value(float(z), float(s), config.rho, config.benefit.scale, float(c_eff))


def _symmetric_multiplier(d: int, config: GameConfig) -> float:
    if config.appendix_exponent:
        return (1.0 + d) ** (1.0 - config.rho)
    return (1.0 + d) ** ((1.0 - config.rho) / config.rho)


def _check_degree(d: int, config: GameConfig, top: int):
    if int(d) != d or not 0 <= d <= top:
        raise ConfigError(f"degree {d} outside [0, {top}] for n = {config.n}")


def symmetric_production(
    d: int, config: GameConfig, settings: SolverSettings = DEFAULT_SETTINGS
) -> tuple[float, float]:
    """Common production ``x_s`` (and perceived content ``X_s``) when every user has degree ``d``."""
    _check_degree(d, config, config.n - 1)
    scale = (1.0 + d) ** (1.0 / config.rho)
    mult = _symmetric_multiplier(d, config)
    dv = config.benefit.derivative
    x = solve_decreasing_root(lambda x: mult * dv(scale * x), config.c, settings)
    return x, scale * x


def delta_r(
    d_i: int, d: int, x: float, c_eff: float, config: GameConfig,
    settings: SolverSettings = DEFAULT_SETTINGS,
) -> float:
    """Content-utility gain of going from ``d_i`` to ``d_i + 1`` friends who each produce ``x``.

    Own production is re-optimised at marginal cost ``c_eff`` on both sides.
    ``d`` (the others' degree) does not enter the value; it is kept so call
    sites read like the threshold definitions.
    """
    if d_i < 0:
        raise ConfigError(f"d_i must be nonnegative, got {d_i}")
    xr = x ** config.rho if x > 0 else 0.0
    s0 = d_i * xr
    s1 = (d_i + 1) * xr
    z0 = best_production(s0, c_eff, config, settings)
    z1 = best_production(s1, c_eff, config, settings)
    return content_value(z1, s1, c_eff, config) - content_value(z0, s0, c_eff, config)


def planner_production(
    d: int, config: GameConfig, settings: SolverSettings = DEFAULT_SETTINGS
) -> float:
    """Welfare-maximising common production for degree ``d``: ``A v'(A x) = c`` with ``A = (1+d)**(1/rho)``."""
    _check_degree(d, config, config.n - 1)
    scale = (1.0 + d) ** (1.0 / config.rho)
    dv = config.benefit.derivative
    return solve_decreasing_root(lambda x: scale * dv(scale * x), config.c, settings)


def planner_content_utility(d: int, config: GameConfig, settings: SolverSettings = DEFAULT_SETTINGS) -> float:
    x = planner_production(d, config, settings)
    scale = (1.0 + d) ** (1.0 / config.rho)
    return config.benefit.value(scale * x) - config.c * x


def delta_q(d: int, config: GameConfig, settings: SolverSettings = DEFAULT_SETTINGS) -> float:
    """Increase of the planner's per-user content utility from degree ``d`` to ``d + 1``."""
    _check_degree(d, config, config.n - 2)
    return planner_content_utility(d + 1, config, settings) - planner_content_utility(d, config, settings)
