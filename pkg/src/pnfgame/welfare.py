"""Social optimum and the flat pricing scheme meant to sustain it.

The planner's problem splits in two: for each common degree ``d`` the best
common production is ``x#(d)``, and the per-user gain ``dq(d)`` of one more
friendship is decreasing, so the optimal degree is the number of ``d`` with
``dq(d) > gamma / 2`` (each friendship costs one link shared by two users).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .equilibrium import EquilibriumReport, verify_strict_nash
from .model import GameConfig, PricingScheme, StrategyProfile, social_welfare, symmetric_welfare
from .numerics import DEFAULT_SETTINGS, SolverSettings, delta_q, delta_r, planner_production
from .topology import regular

BOUNDARY_TOL = 1e-12


class Prices(NamedTuple):
    p_opt: float
    t_lo: float
    t_hi: float
    p_paper: float


@dataclass(frozen=True)
class SocialOptimum:
    d_opt: int
    x_opt: float
    welfare_per_user: float
    p_opt: float
    p_paper: float
    t_lo: float
    t_hi: float
    foc_residual: float
    boundary: bool = False

    @property
    def t_mid(self) -> float:
        if math.isinf(self.t_lo) or math.isinf(self.t_hi):
            return math.nan
        return 0.5 * (self.t_lo + self.t_hi)

    def to_dict(self) -> dict:
        return {
            "d_opt": self.d_opt,
            "x_opt": self.x_opt,
            "welfare_per_user": self.welfare_per_user,
            "p_opt": self.p_opt,
            "p_paper": self.p_paper,
            "t_lo": self.t_lo,
            "t_hi": self.t_hi,
            "t_mid": self.t_mid,
            "foc_residual": self.foc_residual,
            "boundary": self.boundary,
        }


def optimal_degree(config: GameConfig, settings: SolverSettings = DEFAULT_SETTINGS):
    """``(d#, boundary)``; ``boundary`` flags a tie ``dq(d) = gamma/2``."""
    half = config.gamma / 2.0
    dq = [delta_q(d, config, settings) for d in range(config.n - 1)]
    d_opt = sum(1 for v in dq if v > half)
    boundary = any(abs(v - half) <= BOUNDARY_TOL for v in dq)
    return d_opt, boundary


def optimal_prices(
    d_opt: int, x_opt: float, config: GameConfig, settings: SolverSettings = DEFAULT_SETTINGS
) -> Prices:
    """Content price making ``x#`` privately optimal, and the admissible link-transfer range.

    The price solves ``e(x#, X#) + p * d# = c``; the transfer bounds hold the
    effective marginal cost at ``c - p * d#`` while a user adds or drops one
    link.  ``t_lo`` is ``-inf`` at ``d# = n - 1`` and ``t_hi`` is ``+inf`` at
    ``d# = 0``.
    """
    c = config.c
    rho = config.rho
    if d_opt == 0:
        p = 0.0
    else:
        scale = (1.0 + d_opt) ** (1.0 / rho)
        e = config.benefit.derivative(scale * x_opt) * (1.0 + d_opt) ** ((1.0 - rho) / rho)
        p = (c - e) / d_opt
    c_eff = c - p * d_opt
    if d_opt >= config.n - 1:
        t_lo = -math.inf
    else:
        t_lo = delta_r(d_opt, d_opt, x_opt, c_eff, config, settings) - p * x_opt - config.gamma
    if d_opt == 0:
        t_hi = math.inf
    else:
        t_hi = delta_r(d_opt - 1, d_opt, x_opt, c_eff, config, settings) - p * x_opt - config.gamma
    p_paper = c * d_opt / (1.0 + d_opt)
    return Prices(p, t_lo, t_hi, p_paper)


def social_optimum(config: GameConfig, settings: SolverSettings = DEFAULT_SETTINGS) -> SocialOptimum:
    d_opt, boundary = optimal_degree(config, settings)
    x_opt = planner_production(d_opt, config, settings)
    scale = (1.0 + d_opt) ** (1.0 / config.rho)
    residual = abs(scale * config.benefit.derivative(scale * x_opt) - config.c)
    prices = optimal_prices(d_opt, x_opt, config, settings)
    return SocialOptimum(
        d_opt=d_opt,
        x_opt=x_opt,
        welfare_per_user=symmetric_welfare(x_opt, d_opt, config) / config.n,
        p_opt=prices.p_opt,
        p_paper=prices.p_paper,
        t_lo=prices.t_lo,
        t_hi=prices.t_hi,
        foc_residual=residual,
        boundary=boundary,
    )


def optimum_profile(config: GameConfig, optimum: SocialOptimum) -> StrategyProfile:
    """The optimum realised on a ``d#``-regular friend graph."""
    g = regular(config.n, optimum.d_opt)
    return StrategyProfile(np.full(config.n, optimum.x_opt), g)


def verify_priced_equilibrium(
    config: GameConfig,
    optimum: SocialOptimum,
    t: float,
    p: Optional[float] = None,
    frozen_income: bool = False,
    settings: SolverSettings = DEFAULT_SETTINGS,
) -> EquilibriumReport:
    """Check the realised optimum against every priced deviation.

    By default deviations are evaluated exactly: a user who adds a link also
    earns ``p * x`` from the new friend.  ``frozen_income=True`` instead holds
    production income at ``d#`` friends, the approximation under which the
    transfer bounds are derived.
    """
    profile = optimum_profile(config, optimum)
    pricing = PricingScheme(p=optimum.p_opt if p is None else p, t=t)
    return verify_strict_nash(
        profile, config, pricing, settings=settings,
        frozen_income_degree=optimum.d_opt if frozen_income else None,
    )


def welfare_gap(profile: StrategyProfile, config: GameConfig, settings: SolverSettings = DEFAULT_SETTINGS):
    """``(W(profile), W(optimum), W(optimum) - W(profile))``."""
    w = social_welfare(profile, config)
    w_opt = config.n * social_optimum(config, settings).welfare_per_user
    return w, w_opt, w_opt - w
