"""Best responses, strict-equilibrium verification and symmetric gamma regions.

A user's payoff depends on the outbound set only through the number of
links and the friends' aggregate ``sum x_j**rho``, and it increases in the
aggregate at a fixed number of links.  So, without content prices, the best
set of ``k`` new subscriptions is the ``k`` largest producers among users
who do not already subscribe to ``i``, and an exact best response scans
``k = 0..m`` with production re-optimised for each ``k``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from ._backend import kernels
from .errors import ConvergenceError, PNFError
from .model import GameConfig, PricingScheme, StrategyProfile, friend_closure
from .numerics import (
    DEFAULT_SETTINGS,
    SolverSettings,
    best_production,
    content_value,
    delta_r,
    max_production,
    symmetric_production,
)

EPS = 1e-9
X_TOL = 1e-8
LEVEL_TOL = 1e-8
MIN_DAMPING = 1.0 / 64
# Largest number of per-level count vectors enumerated by the priced best response.
MAX_PRICED_CANDIDATES = 2_000_000


class BestResponse(NamedTuple):
    x: float
    outbound: frozenset
    utility: float


@dataclass(frozen=True)
class DeviationWitness:
    user: int
    kind: str  # "production" or "link_set"
    new_x: float
    new_outbound: frozenset
    utility_gain: float
    reason: str

    def to_dict(self) -> dict:
        return {
            "user": self.user,
            "kind": self.kind,
            "reason": self.reason,
            "new_x": self.new_x,
            "new_outbound": sorted(self.new_outbound),
            "utility_gain": self.utility_gain,
        }


@dataclass(frozen=True)
class Classification:
    kind: str  # "symmetric" or "asymmetric"
    n_h: int
    x_hi: float
    n_levels: int
    x_lo: Optional[float] = None
    k_hi: Optional[int] = None
    k_lo: Optional[int] = None
    degree: Optional[int] = None
    degrees_match: Optional[bool] = None

    @property
    def two_type(self) -> bool:
        return self.kind == "asymmetric" and self.n_levels == 2


@dataclass
class EquilibriumReport:
    verdict: str  # "strict_equilibrium" or "not_equilibrium"
    witnesses: list
    classification: str  # "symmetric", "asymmetric" or "none" (not an equilibrium)
    profile_class: Classification
    audit: Optional[list] = None

    @property
    def is_equilibrium(self) -> bool:
        return self.verdict == "strict_equilibrium"

    @property
    def n_h(self) -> int:
        return self.profile_class.n_h

    @property
    def x_hi(self) -> float:
        return self.profile_class.x_hi

    @property
    def x_lo(self):
        return self.profile_class.x_lo

    @property
    def k_hi(self):
        return self.profile_class.k_hi

    @property
    def k_lo(self):
        return self.profile_class.k_lo

    def failed_checks(self) -> list:
        return [c for c in (self.audit or []) if c.required and c.passed is False]

    def to_dict(self) -> dict:
        pc = self.profile_class
        return {
            "verdict": self.verdict,
            "classification": self.classification,
            "profile_class": pc.kind,
            "n_levels": pc.n_levels,
            "n_h": pc.n_h,
            "x_hi": pc.x_hi,
            "x_lo": pc.x_lo,
            "k_hi": pc.k_hi,
            "k_lo": pc.k_lo,
            "degree": pc.degree,
            "degrees_match": pc.degrees_match,
            "witnesses": [w.to_dict() for w in self.witnesses],
            "audit": None if self.audit is None else [c.to_dict() for c in self.audit],
        }


@dataclass(frozen=True)
class GammaInterval:
    d: int
    gamma_lo: float
    gamma_hi: float
    x_s: float
    X_s: float

    @property
    def width(self) -> float:
        return self.gamma_hi - self.gamma_lo

    def contains(self, gamma: float) -> bool:
        return self.gamma_lo < gamma < self.gamma_hi


class GammaTable(NamedTuple):
    intervals: list
    mean_width: float


# ---------------------------------------------------------------------------
# production


def production_fixed_point(
    g,
    config: GameConfig,
    damping: float = 0.5,
    tol: float = 1e-10,
    max_sweeps: int = 10_000,
    x0=None,
    settings: SolverSettings = DEFAULT_SETTINGS,
) -> np.ndarray:
    """Productions solving every user's first-order condition for fixed links.

    Damped Gauss-Seidel starting from autarky (or ``x0``).  The damping is
    halved whenever a sweep reverses the previous one.  Raises
    ConvergenceError with the last residual if ``max_sweeps`` is exhausted.
    """
    gbar = np.ascontiguousarray(friend_closure(g).gbar, dtype=np.uint8)
    n = gbar.shape[0]
    if x0 is None:
        x = np.full(n, max_production(config, settings))
    else:
        x = np.array(x0, dtype=float)
    order = np.arange(n, dtype=np.int64)
    prev_step = None
    resid = math.inf
    for _ in range(max_sweeps):
        before = x.copy()
        resid = kernels.production_sweep(
            x, gbar, order, config.c, config.rho, config.benefit.scale, damping,
            settings.abs_tol, settings.max_bracket_doublings, settings.max_bisection_iters,
        )
        if resid <= tol:
            return x
        step = x - before
        # Oscillation: this sweep largely undoes the previous one.
        if prev_step is not None:
            if step @ prev_step < -0.5 * np.linalg.norm(step) * np.linalg.norm(prev_step):
                damping = max(damping * 0.5, MIN_DAMPING)
        prev_step = step
    raise ConvergenceError(f"production fixed point did not converge in {max_sweeps} sweeps", resid)


# ---------------------------------------------------------------------------
# best responses


def _candidates(i: int, x: np.ndarray, g: np.ndarray):
    """Users ``i`` may profitably subscribe to, in preference order.

    Larger producers first; among equal producers current subscriptions
    first, then lower index.
    """
    inbound = g[:, i].astype(bool)
    eligible = ~inbound
    eligible[i] = False
    idx = np.flatnonzero(eligible)
    current = g[i, idx].astype(bool)
    order = np.lexsort((idx, ~current, -x[idx]))
    return idx[order], np.flatnonzero(inbound)


class _UserPayoff:
    """Payoff of one user as a function of (production, added friends, links)."""

    def __init__(self, i, profile, config, pricing, frozen_degree, settings):
        self.i = i
        self.config = config
        self.settings = settings
        self.p = pricing.p if pricing else 0.0
        self.t = pricing.t if pricing else 0.0
        self.frozen_degree = frozen_degree
        x, g = profile.x, profile.g
        rho = config.rho
        inbound = np.flatnonzero(g[:, i])
        self.inbound = inbound
        self.n_in = int(inbound.shape[0])
        self.base_s = float(np.sum(x[inbound] ** rho))
        self.base_acquired = float(np.sum(x[inbound]))
        self.link_cost = config.gamma + self.t

    def c_eff(self, n_friends: int) -> float:
        d = self.frozen_degree if self.frozen_degree is not None else n_friends
        return self.config.c - self.p * d

    def value(self, z, s, acquired, n_friends, n_out):
        """Payoff at production ``z`` given the full friend aggregate and counts."""
        ce = self.c_eff(n_friends)
        if math.isinf(z):
            base = math.inf
        else:
            base = content_value(z, s, ce, self.config)
        return base - self.p * acquired - self.link_cost * n_out + self.t * self.n_in

    def optimum(self, s, acquired, n_friends, n_out):
        z = best_production(s, self.c_eff(n_friends), self.config, self.settings)
        return z, self.value(z, s, acquired, n_friends, n_out)


def _friend_state(i, x, outbound, payoff: _UserPayoff, rho):
    """Friend aggregate, acquired total and friend count for a given outbound set."""
    friends = set(int(j) for j in payoff.inbound) | set(outbound)
    friends.discard(i)
    idx = np.fromiter(friends, dtype=np.int64, count=len(friends))
    s = float(np.sum(x[idx] ** rho)) if idx.size else 0.0
    acquired = float(np.sum(x[idx])) if idx.size else 0.0
    return s, acquired, len(friends)


def best_response(
    i: int,
    profile: StrategyProfile,
    config: GameConfig,
    pricing: Optional[PricingScheme] = None,
    settings: SolverSettings = DEFAULT_SETTINGS,
    frozen_income_degree: Optional[int] = None,
) -> BestResponse:
    """Exact best response of user ``i`` to everybody else's strategy.

    ``frozen_income_degree`` evaluates priced deviations with the production
    cost and income held at that friend count (the approximation behind the
    closed-form transfer bounds) instead of the deviating user's actual
    friend count.
    """
    if pricing is None and frozen_income_degree is None:
        return plain_best_response(i, profile.x, profile.g, config, settings)
    cand, _ = _candidates(i, profile.x, profile.g)
    return _priced_best_response(i, profile, config, pricing or PricingScheme(), cand, settings, frozen_income_degree)


def plain_best_response(i, x, g, config: GameConfig, settings: SolverSettings = DEFAULT_SETTINGS) -> BestResponse:
    """Unpriced best response from raw arrays (no profile validation)."""
    cand, inbound = _candidates(i, x, g)
    rho = config.rho
    base_s = float(np.sum(x[inbound] ** rho))
    z, u = kernels.scan_links(
        base_s, x[cand] ** rho, config.c, config.gamma, rho, config.benefit.scale,
        settings.abs_tol, settings.max_bracket_doublings, settings.max_bisection_iters,
    )
    k = int(np.argmax(u))
    return BestResponse(float(z[k]), frozenset(int(j) for j in cand[:k]), float(u[k]))


def _priced_best_response(i, profile, config, pricing, cand, settings, frozen_degree):
    x = profile.x
    rho = config.rho
    payoff = _UserPayoff(i, profile, config, pricing, frozen_degree, settings)
    # Re-subscribing to a user who already subscribes to i adds no content.
    mutual = list(payoff.inbound) if payoff.link_cost < 0 else []
    n_mut = len(mutual)

    # Group candidates by production level; within a level the order of
    # ``cand`` (current links first, then index) decides which members are taken.
    levels: list[list[int]] = []
    for j in cand:
        if levels and x[levels[-1][0]] == x[j]:
            levels[-1].append(int(j))
        else:
            levels.append([int(j)])
    sizes = [len(lv) for lv in levels]
    if pricing.p == 0.0:
        choices = [tuple(min(max(k - sum(sizes[:li]), 0), sizes[li]) for li in range(len(levels)))
                   for k in range(len(cand) + 1)]
    else:
        total = math.prod(sz + 1 for sz in sizes)
        if total > MAX_PRICED_CANDIDATES:
            raise PNFError(
                f"priced best response would enumerate {total} link sets; "
                "too many distinct production levels"
            )
        choices = itertools.product(*[range(sz + 1) for sz in sizes])

    best = None
    for counts in choices:
        k = sum(counts)
        s = payoff.base_s
        acquired = payoff.base_acquired
        for lv, m in zip(levels, counts):
            if m:
                xv = x[lv[0]]
                s += m * xv ** rho
                acquired += m * xv
        n_friends = payoff.n_in + k
        z, u = payoff.optimum(s, acquired, n_friends, k + n_mut)
        if best is None or u > best[0]:
            best = (u, z, counts)
    u, z, counts = best
    chosen = set(mutual)
    for lv, m in zip(levels, counts):
        chosen.update(lv[:m])
    return BestResponse(float(z), frozenset(chosen), float(u))


def _current_payoff(i, profile, config, pricing, frozen_degree, settings):
    """(payoff now, payoff-maximising production for current links, its payoff)."""
    payoff = _UserPayoff(i, profile, config, pricing, frozen_degree, settings)
    out = profile.outbound(i)
    s, acquired, n_friends = _friend_state(i, profile.x, out, payoff, config.rho)
    n_out = len(out)
    xi = float(profile.x[i])
    now = payoff.value(xi, s, acquired, n_friends, n_out)
    z, best = payoff.optimum(s, acquired, n_friends, n_out)
    return now, z, best


# ---------------------------------------------------------------------------
# verification


def verify_strict_nash(
    profile: StrategyProfile,
    config: GameConfig,
    pricing: Optional[PricingScheme] = None,
    eps: float = EPS,
    x_tol: float = X_TOL,
    settings: SolverSettings = DEFAULT_SETTINGS,
    audit: bool = True,
    frozen_income_degree: Optional[int] = None,
) -> EquilibriumReport:
    """Check that every user's strategy is the unique best response.

    Production must equal the unique first-order root within ``x_tol`` and
    no alternative outbound set (with re-optimised production) may gain more
    than ``eps``.  Mutual links, zero production and production above the
    autarkic level are reported with their own witnesses.
    """
    x, g = profile.x, profile.g
    n = profile.n
    x_bar = max_production(config, settings)
    witnesses = []
    link_cost = config.gamma + (pricing.t if pricing else 0.0)
    for i in range(n):
        out = profile.outbound(i)
        xi = float(x[i])
        now, z_cur, u_cur_opt = _current_payoff(i, profile, config, pricing, frozen_income_degree, settings)
        production_flagged = False
        if link_cost > 0:
            for j in sorted(out & profile.inbound(i)):
                witnesses.append(DeviationWitness(i, "link_set", xi, out - {j}, float(link_cost), "mutual_link"))
        if xi <= 0.0:
            witnesses.append(DeviationWitness(i, "production", z_cur, out, float(u_cur_opt - now), "zero_production"))
            production_flagged = True
        elif pricing is None and frozen_income_degree is None and xi > x_bar + x_tol:
            witnesses.append(DeviationWitness(i, "production", z_cur, out, float(u_cur_opt - now), "above_autarky"))
            production_flagged = True

        br = best_response(i, profile, config, pricing, settings, frozen_income_degree)
        gain = br.utility - now
        if gain > eps:
            kind = "link_set" if br.outbound != out else "production"
            witnesses.append(DeviationWitness(i, kind, br.x, br.outbound, float(gain), "best_response"))
        if not production_flagged and not abs(xi - z_cur) <= x_tol:
            witnesses.append(DeviationWitness(i, "production", z_cur, out, float(u_cur_opt - now), "production_foc"))

    pc = classify_profile(profile, config)
    verdict = "not_equilibrium" if witnesses else "strict_equilibrium"
    report = EquilibriumReport(
        verdict=verdict,
        witnesses=witnesses,
        classification=pc.kind if verdict == "strict_equilibrium" else "none",
        profile_class=pc,
    )
    if audit and pc.kind == "asymmetric":
        from .audit import structural_audit

        report.audit = structural_audit(profile, config, pc)
    return report


# ---------------------------------------------------------------------------
# classification


def production_levels(x, tol: float = LEVEL_TOL) -> list:
    """Distinct production levels (descending) and the users at each."""
    x = np.asarray(x, dtype=float)
    order = np.argsort(-x, kind="stable")
    levels = []
    for j in order:
        if levels and levels[-1][0] - x[j] <= tol:
            levels[-1][1].append(int(j))
        else:
            levels.append((float(x[j]), [int(j)]))
    return levels


def classify_profile(profile: StrategyProfile, config: GameConfig, tol: float = LEVEL_TOL) -> Classification:
    levels = production_levels(profile.x, tol)
    degrees = profile.friends().degrees
    top_x, highs = levels[0]
    if len(levels) == 1:
        same = bool(np.all(degrees == degrees[0]))
        return Classification(
            kind="symmetric", n_h=profile.n, x_hi=top_x, n_levels=1,
            degree=int(degrees[0]) if same else None, degrees_match=same,
        )
    g = profile.g
    hi_mask = np.zeros(profile.n, dtype=bool)
    hi_mask[highs] = True
    fields = {}
    if len(levels) == 2:
        lows = levels[1][1]
        fields = dict(
            x_lo=levels[1][0],
            k_hi=int(max(g[i, hi_mask].sum() for i in highs)),
            k_lo=int(min(g[j, hi_mask].sum() for j in lows)),
        )
    return Classification(kind="asymmetric", n_h=len(highs), x_hi=top_x, n_levels=len(levels), **fields)


# ---------------------------------------------------------------------------
# symmetric equilibria


def gamma_region(d: int, config: GameConfig, settings: SolverSettings = DEFAULT_SETTINGS) -> GammaInterval:
    """Open interval of link costs for which the symmetric profile of degree ``d`` is an equilibrium."""
    x_s, X_s = symmetric_production(d, config, settings)
    n = config.n
    lo = delta_r(d, d, x_s, config.c, config, settings) if d <= n - 2 else 0.0
    hi = delta_r(d - 1, d, x_s, config.c, config, settings) if d >= 1 else math.inf
    return GammaInterval(d=d, gamma_lo=lo, gamma_hi=hi, x_s=x_s, X_s=X_s)


def gamma_region_table(config: GameConfig, settings: SolverSettings = DEFAULT_SETTINGS) -> GammaTable:
    intervals = [gamma_region(d, config, settings) for d in range(config.n)]
    inner = [iv.width for iv in intervals[1:-1]]
    mean = float(np.mean(inner)) if inner else math.nan
    return GammaTable(intervals, mean)


def symmetric_equilibrium_degrees(config: GameConfig, settings: SolverSettings = DEFAULT_SETTINGS) -> list:
    """Degrees whose symmetric profile is an equilibrium at ``config.gamma``."""
    return [iv.d for iv in gamma_region_table(config, settings).intervals if iv.contains(config.gamma)]


def equilibrium_gamma_range(
    profile: StrategyProfile,
    config: GameConfig,
    eps: float = EPS,
    x_tol: float = X_TOL,
    settings: SolverSettings = DEFAULT_SETTINGS,
):
    """Link costs at which ``profile`` is a strict equilibrium, as ``(lo, hi)``.

    Productions and link sets do not depend on ``gamma``, so the set is an
    interval: every alternative cardinality ``k`` bounds ``gamma`` from one
    side.  Returns None when no ``gamma`` works (production off its
    first-order root, a mutual link, or a better set of the same size).
    The bounds are exclusive up to ``eps`` per link.
    """
    x, g = profile.x, profile.g
    rho = config.rho
    gbar = profile.friends().gbar
    lo, hi = 0.0, math.inf
    for i in range(profile.n):
        if np.any(g[i] & g[:, i]):
            return None
        s = float(gbar[i] @ (x ** rho))
        z = best_production(s, config.c, config, settings)
        if not abs(x[i] - z) <= x_tol:
            return None
        now = content_value(x[i], s, config.c, config)
        out = int(g[i].sum())
        cand, inbound = _candidates(i, x, g)
        _, u = kernels.scan_links(
            float(np.sum(x[inbound] ** rho)), x[cand] ** rho, config.c, 0.0, rho,
            config.benefit.scale, settings.abs_tol, settings.max_bracket_doublings,
            settings.max_bisection_iters,
        )
        for k, uk in enumerate(u):
            if k > out:
                lo = max(lo, (uk - now - eps) / (k - out))
            elif k < out:
                hi = min(hi, (now - uk + eps) / (out - k))
            elif uk - now > eps:
                return None
    return (float(lo), float(hi)) if lo < hi else None
