"""Monte-Carlo search for equilibria by asynchronous best-response dynamics.

Best-response dynamics are not known to converge in this game, so every run
is bounded and a run that cycles or stalls simply yields nothing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .equilibrium import (
    EPS,
    EquilibriumReport,
    plain_best_response,
    production_fixed_point,
    verify_strict_nash,
)
from .errors import ConvergenceError
from .model import GameConfig, StrategyProfile
from .numerics import DEFAULT_SETTINGS, SolverSettings, best_production, content_value, max_production

MOVE_TOL = 1e-10
POLISH_TOL = 1e-12


@dataclass
class SearchResult:
    seed: int
    profile: StrategyProfile
    report: EquilibriumReport
    sweeps: int


def initial_profile(config: GameConfig, seed: int, settings: SolverSettings = DEFAULT_SETTINGS):
    """Seeded random start: link density ~ U[0.1, 0.5], everybody at autarky."""
    rng = np.random.default_rng(seed)
    density = rng.uniform(0.1, 0.5)
    n = config.n
    g = (rng.random((n, n)) < density).astype(np.uint8)
    np.fill_diagonal(g, 0)
    x = np.full(n, max_production(config, settings))
    return x, g, rng


def _current(i, x, g, config, settings):
    """Utility of user i now, and the optimal production for the current links."""
    rho = config.rho
    friends = (g[i] | g[:, i]).astype(bool)
    friends[i] = False
    s = float(np.sum(x[friends] ** rho))
    now = content_value(x[i], s, config.c, config) - config.gamma * int(g[i].sum())
    return now, best_production(s, config.c, config, settings)


def best_response_dynamics(
    config: GameConfig,
    seed: int,
    max_sweeps: int = 200,
    settings: SolverSettings = DEFAULT_SETTINGS,
    eps: float = EPS,
):
    """Run the seeded dynamics; returns ``(x, g, sweeps)`` on convergence, else None.

    Users are visited in a fresh random order each sweep.  A user keeps the
    current links unless a different set gains more than ``eps``; production
    always moves to the optimum for the links held.
    """
    x, g, rng = initial_profile(config, seed, settings)
    n = config.n
    for sweep in range(1, max_sweeps + 1):
        changed = False
        moved = 0.0
        for i in rng.permutation(n):
            now, z = _current(i, x, g, config, settings)
            br = plain_best_response(i, x, g, config, settings)
            if br.utility - now > eps and br.outbound != frozenset(np.flatnonzero(g[i]).tolist()):
                g[i] = 0
                if br.outbound:
                    g[i, list(br.outbound)] = 1
                z = br.x
                changed = True
            moved = max(moved, abs(z - x[i]))
            x[i] = z
        if not changed and moved <= MOVE_TOL:
            return x, g, sweep
    return None


def search_equilibrium(
    config: GameConfig,
    seed: int,
    max_sweeps: int = 200,
    settings: SolverSettings = DEFAULT_SETTINGS,
) -> Optional[SearchResult]:
    """One seeded search; the profile is returned only if it verifies as a strict equilibrium."""
    run = best_response_dynamics(config, seed, max_sweeps, settings)
    if run is None:
        return None
    x, g, sweeps = run
    try:
        x = production_fixed_point(g, config, damping=1.0, tol=POLISH_TOL, x0=x, settings=settings)
    except ConvergenceError:
        return None
    profile = StrategyProfile(x, g)
    report = verify_strict_nash(profile, config, settings=settings)
    if not report.is_equilibrium:
        return None
    return SearchResult(seed, profile, report, sweeps)


SCALING_FIELDS = ("n", "seed", "n_h", "fraction", "x_hi", "x_lo", "k_hi", "k_lo")


def scaling_row(n: int, seed: int, result: Optional[SearchResult]) -> dict:
    row = dict.fromkeys(SCALING_FIELDS)
    row["n"], row["seed"] = n, seed
    if result is None:
        return row
    rep = result.report
    row.update(n_h=rep.n_h, fraction=rep.n_h / n, x_hi=rep.x_hi, x_lo=rep.x_lo, k_hi=rep.k_hi, k_lo=rep.k_lo)
    return row


def influencer_scaling(
    config: GameConfig,
    n_list,
    seeds_per_n: int,
    seed_start: int = 0,
    max_sweeps: int = 200,
    settings: SolverSettings = DEFAULT_SETTINGS,
):
    """Search ``seeds_per_n`` seeds for each population size.

    Returns ``(rows, results, summary)``.  ``rows`` has one entry per seed
    (blank fields for seeds without a verified equilibrium); ``results``
    maps ``(n, seed)`` to the verified SearchResult; ``summary`` maps ``n``
    to the mean and minimum influencer fraction over asymmetric equilibria.
    """
    rows, results, summary = [], {}, {}
    for n in n_list:
        cfg = config.replace(n=int(n))
        fractions = []
        for seed in range(seed_start, seed_start + seeds_per_n):
            res = search_equilibrium(cfg, seed, max_sweeps, settings)
            rows.append(scaling_row(cfg.n, seed, res))
            if res is not None:
                results[(cfg.n, seed)] = res
                if res.report.classification == "asymmetric":
                    fractions.append(res.report.n_h / cfg.n)
        summary[cfg.n] = {
            "found": sum(1 for (m, _) in results if m == cfg.n),
            "asymmetric": len(fractions),
            "mean_fraction": float(np.mean(fractions)) if fractions else math.nan,
            "min_fraction": float(np.min(fractions)) if fractions else math.nan,
        }
    return rows, results, summary
