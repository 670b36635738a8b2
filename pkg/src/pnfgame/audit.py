"""Necessary structure of asymmetric equilibria, checked on a concrete profile.

Each check reports ``passed`` as True, False or None (not applicable) and,
on failure, the users that violate it.  Checks with ``required=False`` are
informational: finite populations may legitimately fail them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .model import GameConfig, StrategyProfile, content_utility, utility
from .numerics import max_production

TOL = 1e-8


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: Optional[bool]
    detail: str = ""
    witness: Optional[tuple] = None
    required: bool = True

    @property
    def status(self) -> str:
        return {True: "pass", False: "fail", None: "n/a"}[self.passed]

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "status": self.status,
            "required": self.required,
            "detail": self.detail,
            "witness": None if self.witness is None else list(self.witness),
        }


def _first(pairs):
    for p in pairs:
        return p
    return None


def structural_audit(profile: StrategyProfile, config: GameConfig, classification=None) -> list:
    """Run every structural check on an asymmetric profile."""
    from .equilibrium import classify_profile

    pc = classification or classify_profile(profile, config)
    x, g = profile.x, profile.g
    n = profile.n
    gbar = profile.friends().gbar
    rho = config.rho
    x_hi = pc.x_hi
    high = x >= x_hi - TOL
    H = np.flatnonzero(high)
    L = np.flatnonzero(~high)
    X_rho = x ** rho + gbar @ (x ** rho)
    out_deg = g.sum(axis=1)
    checks = []

    complete = bool(np.all(gbar + np.eye(n, dtype=gbar.dtype)))
    checks.append(CheckResult("prop3_1_not_complete", not complete, "friend graph is complete" if complete else ""))

    bad = _first((int(j),) for j in L if not g[j, H].any())
    checks.append(CheckResult(
        "prop3_2_low_subscribes_high", bad is None,
        "" if bad is None else f"low producer {bad[0]} subscribes to no high producer", bad))

    checks.append(CheckResult("prop3_3_two_high", len(H) >= 2, f"n_h = {len(H)}"))

    bad = _first((int(i), int(j)) for i in H for j in L if g[i, j])
    checks.append(CheckResult(
        "prop3_4_high_skips_low", bad is None,
        "" if bad is None else f"high producer {bad[0]} subscribes to low producer {bad[1]}", bad))

    bad = _first((int(i),) for i in H if all(gbar[i, k] for k in H if k != i))
    checks.append(CheckResult(
        "prop3_5_high_misses_high", bad is None,
        "" if bad is None else f"high producer {bad[0]} is a friend of every other high producer", bad))

    x_bar = max_production(config)
    ok = x_hi < x_bar - TOL
    checks.append(CheckResult("cor1_1_below_autarky", ok, f"x_hi = {x_hi:.12g}, x_bar = {x_bar:.12g}"))

    bound = x_hi ** rho
    bad = _first(
        (int(i), int(j)) for i in H for j in L if not abs(X_rho[i] - X_rho[j]) < bound
    )
    detail = ""
    if bad is not None:
        i, j = bad
        detail = f"|X_{i}^rho - X_{j}^rho| = {abs(X_rho[i] - X_rho[j]):.12g} >= x_hi^rho = {bound:.12g}"
    checks.append(CheckResult("cor1_2_balance", bad is None, detail, bad))

    def _typed(j):
        subs_h = g[j, H]
        return bool(subs_h.all()) or (bool(subs_h.any()) and not g[j, L].any())

    bad = _first((int(j),) for j in L if not _typed(j))
    checks.append(CheckResult(
        "prop4_types", bad is None,
        "" if bad is None else f"low producer {bad[0]} fits none of the admissible types", bad))

    if pc.two_type:
        u = np.array([utility(profile, i, config) for i in range(n)])
        i, j = int(H[np.argmin(u[H])]), int(L[np.argmax(u[L])])
        ok = bool(u[i] > u[j])
        checks.append(CheckResult(
            "cor3_1_influencer_utility", ok,
            f"min high utility {u[i]:.12g}, max low utility {u[j]:.12g}", None if ok else (i, j)))
        i, j = int(H[np.argmax(out_deg[H])]), int(L[np.argmin(out_deg[L])])
        ok = bool(out_deg[i] < out_deg[j])
        checks.append(CheckResult(
            "cor3_2_fewer_subscriptions", ok,
            f"max high out-degree {out_deg[i]}, min low out-degree {out_deg[j]}", None if ok else (i, j)))
    else:
        for name in ("cor3_1_influencer_utility", "cor3_2_fewer_subscriptions"):
            checks.append(CheckResult(name, None, "profile has more than two production levels"))

    two = pc.n_levels == 2 and not g[np.ix_(L, L)].any() and not g[np.ix_(H, L)].any()
    checks.append(CheckResult(
        "thm3_two_type", two, f"{pc.n_levels} production levels", required=False))
    return checks


def audit_passed(checks) -> bool:
    return all(c.passed is not False for c in checks if c.required)


__all__ = ["CheckResult", "structural_audit", "audit_passed", "content_utility"]
