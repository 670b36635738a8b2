"""Game primitives: configuration, strategy profiles and payoff functions.

A user ``i`` picks a production level ``x_i >= 0`` and a set of outbound
subscriptions (row ``i`` of ``g``).  Content flows both ways across a
friendship, where the friend graph is the symmetric closure of ``g``.  The
perceived amount of content is the CES aggregate

    X_i = (x_i**rho + sum_{j friend of i} x_j**rho) ** (1 / rho)

and the payoff is ``v(X_i) - c * x_i - gamma * (number of outbound links)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigError, InvalidProfileError

BENEFIT_KINDS = ("log1p",)


@dataclass(frozen=True)
class BenefitSpec:
    """Benefit of consumed content, ``v(y) = scale * log(1 + y)``.

    ``v`` is increasing, strictly concave, ``v(0) = 0`` and ``v'(0) = scale``
    is finite, so ``alpha`` below is the marginal value of the first unit.
    """

    kind: str = "log1p"
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in BENEFIT_KINDS:
            raise ConfigError(f"unknown benefit kind {self.kind!r}; known: {BENEFIT_KINDS}")
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise ConfigError(f"benefit scale must be a positive finite number, got {self.scale}")

    def value(self, y: float) -> float:
        return self.scale * math.log1p(y)

    def derivative(self, y: float) -> float:
        return self.scale / (1.0 + y)

    def second_derivative(self, y: float) -> float:
        return -self.scale / (1.0 + y) ** 2

    @property
    def alpha(self) -> float:
        return self.derivative(0.0)

    @classmethod
    def parse(cls, text: str) -> "BenefitSpec":
        """Parse ``"log1p"`` or ``"log1p:2.5"``."""
        kind, _, scale = text.partition(":")
        try:
            return cls(kind=kind.strip(), scale=float(scale) if scale else 1.0)
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"cannot parse benefit spec {text!r}") from exc

    def to_dict(self) -> dict:
        return {"kind": self.kind, "scale": self.scale}


@dataclass(frozen=True)
class GameConfig:
    n: int
    c: float
    gamma: float
    rho: float
    benefit: BenefitSpec = field(default_factory=BenefitSpec)
    # Use the (1+d)**(1-rho) multiplier in the symmetric first-order condition
    # instead of the (1+d)**((1-rho)/rho) one implied by the marginal benefit.
    appendix_exponent: bool = False

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 3:
            raise ConfigError(f"population n must be an integer >= 3, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        if not (0.0 < self.rho < 1.0):
            raise ConfigError(f"rho must lie in (0, 1), got {self.rho}")
        if not (self.c > 0 and math.isfinite(self.c)):
            raise ConfigError(f"production cost c must be positive, got {self.c}")
        if not (self.gamma >= 0 and math.isfinite(self.gamma)):
            raise ConfigError(f"link cost gamma must be nonnegative, got {self.gamma}")
        if not self.benefit.alpha > self.c:
            raise ConfigError(
                f"v'(0) = {self.benefit.alpha} must exceed c = {self.c}; "
                "otherwise nobody produces and the network is not socially valuable"
            )

    def replace(self, **changes) -> "GameConfig":
        params = dict(
            n=self.n, c=self.c, gamma=self.gamma, rho=self.rho,
            benefit=self.benefit, appendix_exponent=self.appendix_exponent,
        )
        params.update(changes)
        return GameConfig(**params)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "rho": self.rho,
            "c": self.c,
            "gamma": self.gamma,
            "benefit": self.benefit.to_dict(),
            "appendix_exponent": self.appendix_exponent,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GameConfig":
        try:
            benefit = data.get("benefit", {"kind": "log1p", "scale": 1.0})
            if isinstance(benefit, str):
                benefit = BenefitSpec.parse(benefit)
            else:
                benefit = BenefitSpec(kind=benefit.get("kind", "log1p"), scale=float(benefit.get("scale", 1.0)))
            return cls(
                n=data["n"],
                c=float(data["c"]),
                gamma=float(data["gamma"]),
                rho=float(data["rho"]),
                benefit=benefit,
                appendix_exponent=bool(data.get("appendix_exponent", False)),
            )
        except KeyError as exc:
            raise ConfigError(f"config is missing field {exc.args[0]!r}") from exc
        except (TypeError, AttributeError) as exc:
            raise ConfigError(f"malformed config: {exc}") from exc


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def _check_adjacency(g, name: str = "g") -> np.ndarray:
    a = np.asarray(g)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidProfileError(f"{name} must be a square matrix, got shape {a.shape}")
    if not np.all((a == 0) | (a == 1)):
        raise InvalidProfileError(f"{name} must be binary")
    a = a.astype(np.uint8)
    if np.any(np.diag(a)):
        raise InvalidProfileError(f"{name} must have a zero diagonal (no self-subscription)")
    return a


@dataclass(frozen=True, eq=False)
class StrategyProfile:
    """Production vector ``x`` and directed subscription matrix ``g``.

    ``g[i, j] == 1`` means that ``i`` subscribes to (and pays for a link to) ``j``.
    Both arrays are stored as read-only copies.
    """

    x: np.ndarray
    g: np.ndarray

    def __post_init__(self):
        g = _check_adjacency(self.g).copy()
        x = np.array(self.x, dtype=float).reshape(-1)
        if x.shape[0] != g.shape[0]:
            raise InvalidProfileError(f"x has {x.shape[0]} entries but g is {g.shape[0]}x{g.shape[0]}")
        if np.any(~np.isfinite(x)) or np.any(x < 0):
            raise InvalidProfileError("productions must be finite and nonnegative")
        object.__setattr__(self, "x", _readonly(x))
        object.__setattr__(self, "g", _readonly(g))

    @property
    def n(self) -> int:
        return self.x.shape[0]

    def friends(self) -> "FriendGraph":
        return friend_closure(self.g)

    def outbound(self, i: int) -> frozenset:
        return frozenset(int(j) for j in np.flatnonzero(self.g[i]))

    def inbound(self, i: int) -> frozenset:
        return frozenset(int(j) for j in np.flatnonzero(self.g[:, i]))

    def with_strategy(self, i: int, x_i: float, outbound) -> "StrategyProfile":
        x = self.x.copy()
        g = self.g.copy()
        x[i] = x_i
        g[i, :] = 0
        for j in outbound:
            g[i, j] = 1
        return StrategyProfile(x, g)

    def to_dict(self) -> dict:
        return {"x": [float(v) for v in self.x], "g": self.g.astype(int).tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "StrategyProfile":
        try:
            return cls(np.asarray(data["x"], dtype=float), np.asarray(data["g"]))
        except KeyError as exc:
            raise InvalidProfileError(f"profile is missing field {exc.args[0]!r}") from exc

    def __eq__(self, other):
        if not isinstance(other, StrategyProfile):
            return NotImplemented
        return np.array_equal(self.x, other.x) and np.array_equal(self.g, other.g)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class FriendGraph:
    gbar: np.ndarray

    @property
    def degrees(self) -> np.ndarray:
        return self.gbar.sum(axis=1).astype(int)

    def neighbors(self, i: int) -> np.ndarray:
        return np.flatnonzero(self.gbar[i])

    def __eq__(self, other):
        if not isinstance(other, FriendGraph):
            return NotImplemented
        return np.array_equal(self.gbar, other.gbar)

    __hash__ = None


@dataclass(frozen=True)
class PricingScheme:
    """Flat prices paid to the subscribed user.

    ``p`` is charged per unit of a friend's content, ``t`` per subscription.
    Either may be negative (a subsidy).
    """

    p: float = 0.0
    t: float = 0.0


@dataclass(frozen=True)
class SymmetricProfile:
    x: float
    d: int

    def realizable(self, n: int) -> bool:
        return 0 <= self.d <= n - 1 and (n * self.d) % 2 == 0


def friend_closure(g) -> FriendGraph:
    a = _check_adjacency(g)
    gbar = np.maximum(a, a.T)
    return FriendGraph(_readonly(gbar))


def _gbar(graph) -> np.ndarray:
    return graph.gbar if isinstance(graph, FriendGraph) else np.asarray(graph)


def _check_rho(rho: float):
    if not (0.0 < rho < 1.0):
        raise ConfigError(f"rho must lie in (0, 1), got {rho}")


def aggregate(own: float, friends_pow_sum: float, rho: float) -> float:
    """CES aggregate ``(own**rho + friends_pow_sum) ** (1/rho)``."""
    if friends_pow_sum <= 0.0:
        return own
    return (own ** rho + friends_pow_sum) ** (1.0 / rho)


def friends_pow_sum(x, gbar, i: int, rho: float) -> float:
    row = _gbar(gbar)[i]
    xs = np.asarray(x, dtype=float)[row.astype(bool)]
    return float(np.sum(xs ** rho))


def perceived_content(x, gbar, i: int, rho: float) -> float:
    _check_rho(rho)
    x = np.asarray(x, dtype=float)
    return aggregate(float(x[i]), friends_pow_sum(x, gbar, i, rho), rho)


def marginal_benefit(x_i: float, X_i: float, benefit: BenefitSpec, rho: float) -> float:
    """Marginal benefit of own production, ``v'(X) * (X / x) ** (1 - rho)``.

    Returns ``inf`` when ``x_i == 0`` while friends supply content.
    """
    _check_rho(rho)
    if x_i <= 0.0:
        return math.inf if X_i > 0.0 else benefit.alpha
    return benefit.derivative(X_i) * (X_i / x_i) ** (1.0 - rho)


def content_utility(profile: StrategyProfile, i: int, config: GameConfig) -> float:
    X = perceived_content(profile.x, profile.friends(), i, config.rho)
    return config.benefit.value(X) - config.c * float(profile.x[i])


def utility(profile: StrategyProfile, i: int, config: GameConfig) -> float:
    return content_utility(profile, i, config) - config.gamma * int(profile.g[i].sum())


def priced_utility(
    profile: StrategyProfile, i: int, config: GameConfig, pricing: Optional[PricingScheme]
) -> float:
    """Utility when friends' content is bought at ``p`` and subscriptions cost ``t`` extra.

    The subscriber pays ``gamma + t`` per outbound link and ``p * x_j`` per
    friend ``j``; user ``i`` receives ``t`` per inbound subscription and
    ``p * x_i`` per friend.
    """
    if pricing is None:
        return utility(profile, i, config)
    gbar = profile.friends().gbar
    friends = gbar[i].astype(bool)
    d_i = int(friends.sum())
    acquired = float(profile.x[friends].sum())
    n_out = int(profile.g[i].sum())
    n_in = int(profile.g[:, i].sum())
    return (
        content_utility(profile, i, config)
        - pricing.p * acquired
        + pricing.p * float(profile.x[i]) * d_i
        - (config.gamma + pricing.t) * n_out
        + pricing.t * n_in
    )


def social_welfare(profile: StrategyProfile, config: GameConfig) -> float:
    return float(sum(utility(profile, i, config) for i in range(profile.n)))


def symmetric_welfare(x: float, d: int, config: GameConfig) -> float:
    """Total welfare of a realized symmetric profile with no mutual links."""
    X = (1.0 + d) ** (1.0 / config.rho) * x
    return config.n * (config.benefit.value(X) - config.c * x - 0.5 * d * config.gamma)
