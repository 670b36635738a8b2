"""Directed subscription matrices for named topologies.

Orientation convention: the peripheral or lower-index endpoint sponsors a
link.  Spokes subscribe to the star's center (node ``n - 1``), node ``i``
subscribes to ``i + 1`` on a line, node ``i`` subscribes to ``i + k`` on a
circulant, and subscribers subscribe to influencers in a two-ring.
"""

from __future__ import annotations

import numpy as np

from .errors import TopologyError

ORIENTATION = "sponsor=peripheral/lower-index; star center=n-1; circulant i->i+k"

KINDS = ("empty", "complete", "star", "line", "ring", "regular", "two_ring", "random")


def _blank(n: int) -> np.ndarray:
    if n < 1:
        raise TopologyError(f"n must be positive, got {n}")
    return np.zeros((n, n), dtype=np.uint8)


def empty(n: int) -> np.ndarray:
    return _blank(n)


def complete(n: int) -> np.ndarray:
    g = _blank(n)
    g[np.triu_indices(n, k=1)] = 1
    return g


def star(n: int) -> np.ndarray:
    g = _blank(n)
    g[: n - 1, n - 1] = 1
    return g


def line(n: int) -> np.ndarray:
    g = _blank(n)
    for i in range(n - 1):
        g[i, i + 1] = 1
    return g


def ring(n: int, k: int = 1) -> np.ndarray:
    """Circulant where every node subscribes to its next ``k`` neighbours."""
    if not 1 <= k or 2 * k > n - 1:
        raise TopologyError(f"ring({k}) on {n} nodes needs 1 <= k and 2k <= n-1")
    g = _blank(n)
    for i in range(n):
        for off in range(1, k + 1):
            g[i, (i + off) % n] = 1
    return g


def regular(n: int, d: int) -> np.ndarray:
    """A ``d``-regular friend graph (circulant, plus antipodes for odd ``d``)."""
    if not 0 <= d <= n - 1:
        raise TopologyError(f"degree {d} outside [0, {n - 1}]")
    if (n * d) % 2:
        raise TopologyError(f"regular({d}) on {n} nodes violates handshake parity: n*d = {n * d} is odd")
    if d == 0:
        return _blank(n)
    if d == n - 1:
        return complete(n)
    half = d // 2
    g = ring(n, half) if half else _blank(n)
    if d % 2:
        for i in range(n // 2):
            g[i, i + n // 2] = 1
    return g


def two_ring(n: int, n_h: int, k_hi: int, k_lo: int) -> np.ndarray:
    """Influencers ``0..n_h-1`` on a ring(k_hi); each subscriber follows ``k_lo`` of them."""
    if n_h < 2:
        raise TopologyError(f"two_ring needs at least two influencers, got n_h={n_h}")
    if n_h >= n:
        raise TopologyError("two_ring needs at least one subscriber")
    if not 1 <= k_lo <= n_h:
        raise TopologyError(f"k_lo must lie in [1, n_h={n_h}], got {k_lo}")
    g = _blank(n)
    if k_hi:
        g[:n_h, :n_h] = ring(n_h, k_hi)
    for pos, j in enumerate(range(n_h, n)):
        for m in range(k_lo):
            g[j, (pos * k_lo + m) % n_h] = 1
    return g


def random(n: int, density: float, seed: int) -> np.ndarray:
    if not 0.0 <= density <= 1.0:
        raise TopologyError(f"density must lie in [0, 1], got {density}")
    rng = np.random.default_rng(seed)
    g = (rng.random((n, n)) < density).astype(np.uint8)
    np.fill_diagonal(g, 0)
    return g


def make_topology(kind: str, n: int, *args, **kwargs) -> np.ndarray:
    builders = {
        "empty": empty,
        "complete": complete,
        "star": star,
        "line": line,
        "ring": ring,
        "regular": regular,
        "two_ring": two_ring,
        "random": random,
    }
    try:
        build = builders[kind]
    except KeyError:
        raise TopologyError(f"unknown topology {kind!r}; known: {KINDS}") from None
    return build(n, *args, **kwargs)
