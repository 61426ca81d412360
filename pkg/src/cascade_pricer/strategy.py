"""Non-adaptive pricing strategies."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .graph import Graph, GraphError, merge_seed_set
from .maxleaf import SpanningTree, approx_max_leaf_tree
from .models import BuyerModel

DEFAULT_GRID = tuple(round(i / 10, 1) for i in range(11))
DEFAULT_CASHBACK_FRACTION = 0.1


@dataclass(frozen=True, eq=False)
class PricingStrategy:
    """Committed price per node; seeds carry NaN (already active, never offered)."""

    prices: np.ndarray
    cashback: float = 0.0
    provenance: str = "uniform"
    tree: SpanningTree | None = field(default=None, repr=False)

    def __post_init__(self):
        prices = np.array(self.prices, dtype=np.float64)
        prices.setflags(write=False)
        object.__setattr__(self, "prices", prices)
        finite = prices[~np.isnan(prices)]
        if np.any((finite < 0) | (finite > 1)):
            raise ValueError("prices must lie in [0, 1]")
        if self.cashback < 0:
            raise ValueError("cashback must be non-negative")
        charged = finite[finite > 0]
        if self.cashback > 0 and charged.size and self.cashback >= charged.min():
            raise ValueError(
                f"cashback {self.cashback} must stay below the smallest charged price {charged.min()}")

    @property
    def n(self) -> int:
        return self.prices.shape[0]

    def __eq__(self, other):
        if not isinstance(other, PricingStrategy):
            return NotImplemented
        return (np.array_equal(self.prices, other.prices, equal_nan=True)
                and self.cashback == other.cashback and self.provenance == other.provenance)

    def with_price(self, node: int, price: float) -> "PricingStrategy":
        prices = self.prices.copy()
        prices[node] = price
        return replace(self, prices=prices, provenance="searched")

    def covers(self, seeds: Iterable[int]) -> bool:
        mask = np.ones(self.n, dtype=bool)
        mask[list(seeds)] = False
        return not np.any(np.isnan(self.prices[mask]))

    def dumps(self) -> str:
        lines = [f"# cashback {self.cashback!r}", f"# provenance {self.provenance}"]
        lines += [f"{v} {'seed' if math.isnan(p) else repr(float(p))}"
                  for v, p in enumerate(self.prices)]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "PricingStrategy":
        cashback, provenance, rows = 0.0, "uniform", {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            parts = raw.split()
            if not parts:
                continue
            if parts[0] == "#":
                if len(parts) >= 3 and parts[1] == "cashback":
                    cashback = float(parts[2])
                elif len(parts) >= 3 and parts[1] == "provenance":
                    provenance = parts[2]
                continue
            if len(parts) != 2:
                raise ValueError(f"strategy line {lineno}: expected 'node price'")
            rows[int(parts[0])] = math.nan if parts[1] == "seed" else float(parts[1])
        if sorted(rows) != list(range(len(rows))):
            raise ValueError("strategy file must list nodes 0..n-1")
        return cls(np.array([rows[v] for v in range(len(rows))]), cashback, provenance)


def uniform_pricing(g: Graph, price: float, seeds: Iterable[int] = ()) -> PricingStrategy:
    prices = np.full(g.n, float(price))
    prices[list(seeds)] = np.nan
    return PricingStrategy(prices, provenance="uniform")


def build_strategy_maxleaf(g: Graph, seeds: Sequence[int], model: BuyerModel,
                           rng_seed: int) -> PricingStrategy:
    """Interior of an approximate max-leaf tree rooted at the merged seeds is
    free; each leaf is free with probability (1+f)/2 and costs c otherwise."""
    merged, root, mapping = merge_seed_set(g, seeds)
    if not merged.is_connected():
        raise GraphError("graph must be connected once the seeds are merged")
    tree = approx_max_leaf_tree(merged, root)
    cx = model.complexity
    p_free = (1 + cx.f) / 2
    rng = np.random.default_rng(rng_seed)
    # one coin per merged node, in id order, so the draw does not depend on tree shape
    coins = rng.random(merged.n)
    merged_price = np.zeros(merged.n)
    for v in sorted(tree.leaves):
        merged_price[v] = 0.0 if coins[v] < p_free else float(cx.c)
    prices = merged_price[np.asarray(mapping)]
    prices[list(seeds)] = np.nan
    return PricingStrategy(prices, provenance="maxleaf", tree=tree)


def build_random_pricing(g: Graph, grid: Sequence[float], rng_seed: int,
                         seeds: Iterable[int] = ()) -> PricingStrategy:
    grid = [float(p) for p in grid]
    if not grid:
        raise ValueError("price grid must be non-empty")
    if any(not 0 <= p <= 1 for p in grid):
        raise ValueError("grid prices must lie in [0, 1]")
    rng = np.random.default_rng(rng_seed)
    prices = np.asarray(grid)[rng.integers(len(grid), size=g.n)]
    prices[list(seeds)] = np.nan
    return PricingStrategy(prices, provenance="random")


def set_cashback(s: PricingStrategy, z: float, r0: float) -> PricingStrategy:
    """Cashback ``r = z * r0`` paid to one recommender per sale; needs ``0 <= z < 1``."""
    if not 0 <= z < 1:
        raise ValueError(f"cashback fraction z must lie in [0, 1), got {z}")
    if r0 < 0:
        raise ValueError("per-node revenue estimate r0 must be non-negative")
    return replace(s, cashback=z * r0)


def per_node_revenue(total_revenue: float, n: int, n_seeds: int) -> float:
    """``r0``: estimated revenue (without cashback) per non-seed node."""
    return total_revenue / max(n - n_seeds, 1)
