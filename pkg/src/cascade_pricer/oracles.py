"""Exact optima on tiny graphs and the vertex-cover reduction fixtures."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
from typing import Iterable, Mapping, Sequence

import numpy as np

from .cascade import exact_expected_revenue
from .errors import BudgetError
from .graph import Graph, GraphError
from .models import BuyerModel, IndependentCascade, _frac, threshold_model
from .strategy import PricingStrategy

ADAPTIVE_NODE_BUDGET = 10
ASSIGNMENT_BUDGET = 3 ** 9


def _require_icm(model: BuyerModel) -> None:
    if not isinstance(model, IndependentCascade):
        raise NotImplementedError("oracles are only available for independent-cascade models")


def _grid(grid: Iterable) -> list[Fraction]:
    out = sorted({_frac(p) for p in grid})
    if not out:
        raise ValueError("price grid must be non-empty")
    if out[0] < 0 or out[-1] > 1:
        raise ValueError("grid prices must lie in [0, 1]")
    return out


def optimal_nonadaptive_bruteforce(g: Graph, seeds: Sequence[int], model: BuyerModel, grid,
                                   fixed: Mapping[int, float] | None = None,
                                   exact: bool = True):
    """Best committed price vector by enumeration.

    Nodes in ``fixed`` keep their given price; every other non-seed node ranges
    over ``grid``. Ties go to the lexicographically smallest price vector
    (node order, then ascending price). Returns ``(strategy, value)``.
    """
    _require_icm(model)
    prices_grid = _grid(grid)
    fixed = dict(fixed or {})
    seed_set = set(seeds)
    free = [v for v in range(g.n) if v not in seed_set and v not in fixed]
    if len(prices_grid) ** len(free) > ASSIGNMENT_BUDGET:
        raise BudgetError(f"{len(prices_grid)}^{len(free)} assignments exceed the budget of "
                          f"{ASSIGNMENT_BUDGET}")
    base = np.full(g.n, np.nan)
    for v, p in fixed.items():
        base[v] = float(p)
    best, best_value = None, None
    for combo in product(prices_grid, repeat=len(free)):
        prices = base.copy()
        prices[free] = [float(p) for p in combo]
        s = PricingStrategy(prices, provenance="searched")
        value = exact_expected_revenue(g, seeds, s, model, exact=exact)
        if best_value is None or value > best_value:
            best, best_value = s, value
    return best, best_value


def optimal_adaptive_value(g: Graph, seeds: Sequence[int], model: BuyerModel, grid,
                           exact: bool = True):
    """Optimal expected revenue of a seller who sees the cascade so far.

    The seller picks a price for each offered node at every step, knowing
    which nodes are active. Under independent cascades a rejection leaves no
    trace beyond the active set, so (active, newly active) is a sufficient
    state.
    """
    _require_icm(model)
    n = g.n
    if n > ADAPTIVE_NODE_BUDGET:
        raise BudgetError(f"adaptive oracle limited to {ADAPTIVE_NODE_BUDGET} nodes, got {n}")
    seed_set = sorted(set(seeds))
    if not seed_set or seed_set[0] < 0 or seed_set[-1] >= n:
        raise ValueError("invalid seed set")
    num = _frac if exact else float
    options = [(num(p), model.node_parameter(num(p))) for p in _grid(grid)]
    if not exact:
        options = [(float(p), float(x)) for p, x in options]
    zero, one = num(0), num(1)
    nbr = [sum(1 << w for w in g.adjacency[v]) for v in range(n)]

    @lru_cache(maxsize=None)
    def value(active: int, frontier: int):
        counts: dict[int, int] = {}
        f = frontier
        while f:
            u = (f & -f).bit_length() - 1
            f &= f - 1
            cand = nbr[u] & ~active
            while cand:
                v = (cand & -cand).bit_length() - 1
                cand &= cand - 1
                counts[v] = counts.get(v, 0) + 1
        if not counts:
            return zero
        offered = sorted(counts)
        # per offered node: (buy probability, price) for each grid choice
        choices = [[(one - (one - x) ** counts[v], p) for p, x in options] for v in offered]
        best = None
        for pick in product(*choices):
            total = zero
            for bits in range(1 << len(offered)):
                prob, gained, bought = one, zero, 0
                for j, (pb, price) in enumerate(pick):
                    if bits >> j & 1:
                        prob *= pb
                        gained += price
                        bought |= 1 << offered[j]
                    else:
                        prob *= one - pb
                    if not prob:
                        break
                if prob:
                    total += prob * (gained + (value(active | bought, bought) if bought else zero))
            if best is None or total > best:
                best = total
        return best

    start = sum(1 << v for v in seed_set)
    return value(start, start)


def adaptivity_gap(g: Graph, seeds: Sequence[int], model: BuyerModel, grid, exact: bool = True):
    """(adaptive optimum, non-adaptive optimum, ratio)."""
    adaptive = optimal_adaptive_value(g, seeds, model, grid, exact=exact)
    _, nonadaptive = optimal_nonadaptive_bruteforce(g, seeds, model, grid, exact=exact)
    return adaptive, nonadaptive, adaptive / nonadaptive


@dataclass(frozen=True)
class HardnessInstance:
    graph: Graph
    source: Graph
    d: int
    k: int
    layer: tuple[str, ...]  # "s", "V1", "V2" or "V3" per node
    v1: tuple[int, ...]  # v1[i] is source vertex i
    v2: tuple[int, ...]  # v2[j] is source edge edges[j]
    edges: tuple[tuple[int, int], ...]
    model: IndependentCascade

    @property
    def s(self) -> int:
        return 0

    @property
    def p(self) -> Fraction:
        return Fraction(1, 4 * self.d)

    @property
    def v3(self) -> tuple[int, ...]:
        return tuple(v for v, lab in enumerate(self.layer) if lab == "V3")

    def layer_sidecar(self) -> str:
        return "".join(f"{v} {lab}\n" for v, lab in enumerate(self.layer))

    def strategy(self, free_set: Iterable[int]) -> PricingStrategy:
        """V2 free, V3 full price, source vertices in ``free_set`` free, other V1 full price."""
        free_set = set(free_set)
        prices = np.ones(self.graph.n)
        prices[self.s] = np.nan
        prices[list(self.v2)] = 0.0
        for i in free_set:
            prices[self.v1[i]] = 0.0
        return PricingStrategy(prices, provenance="searched")


def build_hardness_instance(source: Graph, d: int | None = None, k: int | None = None) -> HardnessInstance:
    """Layered graph s - V1 - V2 - V3 built from a bounded-degree source graph.

    Node 0 is s, then one V1 node per source vertex, one V2 node per source
    edge (sorted), then ``k`` pendant V3 nodes per V2 node, grouped by V2 node.
    ``k`` defaults to 20d; smaller values keep general-purpose oracles in budget.
    """
    max_deg = int(max(source.degrees(), default=0))
    if d is None:
        d = max(max_deg, 1)
    if d < 1:
        raise GraphError("degree bound d must be >= 1")
    if max_deg > d:
        raise GraphError(f"source has a vertex of degree {max_deg} > d = {d}")
    k = 20 * d if k is None else k
    if k < 0:
        raise GraphError("k must be non-negative")
    edges = tuple(sorted(source.edges))
    n1, n2 = source.n, len(edges)
    v1 = tuple(range(1, 1 + n1))
    v2 = tuple(range(1 + n1, 1 + n1 + n2))
    out = [(0, v) for v in v1]
    layer = ["s"] + ["V1"] * n1 + ["V2"] * n2
    nxt = 1 + n1 + n2
    for j, (a, b) in enumerate(edges):
        out += [(v1[a], v2[j]), (v1[b], v2[j])]
        for _ in range(k):
            out.append((v2[j], nxt))
            layer.append("V3")
            nxt += 1
    g = Graph.from_edges(nxt, out)
    return HardnessInstance(g, source, d, k, tuple(layer), v1, v2, edges,
                            threshold_model(Fraction(1, 4 * d)))


def is_vertex_cover(source: Graph, cover: Iterable[int]) -> bool:
    cover = set(cover)
    return all(a in cover or b in cover for a, b in source.edges)


def minimum_vertex_cover_size(source: Graph) -> int:
    for size in range(source.n + 1):
        if any(is_vertex_cover(source, c) for c in combinations(range(source.n), size)):
            return size
    return source.n


def hardness_expected_revenue(inst: HardnessInstance, free_set: Iterable[int]) -> Fraction:
    """Expected revenue of the covering strategy with free source vertices ``free_set``.

    Every V2 node activates surely, so each full-price V1 node ``u`` sees one
    offer from s and one from each of its deg(u) V2 neighbours; each V3 node
    sees exactly one offer. For a d-regular source this is
    (|V1| - |C|)(1 - (1-p)^(d+1)) + p|V3|.
    """
    free_set = set(free_set)
    if not free_set <= set(range(inst.source.n)):
        raise ValueError("free set must consist of source vertices")
    if not is_vertex_cover(inst.source, free_set):
        raise ValueError("free set does not cover every source edge")
    p = inst.p
    total = p * len(inst.v3)
    for u in range(inst.source.n):
        if u not in free_set:
            total += 1 - (1 - p) ** (inst.source.degree(u) + 1)
    return total


def regular_formula(inst: HardnessInstance, cover_size: int) -> Fraction:
    """The closed form for d-regular sources."""
    p = inst.p
    return (inst.source.n - cover_size) * (1 - (1 - p) ** (inst.d + 1)) + p * len(inst.v3)


@dataclass(frozen=True)
class HardnessReport:
    d: int
    k: int
    p: Fraction
    bound_value: Fraction  # 2 + 2kdp^2
    exploit_value: Fraction  # kp
    optimal_free_set: tuple[int, ...] | None = None
    optimal_value: Fraction | None = None
    min_cover_size: int | None = None
    formula_value: Fraction | None = None

    @property
    def identities_hold(self) -> bool:
        return self.bound_value == Fraction(9, 2) and self.exploit_value == 5

    @property
    def optimum_is_min_cover(self) -> bool | None:
        if self.optimal_free_set is None:
            return None
        return len(self.optimal_free_set) == self.min_cover_size

    @property
    def formula_matches(self) -> bool | None:
        if self.optimal_value is None:
            return None
        return abs(self.optimal_value - self.formula_value) <= 1e-9


def optimal_free_set(inst: HardnessInstance, exact: bool = True):
    """Brute force over which V1 nodes are free, with V2 free and V3 at full price."""
    fixed = {v: 0.0 for v in inst.v2}
    fixed.update({v: 1.0 for v in inst.v3})
    s, value = optimal_nonadaptive_bruteforce(inst.graph, [inst.s], inst.model, [0, 1],
                                              fixed=fixed, exact=exact)
    free = tuple(i for i, v in enumerate(inst.v1) if s.prices[v] == 0.0)
    return free, value


def verify_hardness_structure(inst: HardnessInstance, max_source_nodes: int = 4) -> HardnessReport:
    d, k, p = inst.d, inst.k, inst.p
    report = dict(d=d, k=k, p=p, bound_value=2 + 2 * k * d * p * p, exploit_value=k * p)
    if inst.source.n <= max_source_nodes:
        free, value = optimal_free_set(inst)
        report.update(optimal_free_set=free, optimal_value=value,
                      min_cover_size=minimum_vertex_cover_size(inst.source),
                      formula_value=hardness_expected_revenue(inst, free)
                      if is_vertex_cover(inst.source, free) else None)
    return HardnessReport(**report)
