"""Single-node price edits scored with common random thresholds."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .cascade import RevenueEstimate, _trial_revenues, _validate, node_parameters
from .graph import Graph
from .models import BuyerModel
from .strategy import DEFAULT_GRID, PricingStrategy
from .tape import ThresholdTape


@dataclass(frozen=True)
class SearchConfig:
    grid: tuple[float, ...] = DEFAULT_GRID
    epsilon: float | None = None  # None: twice the standard error picked by epsilon_rule
    epsilon_rule: str = "paired"  # "paired" (stderr of candidate - incumbent) or "incumbent"
    trials: int = 50
    order: str = "degree"  # "degree" (descending, ties by id) or "index"
    max_passes: int = 20
    max_iterations: int | None = None
    rotate_tapes: bool = True

    def __post_init__(self):
        if not self.grid or any(not 0 <= p <= 1 for p in self.grid):
            raise ValueError("price grid must be a non-empty subset of [0, 1]")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.epsilon is not None and self.epsilon < 0:
            raise ValueError("epsilon must be non-negative")
        if self.epsilon_rule not in ("paired", "incumbent"):
            raise ValueError(f"unknown epsilon rule {self.epsilon_rule!r}")
        if self.order not in ("degree", "index"):
            raise ValueError(f"unknown visit order {self.order!r}")


class SearchState:
    """Incumbent strategy plus its estimate on a fixed window of tape trials."""

    def __init__(self, g: Graph, seeds: Sequence[int], strategy: PricingStrategy,
                 model: BuyerModel, tape: ThresholdTape, trials: int, first_trial: int = 0):
        self.graph = g
        self.seeds = _validate(g, seeds, strategy)
        self.seed_set = set(self.seeds.tolist())
        self.model = model
        self.tape = tape
        self.strategy = strategy
        self.params = node_parameters(strategy, model)
        self._param_cache: dict[float, float] = {}
        self.window = np.arange(first_trial, first_trial + trials, dtype=np.int64)
        self.incumbent = self._estimate(self._prices(strategy.prices), self.params)

    def _prices(self, prices: np.ndarray) -> np.ndarray:
        return np.where(np.isnan(prices), 0.0, prices)

    def _param(self, price: float) -> float:
        if price not in self._param_cache:
            self._param_cache[price] = float(self.model.node_parameter(price))
        return self._param_cache[price]

    def _estimate(self, prices: np.ndarray, params: np.ndarray) -> RevenueEstimate:
        indptr, indices = self.graph.csr
        values = _trial_revenues(indptr, indices, self.seeds, prices, params,
                                 self.model.kind == "ltm", float(self.strategy.cashback),
                                 self.tape.master_seed, self.window)
        return RevenueEstimate.from_values(values)

    def move_window(self, first_trial: int) -> None:
        self.window = self.window - self.window[0] + first_trial
        self.incumbent = self._estimate(self._prices(self.strategy.prices), self.params)

    def adopt(self, node: int, price: float, estimate: RevenueEstimate) -> None:
        self.strategy = self.strategy.with_price(node, price)
        self.params = self.params.copy()
        self.params[node] = self._param(price)
        self.incumbent = estimate


def evaluate_candidate(state: SearchState, node: int, price: float) -> RevenueEstimate:
    """Estimate of the incumbent with ``node`` repriced, on the incumbent's trials."""
    if node in state.seed_set:
        raise ValueError(f"node {node} is a seed and has no price to edit")
    if not 0 <= price <= 1:
        raise ValueError(f"price {price} outside [0, 1]")
    if float(state.strategy.prices[node]) == price:
        return state.incumbent
    prices = state._prices(state.strategy.prices)
    prices[node] = price
    params = state.params.copy()
    params[node] = state._param(float(price))
    return state._estimate(prices, params)


@dataclass(frozen=True)
class HistoryEntry:
    iteration: int
    node: int
    adopted: bool
    price: float
    estimate: float
    stderr: float
    before: float  # incumbent estimate before the visit, same trials
    epsilon: float  # adoption threshold used at this visit


@dataclass
class SearchResult:
    strategy: PricingStrategy
    initial: RevenueEstimate
    history: list[HistoryEntry] = field(default_factory=list)
    passes: int = 0

    def curve(self) -> list[float]:
        """Recorded estimate after each visit, with the starting estimate first."""
        return [self.initial.mean] + [h.estimate for h in self.history]

    def history_csv(self) -> str:
        lines = ["iteration,adopted_node,adopted_price,estimate,stderr",
                 f"0,,,{self.initial.mean!r},{self.initial.stderr!r}"]
        for h in self.history:
            node, price = (h.node, repr(h.price)) if h.adopted else ("", "")
            lines.append(f"{h.iteration},{node},{price},{h.estimate!r},{h.stderr!r}")
        return "\n".join(lines) + "\n"


def visit_order(g: Graph, seeds, order: str) -> list[int]:
    seeds = set(seeds)
    nodes = [v for v in range(g.n) if v not in seeds]
    if order == "degree":
        nodes.sort(key=lambda v: (-g.degree(v), v))
    return nodes


def local_search_improve(g: Graph, seeds: Sequence[int], s0: PricingStrategy,
                         model: BuyerModel, cfg: SearchConfig, tape: ThresholdTape) -> SearchResult:
    """Round-robin single-node repricing.

    A visit tries every grid price for one node on the incumbent's trial window
    and adopts the best one if it beats the incumbent by more than epsilon.
    Each pass moves to a fresh window of the tape; the search stops after a
    pass without adoptions, ``max_passes`` passes or ``max_iterations`` visits.
    """
    state = SearchState(g, seeds, s0, model, tape, cfg.trials)
    result = SearchResult(s0, state.incumbent)
    nodes = visit_order(g, state.seed_set, cfg.order)
    iteration = 0
    for pass_no in range(cfg.max_passes):
        if pass_no and cfg.rotate_tapes:
            state.move_window(pass_no * cfg.trials)
        adopted_any = False
        for v in nodes:
            if cfg.max_iterations is not None and iteration >= cfg.max_iterations:
                break
            iteration += 1
            incumbent = state.incumbent
            best_price, best = None, None
            for p in cfg.grid:
                p = float(p)
                if p == float(state.strategy.prices[v]):
                    continue
                est = evaluate_candidate(state, v, p)
                if best is None or est.mean > best.mean:
                    best_price, best = p, est
            adopted, eps = False, 0.0
            if best is not None:
                eps = cfg.epsilon if cfg.epsilon is not None else 2 * _noise(cfg, best, incumbent)
                if best.mean - incumbent.mean > eps:
                    state.adopt(v, best_price, best)
                    adopted = adopted_any = True
            result.history.append(HistoryEntry(
                iteration, v, adopted, float(state.strategy.prices[v]),
                state.incumbent.mean, state.incumbent.stderr, incumbent.mean, eps))
        result.passes = pass_no + 1
        if not adopted_any or (cfg.max_iterations is not None and iteration >= cfg.max_iterations):
            break
    result.strategy = replace(state.strategy, provenance="searched")
    return result


def _noise(cfg: SearchConfig, candidate: RevenueEstimate, incumbent: RevenueEstimate) -> float:
    if cfg.epsilon_rule == "incumbent":
        return incumbent.stderr
    diff = candidate.values - incumbent.values
    k = diff.shape[0]
    return float(np.std(diff, ddof=1) / math.sqrt(k)) if k > 1 else 0.0
