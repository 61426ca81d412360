"""Repeated strategy-vs-strategy runs with optional local search, as plotted
revenue-per-iteration curves."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .cascade import estimate_revenue
from .graph import Graph
from .local_search import HistoryEntry, SearchConfig, local_search_improve
from .models import BuyerModel
from .strategy import (DEFAULT_GRID, build_random_pricing, build_strategy_maxleaf,
                       per_node_revenue, set_cashback)
from .tape import ThresholdTape

STRATEGIES = ("maxleaf", "random")


@dataclass(frozen=True)
class ExperimentConfig:
    strategies: tuple[str, ...] = STRATEGIES
    repeats: int = 10
    trials: int = 50
    iterations: int = 0
    seed_nodes: int = 1
    grid: tuple[float, ...] = DEFAULT_GRID
    cashback_z: float = 0.0
    epsilon: float | None = None
    epsilon_rule: str = "paired"
    seed: int = 0

    def __post_init__(self):
        unknown = set(self.strategies) - set(STRATEGIES)
        if unknown:
            raise ValueError(f"unknown strategies {sorted(unknown)}; choose from {STRATEGIES}")
        if self.repeats < 1 or self.trials < 1 or self.iterations < 0 or self.seed_nodes < 1:
            raise ValueError("repeats, trials and seed_nodes must be >= 1, iterations >= 0")


@dataclass(frozen=True)
class RepeatPlan:
    seeds: tuple[int, ...]
    strategy_seed: int
    tape_seed: int


def plan_repeats(g: Graph, cfg: ExperimentConfig) -> list[RepeatPlan]:
    """Seed nodes, strategy coin seed and tape seed for every repeat, all from ``cfg.seed``."""
    if cfg.seed_nodes > g.n:
        raise ValueError(f"cannot pick {cfg.seed_nodes} seed nodes from {g.n}")
    plans = []
    for r in range(cfg.repeats):
        ss = np.random.SeedSequence([cfg.seed, r])
        rng = np.random.default_rng(ss)
        seeds = tuple(sorted(int(v) for v in rng.choice(g.n, size=cfg.seed_nodes, replace=False)))
        a, b = (int(x) & (2**63 - 1) for x in ss.generate_state(2, dtype=np.uint64))
        plans.append(RepeatPlan(seeds, a, b))
    return plans


@dataclass
class StrategyCurves:
    means: np.ndarray  # repeats x (iterations + 1)
    stderrs: np.ndarray
    adoptions: list[HistoryEntry] = field(default_factory=list)

    def averaged(self) -> tuple[np.ndarray, np.ndarray]:
        """Mean over repeats and the Monte Carlo standard error of that mean."""
        r = self.means.shape[0]
        return self.means.mean(axis=0), np.sqrt((self.stderrs ** 2).sum(axis=0)) / r


def _pad(values: list[float], length: int) -> list[float]:
    return values[:length] + [values[-1]] * max(0, length - len(values))


def run_experiment(g: Graph, model: BuyerModel, cfg: ExperimentConfig) -> dict[str, StrategyCurves]:
    out = {}
    length = cfg.iterations + 1
    search = SearchConfig(grid=cfg.grid, epsilon=cfg.epsilon, epsilon_rule=cfg.epsilon_rule,
                          trials=cfg.trials, max_iterations=cfg.iterations)
    plans = plan_repeats(g, cfg)
    for name in cfg.strategies:
        means, errs, adoptions = [], [], []
        for plan in plans:
            tape = ThresholdTape(plan.tape_seed)
            if name == "maxleaf":
                s = build_strategy_maxleaf(g, plan.seeds, model, plan.strategy_seed)
            else:
                s = build_random_pricing(g, cfg.grid, plan.strategy_seed, seeds=plan.seeds)
            if cfg.cashback_z:
                base = estimate_revenue(g, plan.seeds, s, model, tape, cfg.trials)
                s = set_cashback(s, cfg.cashback_z, per_node_revenue(base.mean, g.n, len(plan.seeds)))
            if cfg.iterations:
                res = local_search_improve(g, plan.seeds, s, model, search, tape)
                means.append(_pad(res.curve(), length))
                errs.append(_pad([res.initial.stderr] + [h.stderr for h in res.history], length))
                adoptions += [h for h in res.history if h.adopted]
            else:
                est = estimate_revenue(g, plan.seeds, s, model, tape, cfg.trials)
                means.append([est.mean])
                errs.append([est.stderr])
        out[name] = StrategyCurves(np.array(means), np.array(errs), adoptions)
    return out


def curves_csv(curves: dict[str, StrategyCurves]) -> str:
    lines = ["strategy,iteration,mean_revenue,stderr"]
    for name, c in curves.items():
        mean, err = c.averaged()
        lines += [f"{name},{i},{m!r},{e!r}" for i, (m, e) in enumerate(zip(mean.tolist(), err.tolist()))]
    return "\n".join(lines) + "\n"


def parse_grid(text: str) -> tuple[float, ...]:
    try:
        grid = tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise ValueError(f"bad price grid {text!r}: expected comma-separated numbers") from None
    if not grid:
        raise ValueError("price grid must be non-empty")
    return grid


def worst_adoption_drop(curves: StrategyCurves) -> Sequence[tuple[float, float]]:
    """(estimate - previous estimate, allowed drop) per adoption."""
    return [(h.estimate - h.before, h.epsilon + 6 * h.stderr) for h in curves.adoptions]
