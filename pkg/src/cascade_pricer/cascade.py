"""The recommendation cascade: traced single runs, a compiled Monte Carlo
estimator sharing the same threshold tapes, and an exact enumeration oracle
for independent-cascade models on small graphs."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numba
import numpy as np
from numba import njit, prange

from .errors import BudgetError
from .graph import Graph
from .models import BuyerModel, IndependentCascade, _frac
from .strategy import PricingStrategy
from .tape import CASHBACK_STREAM, THRESHOLD_STREAM, ThresholdTape, tape_value

EXACT_NODE_BUDGET = 12


@dataclass
class Step:
    t: int
    offers: list[tuple[int, float, tuple[int, ...]]] = field(default_factory=list)
    purchases: list[tuple[int, float]] = field(default_factory=list)
    cashbacks: list[tuple[int, int]] = field(default_factory=list)  # (buyer, recipient)


@dataclass
class CascadeTrace:
    steps: list[Step]
    total_revenue: float
    active: frozenset[int]

    @property
    def last_step(self) -> int:
        return self.steps[-1].t

    def buyers(self) -> list[int]:
        return [v for s in self.steps for v, _ in s.purchases]

    def offered(self) -> set[int]:
        return {v for s in self.steps for v, _, _ in s.offers}

    def dumps(self) -> str:
        lines = []
        for s in self.steps:
            for v, price, _ in s.offers:
                lines.append(f"t={s.t} offer v={v} price={price:g}")
            recipient = dict(s.cashbacks)
            for v, price in s.purchases:
                to = recipient.get(v)
                lines.append(f"t={s.t} buy v={v} pays={price:g} cashback_to={'-' if to is None else to}")
        return "\n".join(lines) + "\n"


def _validate(g: Graph, seeds: Sequence[int], s: PricingStrategy) -> np.ndarray:
    seeds = np.asarray(sorted(set(seeds)), dtype=np.int64)
    if seeds.size == 0:
        raise ValueError("seed set must be non-empty")
    if seeds[0] < 0 or seeds[-1] >= g.n:
        raise ValueError("seed id out of range")
    if s.n != g.n:
        raise ValueError(f"strategy covers {s.n} nodes, graph has {g.n}")
    if not s.covers(seeds):
        missing = [v for v in range(g.n) if v not in set(seeds.tolist()) and math.isnan(s.prices[v])]
        raise ValueError(f"strategy has no price for non-seed nodes {missing[:10]}")
    return seeds


def node_parameters(s: PricingStrategy, model: BuyerModel) -> np.ndarray:
    """Per-node acceptance probability (ICM) or ``B(price)`` (LTM); seeds get 0."""
    out = np.zeros(s.n)
    cache: dict[float, float] = {}
    for v, p in enumerate(s.prices):
        if math.isnan(p):
            continue
        p = float(p)
        if p not in cache:
            cache[p] = float(model.node_parameter(p))
        out[v] = cache[p]
    return out


def simulate_once(g: Graph, seeds: Sequence[int], s: PricingStrategy, model: BuyerModel,
                  tape: ThresholdTape, trial: int) -> CascadeTrace:
    """One cascade with a full trace. Reference implementation of the rules the
    compiled estimator follows."""
    seeds = _validate(g, seeds, s).tolist()
    ltm = model.kind == "ltm"
    active = set(seeds)
    received = [0] * g.n  # ICM: tests consumed; LTM: recommending neighbours
    frontier = sorted(seeds)
    steps = []
    revenue = 0.0
    t = 0
    while True:
        t += 1
        step = Step(t)
        recommenders: dict[int, list[int]] = {}
        for u in frontier:
            for v in g.adjacency[u]:
                if v not in active:
                    recommenders.setdefault(v, []).append(u)
        buyers = []
        for v in sorted(recommenders):
            price = float(s.prices[v])
            recs = recommenders[v]
            step.offers.append((v, price, tuple(recs)))
            param = float(model.node_parameter(price))
            if ltm:
                received[v] += len(recs)
                theta = 1.0 - tape.value(trial, v, 0, THRESHOLD_STREAM)
                buys = price == 0.0 or theta <= received[v] / g.degree(v) * param
            else:
                buys = False
                for _ in recs:
                    if price == 0.0:
                        buys = True
                    else:
                        u_val = tape.value(trial, v, received[v], THRESHOLD_STREAM)
                        received[v] += 1
                        buys = u_val < param
                    if buys:
                        break
            if buys:
                buyers.append(v)
                revenue += price - s.cashback
                step.purchases.append((v, price))
                if s.cashback > 0:
                    pick = int(tape.value(trial, v, 0, CASHBACK_STREAM) * len(recs))
                    step.cashbacks.append((v, recs[pick]))
        steps.append(step)
        if not buyers:
            break
        active.update(buyers)
        frontier = buyers
    return CascadeTrace(steps, revenue, frozenset(active))


@njit(cache=True)
def _cascade_revenue(indptr, indices, seeds, prices, param, ltm, cashback, master, trial):
    n = prices.shape[0]
    active = np.zeros(n, np.bool_)
    received = np.zeros(n, np.int64)
    stamp = np.zeros(n, np.int64)
    nrec = np.zeros(n, np.int64)
    decided = np.zeros(n, np.bool_)
    frontier = np.empty(n, np.int64)
    offered = np.empty(n, np.int64)
    nf = 0
    for s in seeds:
        active[s] = True
        frontier[nf] = s
        nf += 1
    revenue = 0.0
    t = 0
    while True:
        t += 1
        no = 0
        for i in range(nf):
            u = frontier[i]
            for k in range(indptr[u], indptr[u + 1]):
                v = indices[k]
                if active[v]:
                    continue
                if stamp[v] != t:
                    stamp[v] = t
                    nrec[v] = 0
                    decided[v] = False
                    offered[no] = v
                    no += 1
                nrec[v] += 1
                if ltm or decided[v]:
                    continue
                if prices[v] == 0.0:
                    decided[v] = True
                else:
                    x = tape_value(master, trial, v, received[v], 0)
                    received[v] += 1
                    if x < param[v]:
                        decided[v] = True
        nb = 0
        for j in range(no):
            v = offered[j]
            if ltm:
                received[v] += nrec[v]
                if prices[v] == 0.0:
                    decided[v] = True
                else:
                    theta = 1.0 - tape_value(master, trial, v, 0, 0)
                    alpha = received[v] / (indptr[v + 1] - indptr[v])
                    decided[v] = theta <= alpha * param[v]
            if decided[v]:
                revenue += prices[v] - cashback
                frontier[nb] = v
                nb += 1
        if nb == 0:
            break
        for j in range(nb):
            active[frontier[j]] = True
        frontier[:nb].sort()
        nf = nb
    return revenue


@njit(cache=True, parallel=True)
def _trial_revenues(indptr, indices, seeds, prices, param, ltm, cashback, master, trials):
    out = np.empty(trials.shape[0])
    for i in prange(trials.shape[0]):
        out[i] = _cascade_revenue(indptr, indices, seeds, prices, param, ltm,
                                  cashback, master, trials[i])
    return out


def set_threads(threads: int | None) -> int:
    """Cap worker threads for the estimator; results do not depend on it."""
    limit = numba.config.NUMBA_NUM_THREADS
    threads = limit if threads is None else max(1, min(int(threads), limit))
    numba.set_num_threads(threads)
    return threads


@dataclass(frozen=True, eq=False)
class RevenueEstimate:
    mean: float
    stderr: float
    trials: int
    values: np.ndarray = field(repr=False)

    @classmethod
    def from_values(cls, values: np.ndarray) -> "RevenueEstimate":
        k = values.shape[0]
        mean = float(np.mean(values))
        stderr = float(np.std(values, ddof=1) / math.sqrt(k)) if k > 1 else 0.0
        return cls(mean, stderr, k, values)

    def csv(self) -> str:
        return f"trials,mean,stderr\n{self.trials},{self.mean!r},{self.stderr!r}\n"


def trial_revenues(g: Graph, seeds: Sequence[int], s: PricingStrategy, model: BuyerModel,
                   tape: ThresholdTape, trials: Sequence[int] | np.ndarray) -> np.ndarray:
    seeds = _validate(g, seeds, s)
    indptr, indices = g.csr
    prices = np.where(np.isnan(s.prices), 0.0, s.prices)
    return _trial_revenues(indptr, indices, seeds, prices, node_parameters(s, model),
                           model.kind == "ltm", float(s.cashback), tape.master_seed,
                           np.asarray(trials, dtype=np.int64))


def estimate_revenue(g: Graph, seeds: Sequence[int], s: PricingStrategy, model: BuyerModel,
                     tape: ThresholdTape, trials: int, first_trial: int = 0) -> RevenueEstimate:
    """Mean and standard error of revenue over trials ``first_trial ..
    first_trial + trials - 1`` of ``tape``."""
    if trials < 1:
        raise ValueError("need at least one trial")
    values = trial_revenues(g, seeds, s, model, tape, np.arange(first_trial, first_trial + trials))
    return RevenueEstimate.from_values(values)


def exact_expected_revenue(g: Graph, seeds: Sequence[int], s: PricingStrategy,
                           model: BuyerModel, exact: bool = True):
    """Expected revenue by enumerating every accept/reject outcome.

    Degree-one non-seed nodes are folded into their neighbour: they receive a
    single offer when it activates and cannot pass the product on, so only the
    remaining core (at most 12 nodes) is enumerated.
    """
    if not isinstance(model, IndependentCascade):
        raise NotImplementedError("exact expectation is only available for independent-cascade models")
    seeds = _validate(g, seeds, s).tolist()
    num = _frac if exact else float
    seed_set = set(seeds)
    pendant = {v for v in range(g.n) if v not in seed_set and g.degree(v) == 1
               and (g.degree(g.adjacency[v][0]) > 1 or g.adjacency[v][0] in seed_set)}
    core = [v for v in range(g.n) if v not in pendant]
    if len(core) > EXACT_NODE_BUDGET:
        raise BudgetError(f"exact oracle limited to {EXACT_NODE_BUDGET} core nodes, got {len(core)}")
    r = num(s.cashback)
    index = {v: i for i, v in enumerate(core)}
    accept = {}
    gain = {}
    for v in range(g.n):
        if v in seed_set:
            continue
        price = num(float(s.prices[v]))
        accept[v] = model.node_parameter(price) if exact else float(model.node_parameter(price))
        gain[v] = price - r
    bonus = [num(0)] * len(core)
    for v in pendant:
        w = g.adjacency[v][0]
        bonus[index[w]] += accept[v] * gain[v]
    nbr_mask = [sum(1 << index[w] for w in g.adjacency[v] if w in index) for v in core]
    value_on_buy = [(gain[v] if v not in seed_set else num(0)) + bonus[i] for i, v in enumerate(core)]
    probs = [accept.get(v, num(1)) for v in core]
    zero, one = num(0), num(1)

    @lru_cache(maxsize=None)
    def future(active: int, frontier: int):
        rec_count: dict[int, int] = {}
        f = frontier
        while f:
            u = (f & -f).bit_length() - 1
            f &= f - 1
            cand = nbr_mask[u] & ~active
            while cand:
                v = (cand & -cand).bit_length() - 1
                cand &= cand - 1
                rec_count[v] = rec_count.get(v, 0) + 1
        if not rec_count:
            return zero
        offered = sorted(rec_count)
        p_buy = [one - (one - probs[v]) ** rec_count[v] for v in offered]
        total = zero
        for bits in range(1, 1 << len(offered)):
            prob = one
            gained = zero
            bought = 0
            for j, v in enumerate(offered):
                if bits >> j & 1:
                    prob *= p_buy[j]
                    gained += value_on_buy[v]
                    bought |= 1 << v
                else:
                    prob *= one - p_buy[j]
            if prob:
                total += prob * (gained + future(active | bought, bought))
        return total

    start = sum(1 << index[v] for v in seeds)
    result = sum((bonus[index[v]] for v in seeds), zero) + future(start, start)
    return result
