"""Price-aware buyer models.

Cost functions ``C`` map an acceptance probability to the price at which a
buyer accepts with that probability; the acceptance probability for a price is
recovered as ``max{x : C(x) >= price}``. Influence functions ``B`` scale the
recommender fraction in the threshold model. Both live on a finite breakpoint
grid, either as step functions or piecewise-linear curves, and store their
breakpoints as exact fractions so the oracles can work in rational arithmetic.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np

Number = Union[int, float, Fraction]


class ModelError(ValueError):
    """Invalid model parameters."""


class ModelDegenerateError(ModelError):
    """The model has no finite complexity (no price earns bounded revenue)."""


def _frac(x: Number | str) -> Fraction:
    if isinstance(x, (float, np.floating)):
        return Fraction(repr(float(x)))
    return Fraction(x)


def _check_price(price: Number) -> None:
    if not 0 <= price <= 1:
        raise ModelError(f"price {price} outside [0, 1]")


@dataclass(frozen=True)
class _Breakpoints:
    xs: tuple[Fraction, ...]
    ys: tuple[Fraction, ...]
    shape: str  # "step" or "linear"

    def __post_init__(self):
        if self.shape not in ("step", "linear"):
            raise ModelError(f"unknown shape {self.shape!r}")
        if not self.xs or len(self.xs) != len(self.ys):
            raise ModelError("breakpoints need matching, non-empty x and value lists")
        if any(b <= a for a, b in zip(self.xs, self.xs[1:])):
            raise ModelError("breakpoint x values must be strictly increasing")
        if self.xs[0] != 0 or self.xs[-1] > 1:
            raise ModelError("breakpoints must start at x=0 and stay within [0, 1]")
        if any(not 0 <= y <= 1 for y in self.ys):
            raise ModelError("function values must lie in [0, 1]")
        if self.shape == "linear" and (self.xs[-1] != 1 or len(self.xs) < 2):
            raise ModelError("a piecewise-linear function needs breakpoints at 0 and 1")
        if self.shape == "step" and self.xs[-1] == 1:
            raise ModelError("step starts must lie in [0, 1)")

    def value(self, x: Number) -> Fraction:
        x = _frac(x)
        if self.shape == "step":
            i = max(i for i, xi in enumerate(self.xs) if xi <= x)
            return self.ys[i]
        for i in range(len(self.xs) - 1):
            x0, x1 = self.xs[i], self.xs[i + 1]
            if x0 <= x <= x1:
                y0, y1 = self.ys[i], self.ys[i + 1]
                return y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        raise ModelError(f"x={x} outside [0, 1]")

    def describe(self) -> str:
        pts = ", ".join(f"({x}, {y})" for x, y in zip(self.xs, self.ys))
        return f"shape = {self.shape}\nbreakpoints = {pts}"


class CostFunction(_Breakpoints):
    """``C: [0,1] -> [0,1]``, non-increasing, with ``C(0) = 1`` and ``C(1) = 0``.

    A step function holds ``ys[i]`` on ``[xs[i], xs[i+1])`` for ``x > 0``; the
    endpoint values ``C(0) = 1`` and ``C(1) = 0`` hold by convention.
    """

    def __post_init__(self):
        super().__post_init__()
        if any(b > a for a, b in zip(self.ys, self.ys[1:])):
            raise ModelError("cost function must be non-increasing")
        if self.shape == "linear" and (self.ys[0] != 1 or self.ys[-1] != 0):
            raise ModelError("cost function needs C(0) = 1 and C(1) = 0")

    @classmethod
    def linear(cls, points: Iterable[tuple[Number, Number]]) -> "CostFunction":
        xs, ys = zip(*((_frac(x), _frac(y)) for x, y in points))
        return cls(xs, ys, "linear")

    @classmethod
    def step(cls, points: Iterable[tuple[Number, Number]]) -> "CostFunction":
        xs, ys = zip(*((_frac(x), _frac(y)) for x, y in points))
        return cls(xs, ys, "step")

    @classmethod
    def regular_steps(cls, values: Sequence[Number]) -> "CostFunction":
        n = len(values)
        return cls.step((Fraction(i, n), v) for i, v in enumerate(values))

    def __call__(self, x: Number) -> Fraction:
        x = _frac(x)
        if not 0 <= x <= 1:
            raise ModelError(f"x={x} outside [0, 1]")
        if x == 0:
            return Fraction(1)
        if x == 1:
            return Fraction(0)
        return self.value(x)

    def accept_probability(self, price: Number) -> Number:
        """Largest acceptance probability whose cost is at least ``price``.

        Returns a float for float input and an exact Fraction otherwise.
        """
        _check_price(price)
        p = _frac(price)
        if p == 0:
            x = Fraction(1)
        elif self.shape == "step":
            x = next((xi for xi, yi in zip(self.xs, self.ys) if yi < p), Fraction(1))
        else:
            i = max(i for i, yi in enumerate(self.ys) if yi >= p)
            x0, x1, y0, y1 = self.xs[i], self.xs[i + 1], self.ys[i], self.ys[i + 1]
            x = x0 + (y0 - p) / (y0 - y1) * (x1 - x0)
        return float(x) if isinstance(price, float) else x

    def slope_parameters(self) -> tuple[Fraction, Fraction]:
        """``(eps, m)`` with ``C(x) >= 1 - m x`` on ``[0, eps]`` and
        ``C(x) <= m (1 - x)`` on ``[1 - eps, 1]``."""
        xs, ys = self.xs, self.ys
        if self.shape == "linear":
            eps = min(xs[1], 1 - xs[-2])
            m = max((1 - ys[1]) / xs[1], ys[-2] / (1 - xs[-2]))
            return eps, m
        if ys[0] != 1:
            raise ModelDegenerateError("C drops below 1 immediately after 0 (not differentiable at 0)")
        if ys[-1] != 0:
            raise ModelDegenerateError(
                "C stays positive up to 1 (not differentiable at 1); revenue on a line is unbounded")
        if len(xs) == 1:
            raise ModelDegenerateError("C is 0 for every x > 0")
        eps = min(xs[1], 1 - xs[-1])
        m = (1 - ys[1]) / xs[1] if eps == xs[1] else Fraction(0)
        return eps, m

    def line_bound(self) -> float:
        """``sup_{0<x<1} 2 x C(x) / (1 - x)``, scanning every piece of C."""
        best = 0.0
        xs = [float(x) for x in self.xs]
        ys = [float(y) for y in self.ys]
        if self.shape == "step":
            xs.append(1.0)
        for i in range(len(xs) - 1):
            lo, hi = xs[i], xs[i + 1]
            if self.shape == "step":
                if hi >= 1.0:
                    if ys[i] > 0:
                        return float("inf")
                    continue
                # increasing in x on a flat piece: supremum at the right end
                best = max(best, 2 * hi * ys[i] / (1 - hi))
            else:
                grid = np.linspace(lo, hi, 257)[:-1] if hi >= 1.0 else np.linspace(lo, hi, 257)
                vals = np.array([float(self(_frac(x))) for x in grid])
                best = max(best, float(np.max(2 * grid * vals / (1 - grid))))
                if hi >= 1.0:
                    # limit x -> 1 on the last segment C(x) = s (1 - x)
                    best = max(best, 2 * ys[i] / (1 - lo))
        return best


class InfluenceFunction(_Breakpoints):
    """``B: (0,1] -> [0,1]``; the value at price 0 is never consulted."""

    @classmethod
    def linear(cls, points: Iterable[tuple[Number, Number]]) -> "InfluenceFunction":
        xs, ys = zip(*((_frac(x), _frac(y)) for x, y in points))
        return cls(xs, ys, "linear")

    @classmethod
    def step(cls, points: Iterable[tuple[Number, Number]]) -> "InfluenceFunction":
        xs, ys = zip(*((_frac(x), _frac(y)) for x, y in points))
        return cls(xs, ys, "step")

    @classmethod
    def constant(cls, value: Number) -> "InfluenceFunction":
        return cls.linear([(0, value), (1, value)])

    def __call__(self, x: Number) -> Fraction:
        return self.value(x)

    def grid(self, size: int = 1001) -> list[Fraction]:
        pts = {Fraction(i, size - 1) for i in range(1, size)}
        pts.update(x for x in self.xs if x > 0)
        if self.shape == "step":
            pts.update(x - Fraction(1, 10**9) for x in self.xs[1:])
        return sorted(p for p in pts if 0 < p <= 1)


def icm_accept_probability(cost: CostFunction, price: Number) -> Number:
    return cost.accept_probability(price)


def ltm_accept(influence: InfluenceFunction, price: Number, alpha: Number, theta: Number) -> bool:
    """Monotone threshold rule: buy iff the offer is free or ``theta <= alpha * B(price)``."""
    if price == 0:
        return True
    b = influence(price)
    if isinstance(alpha, float) or isinstance(theta, float):
        return float(theta) <= float(alpha) * float(b)
    return _frac(theta) <= _frac(alpha) * b


def line_revenue(cost: CostFunction, n: int, grid: Sequence[Number],
                 return_argmax: bool = False):
    """``L_n = max_x x (C(x) + L_{n-1})`` with ``L_0 = 0``, x ranging over ``grid``."""
    if len(grid) == 0:
        raise ModelError("line_revenue needs a non-empty probability grid")
    if n < 0:
        raise ModelError("path length must be non-negative")
    xs = np.asarray([float(x) for x in grid])
    cs = np.asarray([float(cost(_frac(x))) for x in grid])
    value, arg = 0.0, None
    for _ in range(n):
        scores = xs * (cs + value)
        i = int(np.argmax(scores))
        value, arg = float(scores[i]), float(xs[i])
    return (value, arg) if return_argmax else value


@dataclass(frozen=True)
class ModelComplexity:
    L: float
    f: float
    c: Fraction
    q: Fraction

    def __post_init__(self):
        if not (self.L > 0 and 0 <= self.f < 1 and 0 < self.c <= 1 and 0 < self.q <= 1):
            raise ModelError(f"invalid complexity parameters {self}")

    @property
    def K(self) -> float:
        return self.L / ((1 - self.f) * float(self.c) * float(self.q))


def icm_complexity(cost: CostFunction) -> ModelComplexity:
    eps, m = cost.slope_parameters()
    q = eps if m == 0 else min(eps, 1 / (2 * m))
    c = cost(q)
    if q <= 0 or c < Fraction(1, 2):
        raise ModelDegenerateError(f"no probability q with C(q) >= 1/2 (q={q}, C(q)={c})")
    proof_bound = 2 * float(max(1 / eps, m))
    L = min(cost.line_bound(), proof_bound)
    return ModelComplexity(L=L, f=0.0, c=c, q=q)


def ltm_peak(influence: InfluenceFunction) -> tuple[Fraction, Fraction]:
    """``(argmax, max)`` of ``x * B(x)`` over the function's grid."""
    best_x, best = Fraction(0), Fraction(0)
    for x in influence.grid():
        v = x * influence(x)
        if v > best:
            best_x, best = x, v
    return best_x, best


def ltm_complexity(influence: InfluenceFunction) -> ModelComplexity:
    c, k_b = ltm_peak(influence)
    if k_b == 0:
        raise ModelDegenerateError("B is identically 0: no positive price ever sells")
    # a node with more than half its neighbours recommending buys at price c
    # with probability above B(c)/2; a one-seeded line earns at most K_B, and
    # the meeting node of a two-seeded line adds at most one full price
    return ModelComplexity(L=float(2 * k_b + 1), f=0.5, c=c, q=influence(c) / 2)


@dataclass(frozen=True)
class IndependentCascade:
    cost: CostFunction
    override: ModelComplexity | None = None
    kind = "icm"

    @cached_property
    def complexity(self) -> ModelComplexity:
        return self.override or icm_complexity(self.cost)

    def node_parameter(self, price: Number) -> Number:
        """Per-recommendation acceptance probability at ``price``."""
        return self.cost.accept_probability(price)

    def describe(self) -> str:
        return f"kind = icm\n{self.cost.describe()}"


@dataclass(frozen=True)
class LinearThreshold:
    influence: InfluenceFunction
    override: ModelComplexity | None = None
    kind = "ltm"

    @cached_property
    def complexity(self) -> ModelComplexity:
        return self.override or ltm_complexity(self.influence)

    def node_parameter(self, price: Number) -> Number:
        """``B(price)``; the threshold test scales it by the recommender fraction."""
        _check_price(price)
        if price == 0:
            return 1.0 if isinstance(price, float) else Fraction(1)
        b = self.influence(price)
        return float(b) if isinstance(price, float) else b

    def describe(self) -> str:
        return f"kind = ltm\n{self.influence.describe()}"


BuyerModel = Union[IndependentCascade, LinearThreshold]

DEFAULT_STEPS = (1, Fraction(1, 10), Fraction(1, 20), 0)


def default_model() -> IndependentCascade:
    """Regular 4-step cost function used by the experiments."""
    return IndependentCascade(CostFunction.regular_steps(DEFAULT_STEPS))


def accept_half_model() -> IndependentCascade:
    """Buys with probability 1/2 at any positive price and surely when free."""
    return IndependentCascade(CostFunction.step([(0, 1), (Fraction(1, 2), 0)]))


def threshold_model(p: Number) -> IndependentCascade:
    """``C(x) = 1`` for ``x < p`` and 0 otherwise: full price sells with probability p."""
    return IndependentCascade(CostFunction.step([(0, 1), (p, 0)]))


_PAIR = re.compile(r"\(\s*([^,()\s]+)\s*,\s*([^,()\s]+)\s*\)")


def parse_model_config(text: str) -> BuyerModel:
    """Parse ``key = value`` lines.

    Keys: ``kind`` (icm|ltm), ``shape`` (step|linear), ``breakpoints`` as
    ``(x, value), ...`` or ``steps`` as a comma-separated list of regular step
    values, and optional ``L``, ``f``, ``c``, ``q`` complexity overrides.
    """
    cfg: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ModelError(f"model config line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        cfg[key.lower()] = value
    kind = cfg.get("kind", "icm").lower()
    shape = cfg.get("shape", "step").lower()
    try:
        if "steps" in cfg:
            values = [_frac(v.strip()) for v in cfg["steps"].split(",") if v.strip()]
            points = [(Fraction(i, len(values)), v) for i, v in enumerate(values)]
            shape = "step"
        elif "breakpoints" in cfg:
            points = [(_frac(a), _frac(b)) for a, b in _PAIR.findall(cfg["breakpoints"])]
        else:
            raise ModelError("model config needs 'breakpoints' or 'steps'")
    except (ValueError, ZeroDivisionError) as exc:
        raise ModelError(f"bad number in model config: {exc}") from None
    if not points:
        raise ModelError("model config has no breakpoints")
    cls = {"icm": CostFunction, "ltm": InfluenceFunction}.get(kind)
    if cls is None:
        raise ModelError(f"unknown model kind {kind!r}")
    func = getattr(cls, shape)(points) if shape in ("step", "linear") else None
    if func is None:
        raise ModelError(f"unknown shape {shape!r}")
    override = None
    if {"l", "f", "c", "q"} <= cfg.keys():
        override = ModelComplexity(L=float(cfg["l"]), f=float(cfg["f"]),
                                   c=_frac(cfg["c"]), q=_frac(cfg["q"]))
    model = IndependentCascade(func, override) if kind == "icm" else LinearThreshold(func, override)
    model.complexity  # validate eagerly
    return model


def load_model(path: str | Path) -> BuyerModel:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"model file not found: {path}")
    return parse_model_config(path.read_text())
