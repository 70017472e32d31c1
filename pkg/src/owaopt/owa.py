"""Scenario model, OWA weight vectors and the OWA operator.

A weight vector ``w`` multiplies the j-th *largest* entry of a value vector
by ``w[j]``.  Special cases (maximum, minimum, average, quantile, median,
Hurwicz) are produced by :func:`preset_weights` and recognised by
:func:`classify_weights`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError, InfeasibleError, ParameterError

TOL = 1e-9


class ScenarioSet:
    """K x n matrix of nonnegative integer costs, one row per scenario."""

    __slots__ = ("_costs",)

    def __init__(self, costs):
        arr = np.array(costs)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise DimensionError(f"cost matrix must be K x n with K, n >= 1, got shape {arr.shape}")
        if arr.dtype.kind == "f":
            if not np.all(np.isfinite(arr)) or not np.all(arr == np.round(arr)):
                raise ParameterError("costs must be integers")
        elif arr.dtype.kind not in "iub":
            raise ParameterError(f"costs must be 64-bit integers, got dtype {arr.dtype}")
        arr = arr.astype(np.int64)
        if (arr < 0).any():
            raise ParameterError("costs must be nonnegative")
        arr.setflags(write=False)
        self._costs = arr

    @property
    def costs(self) -> np.ndarray:
        return self._costs

    @property
    def K(self) -> int:
        return self._costs.shape[0]

    @property
    def n(self) -> int:
        return self._costs.shape[1]

    def restrict(self, rows: Iterable[int]) -> ScenarioSet:
        return ScenarioSet(self._costs[list(rows)])

    def append(self, row: Sequence[int]) -> ScenarioSet:
        return ScenarioSet(np.vstack([self._costs, np.asarray(row, dtype=np.int64)[None, :]]))

    def tolist(self) -> list[list[int]]:
        return self._costs.tolist()

    def __eq__(self, other):
        if not isinstance(other, ScenarioSet):
            return NotImplemented
        return self._costs.shape == other._costs.shape and bool(np.array_equal(self._costs, other._costs))

    def __hash__(self):
        return hash((self._costs.shape, self._costs.tobytes()))

    def __repr__(self):
        return f"ScenarioSet(K={self.K}, n={self.n})"


@dataclass(frozen=True)
class WeightVector:
    weights: tuple[float, ...]

    def __post_init__(self):
        ws = tuple(float(x) for x in self.weights)
        if not ws:
            raise ParameterError("weight vector must be nonempty")
        for x in ws:
            if not (-TOL <= x <= 1 + TOL) or math.isnan(x):
                raise ParameterError(f"weights must lie in [0, 1], got {x}")
        total = math.fsum(ws)
        if abs(total - 1.0) > TOL:
            raise ParameterError(f"weights must sum to 1, got {total!r}")
        object.__setattr__(self, "weights", ws)

    @property
    def K(self) -> int:
        return len(self.weights)

    def __len__(self):
        return len(self.weights)

    def __getitem__(self, j):
        return self.weights[j]

    def __iter__(self):
        return iter(self.weights)

    def isclose(self, other: WeightVector, tol: float = TOL) -> bool:
        return self.K == other.K and all(abs(a - b) <= tol for a, b in zip(self, other))


class WeightKind(enum.Enum):
    MAXIMUM = "maximum"
    MINIMUM = "minimum"
    AVERAGE = "average"
    QUANTILE = "quantile"
    MEDIAN = "median"
    HURWICZ = "hurwicz"
    NONINCREASING = "nonincreasing"
    NONDECREASING = "nondecreasing"
    GENERAL = "general"


@dataclass(frozen=True)
class WeightClass:
    kind: WeightKind
    k: int | None = None
    alpha: float | None = None

    def __str__(self):
        if self.kind is WeightKind.QUANTILE:
            return f"quantile({self.k})"
        if self.kind is WeightKind.HURWICZ:
            return f"hurwicz({self.alpha:g})"
        return self.kind.value

    def __eq__(self, other):
        if not isinstance(other, WeightClass):
            return NotImplemented
        if self.kind is not other.kind or self.k != other.k:
            return False
        if self.alpha is None or other.alpha is None:
            return self.alpha is other.alpha
        return abs(self.alpha - other.alpha) <= TOL

    def __hash__(self):
        return hash((self.kind, self.k))


@dataclass(frozen=True)
class Solution:
    """Sorted tuple of distinct ground-set element indices."""

    elements: tuple[int, ...]

    def __post_init__(self):
        els = tuple(sorted(int(e) for e in self.elements))
        if len(set(els)) != len(els):
            raise ParameterError(f"solution has repeated elements: {els}")
        if els and els[0] < 0:
            raise ParameterError(f"negative element index in {els}")
        object.__setattr__(self, "elements", els)

    @classmethod
    def of(cls, elements: Iterable[int]) -> Solution:
        return cls(tuple(elements))

    def __iter__(self):
        return iter(self.elements)

    def __len__(self):
        return len(self.elements)

    def __contains__(self, e):
        return e in self.elements


def owa_value(values: Sequence[float], w: WeightVector | Sequence[float]) -> float:
    """Weighted sum of ``values`` sorted nonincreasingly (ties by index)."""
    ws = w.weights if isinstance(w, WeightVector) else tuple(w)
    vals = list(values)
    if len(vals) != len(ws):
        raise DimensionError(f"{len(vals)} values but {len(ws)} weights")
    order = sorted(range(len(vals)), key=lambda j: (-vals[j], j))
    return math.fsum(ws[r] * vals[j] for r, j in enumerate(order))


def scenario_costs(inst, X: Solution) -> tuple[int, ...]:
    """F(X, c_j) for every scenario j."""
    costs = inst.scenarios.costs
    idx = list(X.elements)
    if idx and idx[-1] >= costs.shape[1]:
        raise ParameterError(f"element index {idx[-1]} out of range for n={costs.shape[1]}")
    return tuple(int(v) for v in costs[:, idx].sum(axis=1))


def evaluate(inst, X: Solution, w: WeightVector) -> tuple[float, tuple[int, ...]]:
    """OWA value and per-scenario costs of a feasible solution."""
    if w.K != inst.K:
        raise DimensionError(f"weights have length {w.K}, instance has K={inst.K}")
    if not inst.is_feasible(X):
        raise InfeasibleError(f"solution {list(X.elements)} is not feasible for {inst.kind.value}")
    sc = scenario_costs(inst, X)
    return owa_value(sc, w), sc


def preset_weights(kind: WeightKind | str, K: int, param: float | None = None) -> WeightVector:
    """Weight vector for one of the named special cases.

    ``param`` is ``k`` for QUANTILE and ``alpha`` for HURWICZ.
    """
    kind = WeightKind(kind)
    if not isinstance(K, (int, np.integer)) or K < 1:
        raise ParameterError(f"K must be a positive integer, got {K!r}")
    K = int(K)
    if kind is WeightKind.MAXIMUM:
        return _unit(K, 1)
    if kind is WeightKind.MINIMUM:
        return _unit(K, K)
    if kind is WeightKind.AVERAGE:
        return WeightVector((1.0 / K,) * K)
    if kind is WeightKind.MEDIAN:
        return _unit(K, K // 2 + 1)
    if kind is WeightKind.QUANTILE:
        if param is None or int(param) != param or not 1 <= param <= K:
            raise ParameterError(f"quantile index k must be an integer in [1, {K}], got {param!r}")
        return _unit(K, int(param))
    if kind is WeightKind.HURWICZ:
        if param is None or not 0.0 <= param <= 1.0:
            raise ParameterError(f"Hurwicz alpha must be in [0, 1], got {param!r}")
        if K == 1:
            return WeightVector((1.0,))
        ws = [0.0] * K
        ws[0] = float(param)
        ws[-1] = 1.0 - float(param)
        return WeightVector(tuple(ws))
    raise ParameterError(f"no preset for weight class {kind.value!r}")


def _unit(K: int, position: int) -> WeightVector:
    ws = [0.0] * K
    ws[position - 1] = 1.0
    return WeightVector(tuple(ws))


def is_nonincreasing(w: WeightVector, tol: float = TOL) -> bool:
    return all(a >= b - tol for a, b in zip(w, w.weights[1:]))


def is_nondecreasing(w: WeightVector, tol: float = TOL) -> bool:
    return all(a <= b + tol for a, b in zip(w, w.weights[1:]))


def classify_weights(w: WeightVector) -> WeightClass:
    """Most specific class of ``w``: named cases, then monotone, then general."""
    ws = w.weights
    K = len(ws)
    ones = [j for j, x in enumerate(ws) if abs(x - 1.0) <= TOL]
    if ones and all(abs(x) <= TOL for j, x in enumerate(ws) if j != ones[0]):
        pos = ones[0] + 1
        if pos == 1:
            return WeightClass(WeightKind.MAXIMUM)
        if pos == K:
            return WeightClass(WeightKind.MINIMUM)
        if pos == K // 2 + 1:
            return WeightClass(WeightKind.MEDIAN)
        return WeightClass(WeightKind.QUANTILE, k=pos)
    if all(abs(x - 1.0 / K) <= TOL for x in ws):
        return WeightClass(WeightKind.AVERAGE)
    if K >= 2 and all(abs(x) <= TOL for x in ws[1:-1]):
        return WeightClass(WeightKind.HURWICZ, alpha=ws[0])
    if is_nonincreasing(w):
        return WeightClass(WeightKind.NONINCREASING)
    if is_nondecreasing(w):
        return WeightClass(WeightKind.NONDECREASING)
    return WeightClass(WeightKind.GENERAL)


def weights_for_class(wc: WeightClass, K: int) -> WeightVector:
    """Inverse of :func:`classify_weights` for the named classes."""
    param = wc.k if wc.kind is WeightKind.QUANTILE else wc.alpha
    return preset_weights(wc.kind, K, param)
