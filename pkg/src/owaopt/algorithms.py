"""Exact and approximation algorithms for Min-OWA with ratio certificates.

Every algorithm returns an :class:`AlgorithmReport` whose ``owa`` and
``scenario_costs`` come from :func:`owaopt.owa.evaluate`, never from the
algorithm's own arithmetic.

Deterministic subproblems go through a *solver handle*: any callable
``solver(inst, costs) -> Solution``.  Its approximation ratio ``gamma``
(1 for the exact :func:`~owaopt.problems.solve_deterministic`) multiplies
the certificates; the package ships no inexact solver.

Min-max subproblems (Hurwicz via min-max, quantile enumeration) go through an
*inner* handle: ``inner(inst) -> AlgorithmReport`` whose certificate ratio is
its ``gamma``.  :func:`solve_minmax_aggregate` (gamma = K) and
:func:`minmax_bruteforce` (gamma = 1) are the two shipped inner handles.

Among candidates with equal OWA the first computed wins.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import BudgetError, InfeasibleError, ParameterError
from .owa import (
    TOL,
    Solution,
    WeightKind,
    WeightVector,
    evaluate,
    is_nonincreasing,
    preset_weights,
)
from .problems import DEFAULT_LIMIT, ProblemInstance, enumerate_feasible, solve_deterministic

Solver = Callable[[ProblemInstance, Sequence[float]], Solution]

DEFAULT_QUANTILE_BUDGET = 10_000


@dataclass(frozen=True)
class Certificate:
    ratio: float
    basis: str

    def __post_init__(self):
        if self.ratio < 1.0 - TOL:
            raise ParameterError(f"certificate ratio must be >= 1, got {self.ratio}")
        object.__setattr__(self, "ratio", max(1.0, float(self.ratio)))


@dataclass(frozen=True)
class AlgorithmReport:
    algorithm: str
    solution: Solution
    weights: WeightVector
    owa: float
    scenario_costs: tuple[int, ...]
    certificate: Certificate | None
    elapsed: float

    @property
    def ratio(self) -> float | None:
        return None if self.certificate is None else self.certificate.ratio


def _report(name, inst, X, w, cert, started) -> AlgorithmReport:
    owa, sc = evaluate(inst, X, w)
    return AlgorithmReport(name, X, w, owa, sc, cert, time.perf_counter() - started)


def _exact_or(gamma: float, basis: str) -> Certificate:
    return Certificate(1.0, "exact") if gamma == 1.0 else Certificate(gamma, basis)


def _sorted_costs(inst: ProblemInstance) -> np.ndarray:
    """Per-element costs sorted nonincreasingly, shape (n, K)."""
    return -np.sort(-inst.scenarios.costs.T, axis=1)


def _check_gamma(gamma: float) -> float:
    if not gamma >= 1.0:
        raise ParameterError(f"solver ratio gamma must be >= 1, got {gamma}")
    return float(gamma)


def report_for(inst: ProblemInstance, X: Solution, w: WeightVector, name: str = "given") -> AlgorithmReport:
    """Uncertified report for an externally supplied solution."""
    return _report(name, inst, X, w, None, time.perf_counter())


# ------------------------------------------------------------------- oracle


def brute_force_owa(inst: ProblemInstance, w: WeightVector, limit: int = DEFAULT_LIMIT) -> AlgorithmReport:
    """Global optimum by enumerating the feasible set."""
    started = time.perf_counter()
    sols = enumerate_feasible(inst, limit)
    if not sols:
        raise InfeasibleError("instance has no feasible solution")
    values = owa_values_of(inst, sols, w)
    best = int(np.argmin(values))
    return _report("bruteforce", inst, sols[best], w, Certificate(1.0, "exact"), started)


def owa_values_of(inst: ProblemInstance, sols: Sequence[Solution], w: WeightVector) -> np.ndarray:
    """Vectorised OWA of many solutions (cost matrix sorted row-wise)."""
    incidence = np.zeros((len(sols), inst.n), dtype=np.int64)
    for r, X in enumerate(sols):
        incidence[r, list(X.elements)] = 1
    F = incidence @ inst.scenarios.costs.T
    F = -np.sort(-F, axis=1)
    return F @ np.asarray(w.weights)


def minmax_bruteforce(limit: int = DEFAULT_LIMIT) -> Callable[[ProblemInstance], AlgorithmReport]:
    """Exact min-max inner handle (gamma = 1)."""

    def inner(inst: ProblemInstance) -> AlgorithmReport:
        return brute_force_owa(inst, preset_weights(WeightKind.MAXIMUM, inst.K), limit)

    inner.__name__ = "minmax_bruteforce"
    return inner


# ------------------------------------------------------ polynomial special cases


def solve_min_average(inst: ProblemInstance, solver: Solver = solve_deterministic, gamma: float = 1.0) -> AlgorithmReport:
    started = time.perf_counter()
    gamma = _check_gamma(gamma)
    # scaling by K does not change the minimiser and keeps costs integral
    totals = inst.scenarios.costs.sum(axis=0)
    X = solver(inst, totals.tolist())
    w = preset_weights(WeightKind.AVERAGE, inst.K)
    return _report("min-average", inst, X, w, _exact_or(gamma, "gamma"), started)


def solve_min_min(inst: ProblemInstance, solver: Solver = solve_deterministic, gamma: float = 1.0) -> AlgorithmReport:
    started = time.perf_counter()
    gamma = _check_gamma(gamma)
    costs = inst.scenarios.costs
    best, best_val = None, math.inf
    for j in range(inst.K):
        X = solver(inst, costs[j].tolist())
        val = int(costs[j, list(X.elements)].sum())
        if val < best_val:
            best, best_val = X, val
    w = preset_weights(WeightKind.MINIMUM, inst.K)
    return _report("min-min", inst, best, w, _exact_or(gamma, "gamma"), started)


def solve_minmax_aggregate(inst: ProblemInstance, solver: Solver = solve_deterministic, gamma: float = 1.0) -> AlgorithmReport:
    """Solve for per-element maximum costs; K-approximation of min-max."""
    started = time.perf_counter()
    gamma = _check_gamma(gamma)
    X = solver(inst, inst.scenarios.costs.max(axis=0).tolist())
    w = preset_weights(WeightKind.MAXIMUM, inst.K)
    ratio = gamma * inst.K
    cert = _exact_or(ratio, "K") if gamma == 1.0 else Certificate(ratio, "gamma-K")
    return _report("minmax-aggregate", inst, X, w, cert, started)


def solve_two_scenario_owa(inst: ProblemInstance, alpha: float, solver: Solver = solve_deterministic) -> AlgorithmReport:
    """Exact Min-OWA for K = 2 and weights (alpha, 1 - alpha), alpha <= 1/2.

    Candidates are the minimisers of the two blends
    ``alpha*F(X,c2) + (1-alpha)*F(X,c1)`` and the symmetric one; the better
    under OWA is optimal.
    """
    started = time.perf_counter()
    if inst.K != 2:
        raise ParameterError(f"two-scenario algorithm needs K = 2, got K = {inst.K}")
    if not 0.0 <= alpha <= 0.5:
        raise ParameterError(f"alpha must be in [0, 1/2], got {alpha}; use solve_hurwicz_top2 for alpha > 1/2")
    w = WeightVector((alpha, 1.0 - alpha))
    c1, c2 = (row.astype(float) for row in inst.scenarios.costs)
    X1 = solver(inst, (alpha * c2 + (1 - alpha) * c1).tolist())
    X2 = solver(inst, (alpha * c1 + (1 - alpha) * c2).tolist())
    r1 = _report("two-scenario", inst, X1, w, Certificate(1.0, "exact"), started)
    r2 = _report("two-scenario", inst, X2, w, Certificate(1.0, "exact"), started)
    return r2 if r2.owa < r1.owa else r1


# ------------------------------------------------------------- aggregation


def solve_owa_aggregate(inst: ProblemInstance, w: WeightVector, solver: Solver = solve_deterministic, gamma: float = 1.0) -> AlgorithmReport:
    """Aggregate each element's sorted costs with ``w`` and solve once.

    Certified within ``w1 * gamma * K`` for nonincreasing weights, uncertified
    otherwise.
    """
    started = time.perf_counter()
    gamma = _check_gamma(gamma)
    if w.K != inst.K:
        raise ParameterError(f"weights have length {w.K}, instance has K = {inst.K}")
    aggregated = _sorted_costs(inst) @ np.asarray(w.weights)
    X = solver(inst, aggregated.tolist())
    cert = None
    if is_nonincreasing(w):
        basis = "w1K" if gamma == 1.0 else "w1-gamma-K"
        cert = Certificate(max(1.0, w[0] * inst.K * gamma), basis)
    return _report("aggregate", inst, X, w, cert, started)


def hurwicz_top2_ratio(alpha: float, K: int) -> float:
    return alpha * K + (1 - alpha) * (K - 2)


def solve_hurwicz_top2(inst: ProblemInstance, alpha: float, solver: Solver = solve_deterministic, gamma: float = 1.0) -> AlgorithmReport:
    """Aggregate ``alpha * largest + (1 - alpha) * second largest`` per element.

    Certified within ``alpha*K + (1-alpha)*(K-2)`` for alpha in [1/2, 1].
    """
    started = time.perf_counter()
    gamma = _check_gamma(gamma)
    if inst.K < 2:
        raise ParameterError("hurwicz-top2 needs K >= 2")
    if not 0.0 <= alpha <= 1.0:
        raise ParameterError(f"alpha must be in [0, 1], got {alpha}")
    top = _sorted_costs(inst)
    X = solver(inst, (alpha * top[:, 0] + (1 - alpha) * top[:, 1]).tolist())
    w = preset_weights(WeightKind.HURWICZ, inst.K, alpha)
    cert = None
    if alpha >= 0.5:
        ratio = hurwicz_top2_ratio(alpha, inst.K) * gamma
        cert = Certificate(ratio, "exact") if abs(ratio - 1.0) <= TOL else Certificate(ratio, "hurwicz-top2")
    return _report("hurwicz-top2", inst, X, w, cert, started)


def solve_hurwicz_via_minmax(inst: ProblemInstance, alpha: float, inner: Callable[[ProblemInstance], AlgorithmReport] | None = None) -> AlgorithmReport:
    """Run a min-max solver and certify its solution under Hurwicz(alpha).

    Ratio ``gamma`` when alpha = 1 or the solution costs 0 in some scenario,
    ``gamma / alpha`` otherwise.
    """
    started = time.perf_counter()
    if not 0.0 < alpha <= 1.0:
        raise ParameterError(f"alpha must be in (0, 1], got {alpha}")
    inner = inner or solve_minmax_aggregate
    base = inner(inst)
    if base.certificate is None:
        raise ParameterError("inner min-max solver must provide a ratio certificate")
    g = base.certificate.ratio
    X = base.solution
    w = preset_weights(WeightKind.HURWICZ, inst.K, alpha)
    owa, sc = evaluate(inst, X, w)
    if alpha == 1.0 or min(sc) == 0:
        cert = Certificate(g, "gamma") if g > 1.0 else Certificate(1.0, "exact")
    else:
        cert = Certificate(g / alpha, "gamma-over-alpha")
    return AlgorithmReport("hurwicz-minmax", X, w, owa, sc, cert, time.perf_counter() - started)


# ---------------------------------------------------------------- quantiles


def solve_quantile_enum(
    inst: ProblemInstance,
    k: int,
    inner: Callable[[ProblemInstance], AlgorithmReport] | None = None,
    budget: int = DEFAULT_QUANTILE_BUDGET,
) -> AlgorithmReport:
    """Min k-th largest cost via one min-max solve per (k-1)-subset of scenarios.

    Subsets are visited in lexicographic order and the first best candidate
    is kept.  The certificate is the worst inner ratio seen.
    """
    started = time.perf_counter()
    K = inst.K
    if not isinstance(k, (int, np.integer)) or not 1 <= k <= K:
        raise ParameterError(f"k must be an integer in [1, {K}], got {k!r}")
    n_sub = math.comb(K, k - 1)
    if n_sub > budget:
        raise BudgetError(f"C({K}, {k - 1}) = {n_sub} min-max subproblems exceed budget {budget}")
    inner = inner or solve_minmax_aggregate
    w = preset_weights(WeightKind.QUANTILE, K, k)
    best = None
    gamma = 1.0
    for dropped in itertools.combinations(range(K), k - 1):
        keep = [j for j in range(K) if j not in dropped]
        sub = inst.with_scenarios(inst.scenarios.restrict(keep))
        rep = inner(sub)
        if rep.certificate is None:
            raise ParameterError("inner min-max solver must provide a ratio certificate")
        gamma = max(gamma, rep.certificate.ratio)
        owa, _ = evaluate(inst, rep.solution, w)
        if best is None or owa < best[0]:
            best = (owa, rep.solution)
    cert = Certificate(1.0, "exact") if gamma == 1.0 else Certificate(gamma, "gamma")
    return _report("quantile-enum", inst, best[1], w, cert, started)
