"""Exact cost-vector queries and (1+eps)-approximate Pareto sets.

Both operations are dynamic programs over partial cost vectors, supported for
Selection (one stage per element) and for ShortestPath on acyclic graphs
(labels propagated in topological order, one trimming per vertex).

Trimming buckets each coordinate geometrically with ratio ``1 + delta`` where
``(1 + delta) ** D <= 1 + eps`` and ``D`` is the number of trimming steps any
single solution goes through (``n`` for Selection, the longest path length
in arcs for ShortestPath).  Zero is a bucket of its own.  One representative
is kept per cell, so every solution stays covered within ``(1 + delta)`` per
step and ``(1 + eps)`` overall.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Sequence

import networkx as nx
import numpy as np

from .algorithms import AlgorithmReport, Certificate, _report
from .errors import BudgetError, CapabilityError, InfeasibleError, ParameterError
from .owa import Solution, WeightVector, owa_value
from .problems import Digraph, ProblemInstance, ProblemKind

MAX_CELLS = 10**7
# keeps float rounding at bucket edges from widening a cell beyond 1 + delta
_DELTA_MARGIN = 1.0 - 1e-6


@dataclass(frozen=True)
class CostVector:
    values: tuple[int, ...]
    solution: Solution


@dataclass(frozen=True)
class ParetoSet:
    members: tuple[CostVector, ...]
    epsilon: float

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def covers(self, vector: Sequence[int], tol: float = 1e-9) -> bool:
        bound = [(1 + self.epsilon) * v + tol for v in vector]
        return any(all(y <= b for y, b in zip(m.values, bound)) for m in self.members)


def _check_supported(inst: ProblemInstance) -> None:
    if inst.kind is ProblemKind.SELECTION:
        return
    if inst.kind is ProblemKind.SHORTEST_PATH:
        _topological_order(inst.structure)
        return
    raise CapabilityError(f"{inst.kind.value} is not supported; use selection or acyclic shortest-path")


def _topological_order(g: Digraph) -> list[int]:
    G = nx.MultiDiGraph()
    G.add_nodes_from(range(g.num_vertices))
    G.add_edges_from((a.tail, a.head) for a in g.arcs)
    try:
        return list(nx.lexicographical_topological_sort(G))
    except nx.NetworkXUnfeasible as exc:
        raise CapabilityError("shortest-path exact/Pareto DP needs an acyclic graph") from exc


def _columns(inst: ProblemInstance) -> list[tuple[int, ...]]:
    return [tuple(int(x) for x in col) for col in inst.scenarios.costs.T]


def _add(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(x + y for x, y in zip(a, b))


def _check_budget(cells: int) -> None:
    if cells > MAX_CELLS:
        raise BudgetError(f"more than {MAX_CELLS} live DP cells")


# -------------------------------------------------------- stage-wise engines
#
# ``key`` maps a partial cost vector to its cell; ``admit`` rejects partial
# vectors that can no longer lead anywhere useful.  Each state is
# (vector, elements) and the first state to reach a cell keeps it.


def _selection_dp(inst: ProblemInstance, key, admit) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    p = inst.structure.p
    n = inst.n
    cols = _columns(inst)
    zero = (0,) * inst.K
    layers: list[dict] = [dict() for _ in range(p + 1)]
    layers[0][key(zero)] = (zero, ())
    for i in range(n):
        remaining = n - i - 1
        nxt: list[dict] = [dict() for _ in range(p + 1)]
        cells = 0
        for cnt in range(p + 1):
            for vec, els in layers[cnt].values():
                # skip element i
                if cnt + remaining >= p:
                    nxt[cnt].setdefault(key(vec), (vec, els))
                # take element i
                if cnt < p:
                    nv = _add(vec, cols[i])
                    if admit(nv):
                        nxt[cnt + 1].setdefault(key(nv), (nv, els + (i,)))
            cells += len(nxt[cnt])
            _check_budget(cells + len(nxt[cnt + 1]) if cnt < p else cells)
        layers = nxt
    return list(layers[p].values())


def _path_dp(inst: ProblemInstance, key, admit) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    g: Digraph = inst.structure
    order = _topological_order(g)
    incoming: dict[int, list] = {}
    for a in sorted(g.arcs, key=lambda a: a.element):
        incoming.setdefault(a.head, []).append(a)
    cols = _columns(inst)
    zero = (0,) * inst.K
    labels: dict[int, dict] = {g.source: {key(zero): (zero, ())}}
    cells = 1
    for v in order:
        if v == g.source:
            continue
        cell: dict = {}
        for a in incoming.get(v, ()):
            for vec, els in labels.get(a.tail, {}).values():
                nv = _add(vec, cols[a.element])
                if admit(nv):
                    cell.setdefault(key(nv), (nv, els + (a.element,)))
            _check_budget(cells + len(cell))
        if cell:
            labels[v] = cell
            cells += len(cell)
    return list(labels.get(g.sink, {}).values())


def _run(inst, key, admit):
    if inst.kind is ProblemKind.SELECTION:
        return _selection_dp(inst, key, admit)
    return _path_dp(inst, key, admit)


def _stage_count(inst: ProblemInstance) -> int:
    if inst.kind is ProblemKind.SELECTION:
        return inst.n
    g: Digraph = inst.structure
    G = nx.MultiDiGraph()
    G.add_nodes_from(range(g.num_vertices))
    G.add_edges_from((a.tail, a.head) for a in g.arcs)
    reach = nx.descendants(G, g.source) | {g.source}
    return max(1, nx.dag_longest_path_length(G.subgraph(reach)))


# ----------------------------------------------------------------- public API


def exact_vector_query(inst: ProblemInstance, v: Sequence[int]) -> Solution | None:
    """A solution whose cost vector is exactly ``v``, or ``None``."""
    _check_supported(inst)
    target = tuple(int(x) for x in v)
    if len(target) != inst.K:
        raise ParameterError(f"target vector has length {len(target)}, K = {inst.K}")
    if any(x < 0 for x in target):
        return None

    def admit(vec):
        return all(x <= t for x, t in zip(vec, target))

    for vec, els in _run(inst, lambda vec: vec, admit):
        if vec == target:
            return Solution.of(els)
    return None


def trimming_delta(epsilon: float, stages: int) -> float:
    """Largest cell ratio with ``(1 + delta) ** stages <= 1 + epsilon``."""
    return math.expm1(math.log1p(epsilon) / stages)


def approximate_pareto_set(inst: ProblemInstance, epsilon: float) -> ParetoSet:
    """(1+eps)-Pareto set: every feasible cost vector is covered coordinatewise."""
    if not epsilon > 0:
        raise ParameterError(f"epsilon must be > 0, got {epsilon}")
    _check_supported(inst)
    delta = trimming_delta(epsilon, _stage_count(inst)) * _DELTA_MARGIN
    log_step = math.log1p(delta)

    def key(vec):
        return tuple(-1 if x == 0 else int(math.log(x) / log_step) for x in vec)

    states = _run(inst, key, lambda vec: True)
    if not states:
        raise InfeasibleError("instance has no feasible solution")
    members = _pareto_filter(states)
    return ParetoSet(tuple(CostVector(vec, Solution.of(els)) for vec, els in members), float(epsilon))


def _pareto_filter(states):
    """Drop duplicate and weakly dominated vectors, keeping first occurrences."""
    uniq: dict[tuple[int, ...], tuple[int, ...]] = {}
    for vec, els in states:
        uniq.setdefault(vec, els)
    vecs = sorted(uniq, key=lambda v: (sum(v), v))
    kept: list[tuple[int, ...]] = []
    for vec in vecs:
        if not any(all(a <= b for a, b in zip(k, vec)) for k in kept):
            kept.append(vec)
    return [(vec, uniq[vec]) for vec in kept]


def fptas_min_owa(inst: ProblemInstance, w: WeightVector, epsilon: float) -> AlgorithmReport:
    """Minimum-OWA member of the (1+eps)-Pareto set; within 1+eps of optimal."""
    started = time.perf_counter()
    if w.K != inst.K:
        raise ParameterError(f"weights have length {w.K}, K = {inst.K}")
    pset = approximate_pareto_set(inst, epsilon)
    values = np.array([owa_value(m.values, w) for m in pset.members])
    best = pset.members[int(np.argmin(values))]
    return _report("fptas", inst, best.solution, w, Certificate(1.0 + epsilon, "fptas"), started)
