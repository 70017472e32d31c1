"""The five deterministic problems: structures, feasibility, exact solvers, enumeration.

Every combinatorial object is a subset of the ground set ``{0, ..., n-1}``.
For graph problems each arc/edge carries its ground-set element index, so
parallel arcs are ordinary distinct elements.

Deterministic tie-breaking of :func:`solve_deterministic`:

* selection: elements sorted by ``(cost, index)``, first ``p`` taken;
* shortest path: Dijkstra, heap keyed ``(distance, vertex)``, arcs relaxed in
  element order, labels replaced only on strict improvement;
* spanning tree: Kruskal over ``(cost, element)``;
* assignment: parallel edges collapsed to the cheapest (lowest element on
  ties), then ``scipy.optimize.linear_sum_assignment``;
* s-t cut: max-flow/min-cut from ``networkx``, source side taken as returned.
"""

from __future__ import annotations

import enum
import heapq
import itertools
from dataclasses import dataclass, field
from typing import Any, Iterator, Mapping, Sequence

import networkx as nx
import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import EnumerationTooLarge, InfeasibleError, ParameterError
from .owa import ScenarioSet, Solution, WeightVector

DEFAULT_LIMIT = 5000


class ProblemKind(enum.Enum):
    SHORTEST_PATH = "shortest-path"
    SPANNING_TREE = "spanning-tree"
    SELECTION = "selection"
    ASSIGNMENT = "assignment"
    ST_CUT = "st-cut"


@dataclass(frozen=True)
class Arc:
    tail: int
    head: int
    element: int


@dataclass(frozen=True)
class Digraph:
    """Directed multigraph with designated source and sink (paths and cuts)."""

    num_vertices: int
    arcs: tuple[Arc, ...]
    source: int
    sink: int


@dataclass(frozen=True)
class Graph:
    """Undirected multigraph; ``Arc.tail``/``Arc.head`` are the two endpoints."""

    num_vertices: int
    edges: tuple[Arc, ...]


@dataclass(frozen=True)
class Cardinality:
    p: int


@dataclass(frozen=True)
class Bipartite:
    """Bipartite multigraph with ``size`` vertices per side; tail is left, head is right."""

    size: int
    edges: tuple[Arc, ...]


Structure = Digraph | Graph | Cardinality | Bipartite

_STRUCTURE = {
    ProblemKind.SHORTEST_PATH: Digraph,
    ProblemKind.ST_CUT: Digraph,
    ProblemKind.SPANNING_TREE: Graph,
    ProblemKind.SELECTION: Cardinality,
    ProblemKind.ASSIGNMENT: Bipartite,
}


@dataclass(frozen=True)
class ProblemInstance:
    kind: ProblemKind
    structure: Structure
    scenarios: ScenarioSet
    scale: int = 0
    weights: WeightVector | None = None
    metadata: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        kind = ProblemKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if not isinstance(self.structure, _STRUCTURE[kind]):
            raise ParameterError(f"{kind.value} needs a {_STRUCTURE[kind].__name__} structure")
        if self.scale < 0:
            raise ParameterError("scale must be a nonnegative power of ten")
        if self.weights is not None and self.weights.K != self.K:
            raise ParameterError(f"weights have length {self.weights.K}, K={self.K}")
        n = self.n
        s = self.structure
        if isinstance(s, Cardinality):
            if not 0 < s.p <= n:
                raise ParameterError(f"selection needs 0 < p <= n, got p={s.p}, n={n}")
            return
        links = _links(s)
        elements = sorted(a.element for a in links)
        if elements != list(range(n)):
            raise ParameterError(
                f"structure must use every element index 0..{n - 1} exactly once"
            )
        nv = s.size if isinstance(s, Bipartite) else s.num_vertices
        for a in links:
            if not (0 <= a.tail < nv and 0 <= a.head < nv):
                raise ParameterError(f"arc {a} has an endpoint outside 0..{nv - 1}")
        if isinstance(s, Digraph):
            if not (0 <= s.source < nv and 0 <= s.sink < nv) or s.source == s.sink:
                raise ParameterError("source and sink must be distinct vertices")

    @property
    def n(self) -> int:
        return self.scenarios.n

    @property
    def K(self) -> int:
        return self.scenarios.K

    def with_scenarios(self, scenarios: ScenarioSet) -> ProblemInstance:
        return ProblemInstance(self.kind, self.structure, scenarios, self.scale, None, dict(self.metadata))

    def is_feasible(self, X: Solution) -> bool:
        return is_feasible(self, X)


def _links(s: Structure) -> tuple[Arc, ...]:
    if isinstance(s, Digraph):
        return s.arcs
    if isinstance(s, (Graph, Bipartite)):
        return s.edges
    return ()


class _DSU:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[max(ra, rb)] = min(ra, rb)
        return True


# ---------------------------------------------------------------- feasibility


def is_feasible(inst: ProblemInstance, X: Solution) -> bool:
    """Membership of ``X`` in the feasible set of ``inst``."""
    els = X.elements
    if els and els[-1] >= inst.n:
        return False
    s = inst.structure
    kind = inst.kind
    if kind is ProblemKind.SELECTION:
        return len(els) == s.p
    chosen = set(els)
    if kind is ProblemKind.SHORTEST_PATH:
        return _is_path(s, chosen)
    if kind is ProblemKind.SPANNING_TREE:
        return _is_tree(s, chosen)
    if kind is ProblemKind.ASSIGNMENT:
        return _is_matching(s, chosen)
    return _is_cut(s, chosen)


def _is_path(g: Digraph, chosen: set[int]) -> bool:
    arcs = [a for a in g.arcs if a.element in chosen]
    out: dict[int, list[Arc]] = {}
    indeg: dict[int, int] = {}
    for a in arcs:
        out.setdefault(a.tail, []).append(a)
        indeg[a.head] = indeg.get(a.head, 0) + 1
    if not arcs:
        return False
    v = g.source
    seen = {v}
    used = 0
    if indeg.get(g.source, 0):
        return False
    while v != g.sink:
        nxt = out.get(v, [])
        if len(nxt) != 1:
            return False
        v = nxt[0].head
        if v in seen or indeg.get(v, 0) != 1:
            return False
        seen.add(v)
        used += 1
    return used == len(arcs) and not out.get(g.sink)


def _is_tree(g: Graph, chosen: set[int]) -> bool:
    edges = [e for e in g.edges if e.element in chosen]
    if len(edges) != g.num_vertices - 1:
        return False
    dsu = _DSU(g.num_vertices)
    return all(dsu.union(e.tail, e.head) for e in edges)


def _is_matching(g: Bipartite, chosen: set[int]) -> bool:
    edges = [e for e in g.edges if e.element in chosen]
    if len(edges) != g.size:
        return False
    return len({e.tail for e in edges}) == g.size and len({e.head for e in edges}) == g.size


def _is_cut(g: Digraph, chosen: set[int]) -> bool:
    # Smallest candidate source side: closure of {s} and all tails of chosen arcs
    # under the non-chosen arcs.  Any valid source side contains it.
    side = {g.source} | {a.tail for a in g.arcs if a.element in chosen}
    succ: dict[int, list[int]] = {}
    for a in g.arcs:
        if a.element not in chosen:
            succ.setdefault(a.tail, []).append(a.head)
    stack = list(side)
    while stack:
        u = stack.pop()
        for v in succ.get(u, ()):
            if v not in side:
                side.add(v)
                stack.append(v)
    if g.sink in side:
        return False
    return all(a.head not in side for a in g.arcs if a.element in chosen)


# ------------------------------------------------------ deterministic solvers


def solve_deterministic(inst: ProblemInstance, costs: Sequence[float]) -> Solution:
    """Exact minimiser of ``sum(costs[i] for i in X)`` over the feasible set."""
    c = [float(x) for x in costs]
    if len(c) != inst.n:
        raise ParameterError(f"expected {inst.n} costs, got {len(c)}")
    if any(x < 0 for x in c):
        raise ParameterError("deterministic costs must be nonnegative")
    s = inst.structure
    kind = inst.kind
    if kind is ProblemKind.SELECTION:
        return Solution.of(sorted(range(inst.n), key=lambda i: (c[i], i))[: s.p])
    if kind is ProblemKind.SHORTEST_PATH:
        return _dijkstra(s, c)
    if kind is ProblemKind.SPANNING_TREE:
        return _kruskal(s, c)
    if kind is ProblemKind.ASSIGNMENT:
        return _assignment(s, c)
    return _min_cut(s, c)


def _dijkstra(g: Digraph, c: list[float]) -> Solution:
    out: list[list[Arc]] = [[] for _ in range(g.num_vertices)]
    for a in sorted(g.arcs, key=lambda a: a.element):
        out[a.tail].append(a)
    dist = [float("inf")] * g.num_vertices
    pred: list[Arc | None] = [None] * g.num_vertices
    dist[g.source] = 0.0
    heap = [(0.0, g.source)]
    done = [False] * g.num_vertices
    while heap:
        d, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        if u == g.sink:
            break
        for a in out[u]:
            nd = d + c[a.element]
            if nd < dist[a.head] and not done[a.head]:
                dist[a.head] = nd
                pred[a.head] = a
                heapq.heappush(heap, (nd, a.head))
    if not done[g.sink]:
        raise InfeasibleError("sink is not reachable from source")
    path = []
    v = g.sink
    while v != g.source:
        a = pred[v]
        path.append(a.element)
        v = a.tail
    return Solution.of(path)


def _kruskal(g: Graph, c: list[float]) -> Solution:
    dsu = _DSU(g.num_vertices)
    tree = []
    for e in sorted(g.edges, key=lambda e: (c[e.element], e.element)):
        if dsu.union(e.tail, e.head):
            tree.append(e.element)
    if len(tree) != g.num_vertices - 1:
        raise InfeasibleError("graph is not connected")
    return Solution.of(tree)


def _assignment(g: Bipartite, c: list[float]) -> Solution:
    m = g.size
    best: dict[tuple[int, int], int] = {}
    for e in g.edges:
        key = (e.tail, e.head)
        cur = best.get(key)
        if cur is None or (c[e.element], e.element) < (c[cur], cur):
            best[key] = e.element
    matrix = np.full((m, m), np.inf)
    for (i, j), el in best.items():
        matrix[i, j] = c[el]
    try:
        rows, cols = linear_sum_assignment(matrix)
    except ValueError as exc:
        raise InfeasibleError("no perfect matching exists") from exc
    return Solution.of(best[(int(i), int(j))] for i, j in zip(rows, cols))


def _min_cut(g: Digraph, c: list[float]) -> Solution:
    G = nx.DiGraph()
    G.add_nodes_from(range(g.num_vertices))
    for a in g.arcs:
        if a.tail == a.head:
            continue
        if G.has_edge(a.tail, a.head):
            G[a.tail][a.head]["capacity"] += c[a.element]
        else:
            G.add_edge(a.tail, a.head, capacity=c[a.element])
    _, (side, _) = nx.minimum_cut(G, g.source, g.sink)
    return Solution.of(a.element for a in g.arcs if a.tail in side and a.head not in side)


def solution_value(X: Solution, costs: Sequence[float]) -> float:
    return sum(costs[i] for i in X)


# ---------------------------------------------------------------- enumeration


def iter_feasible(inst: ProblemInstance) -> Iterator[Solution]:
    """Yield every feasible solution exactly once (no size bound)."""
    s = inst.structure
    kind = inst.kind
    if kind is ProblemKind.SELECTION:
        for combo in itertools.combinations(range(inst.n), s.p):
            yield Solution(combo)
    elif kind is ProblemKind.SHORTEST_PATH:
        yield from _iter_paths(s)
    elif kind is ProblemKind.SPANNING_TREE:
        yield from _iter_trees(s)
    elif kind is ProblemKind.ASSIGNMENT:
        yield from _iter_matchings(s)
    else:
        yield from _iter_cuts(s)


def enumerate_feasible(inst: ProblemInstance, limit: int = DEFAULT_LIMIT) -> list[Solution]:
    """All feasible solutions; raises :class:`EnumerationTooLarge` beyond ``limit``."""
    out = []
    for X in iter_feasible(inst):
        if len(out) >= limit:
            raise EnumerationTooLarge(f"more than {limit} feasible solutions")
        out.append(X)
    return out


def count_feasible(inst: ProblemInstance, limit: int = DEFAULT_LIMIT) -> int | None:
    """``|Phi|`` if it is at most ``limit``, else ``None``."""
    try:
        return len(enumerate_feasible(inst, limit))
    except EnumerationTooLarge:
        return None


def _iter_paths(g: Digraph) -> Iterator[Solution]:
    out: list[list[Arc]] = [[] for _ in range(g.num_vertices)]
    for a in sorted(g.arcs, key=lambda a: a.element):
        out[a.tail].append(a)
    # vertices that can reach the sink, to avoid dead-end branches
    rev: list[list[int]] = [[] for _ in range(g.num_vertices)]
    for a in g.arcs:
        rev[a.head].append(a.tail)
    alive = {g.sink}
    stack = [g.sink]
    while stack:
        v = stack.pop()
        for u in rev[v]:
            if u not in alive:
                alive.add(u)
                stack.append(u)
    if g.source not in alive:
        return
    path: list[int] = []
    on_path = {g.source}

    def walk(u):
        if u == g.sink:
            yield Solution.of(path)
            return
        for a in out[u]:
            v = a.head
            if v in on_path or v not in alive:
                continue
            on_path.add(v)
            path.append(a.element)
            yield from walk(v)
            path.pop()
            on_path.discard(v)

    yield from walk(g.source)


def _connected(nv: int, edges: Sequence[Arc]) -> bool:
    dsu = _DSU(nv)
    comps = nv
    for e in edges:
        if dsu.union(e.tail, e.head):
            comps -= 1
    return comps == 1


def _iter_trees(g: Graph) -> Iterator[Solution]:
    edges = sorted((e for e in g.edges if e.tail != e.head), key=lambda e: e.element)
    need = g.num_vertices - 1
    if not _connected(g.num_vertices, edges):
        return

    def rec(i, chosen):
        if len(chosen) == need:
            yield Solution.of(e.element for e in chosen)
            return
        if i == len(edges):
            return
        e = edges[i]
        dsu = _DSU(g.num_vertices)
        for f in chosen:
            dsu.union(f.tail, f.head)
        if dsu.find(e.tail) != dsu.find(e.head):
            chosen.append(e)
            yield from rec(i + 1, chosen)
            chosen.pop()
        # skipping e must leave the graph connectable
        if _connected(g.num_vertices, chosen + edges[i + 1:]):
            yield from rec(i + 1, chosen)

    yield from rec(0, [])


def _iter_matchings(g: Bipartite) -> Iterator[Solution]:
    by_left: list[list[Arc]] = [[] for _ in range(g.size)]
    for e in sorted(g.edges, key=lambda e: e.element):
        by_left[e.tail].append(e)
    used = [False] * g.size
    chosen: list[int] = []

    def rec(i):
        if i == g.size:
            yield Solution.of(chosen)
            return
        for e in by_left[i]:
            if not used[e.head]:
                used[e.head] = True
                chosen.append(e.element)
                yield from rec(i + 1)
                chosen.pop()
                used[e.head] = False

    yield from rec(0)


MAX_CUT_FREE_VERTICES = 24


def _iter_cuts(g: Digraph) -> Iterator[Solution]:
    free = [v for v in range(g.num_vertices) if v not in (g.source, g.sink)]
    if len(free) > MAX_CUT_FREE_VERTICES:
        raise EnumerationTooLarge(f"2^{len(free)} vertex bipartitions")
    seen: set[tuple[int, ...]] = set()
    for mask in range(1 << len(free)):
        side = {g.source} | {v for b, v in enumerate(free) if mask >> b & 1}
        X = Solution.of(a.element for a in g.arcs if a.tail in side and a.head not in side)
        if X.elements not in seen:
            seen.add(X.elements)
            yield X
