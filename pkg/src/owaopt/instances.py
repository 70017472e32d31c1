"""Instance generators (hardness gadgets and random families) and the file format.

Two-choice gadgets
------------------
The Partition and Min 3-SAT reductions both need a structure in which every
feasible solution picks exactly one of two "choice" elements ``e_i`` or
``f_i`` per stage ``i``, plus zero-cost dummies.  :func:`choice_gadget`
builds it for each problem kind:

* shortest-path / spanning-tree: vertices ``u_i, v_i`` per stage with ``e_i``
  and ``f_i`` parallel from ``u_i`` to ``v_i`` and a dummy ``v_i -> u_{i+1}``;
  ``s = u_1``, ``t = v_n``.  Element order: ``e_1..e_n, f_1..f_n, dummies``.
* st-cut: ``s -> x_i`` is ``e_i`` and ``x_i -> t`` is ``f_i``; placing ``x_i``
  on the sink side cuts ``e_i``, on the source side cuts ``f_i``.
* assignment: one 2x2 block per stage; ``e_i`` and ``f_i`` leave the same
  left vertex, the two dummies cover the other left vertex.

In every variant all feasible solutions have the same cardinality.

File format
-----------
JSON object with keys ``kind, n, K, scale, structure, costs`` and optional
``weights`` and ``metadata``.  Costs are written in original units, i.e.
the stored integer divided by ``10**scale``.  Graph structures list records
``{"from", "to", "element"}``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import ParameterError, ParseError
from .owa import ScenarioSet, WeightKind, WeightVector, preset_weights
from .problems import (
    Arc,
    Bipartite,
    Cardinality,
    Digraph,
    Graph,
    ProblemInstance,
    ProblemKind,
)

# ------------------------------------------------------------------ gadgets


@dataclass(frozen=True)
class ChoiceGadget:
    kind: ProblemKind
    structure: object
    n_elements: int
    e: tuple[int, ...]
    f: tuple[int, ...]
    solution_size: int


def choice_gadget(stages: int, kind: ProblemKind | str = ProblemKind.SHORTEST_PATH) -> ChoiceGadget:
    kind = ProblemKind(kind)
    if stages < 1:
        raise ParameterError("gadget needs at least one stage")
    m = stages
    e = tuple(range(m))
    f = tuple(range(m, 2 * m))
    if kind in (ProblemKind.SHORTEST_PATH, ProblemKind.SPANNING_TREE):
        arcs = []
        for i in range(m):
            u, v = 2 * i, 2 * i + 1
            arcs.append(Arc(u, v, e[i]))
            arcs.append(Arc(u, v, f[i]))
            if i + 1 < m:
                arcs.append(Arc(v, 2 * (i + 1), 2 * m + i))
        arcs.sort(key=lambda a: a.element)
        nv = 2 * m
        if kind is ProblemKind.SHORTEST_PATH:
            structure = Digraph(nv, tuple(arcs), 0, nv - 1)
        else:
            structure = Graph(nv, tuple(arcs))
        return ChoiceGadget(kind, structure, 3 * m - 1, e, f, 2 * m - 1)
    if kind is ProblemKind.ST_CUT:
        arcs = [Arc(0, 2 + i, e[i]) for i in range(m)] + [Arc(2 + i, 1, f[i]) for i in range(m)]
        return ChoiceGadget(kind, Digraph(m + 2, tuple(arcs), 0, 1), 2 * m, e, f, m)
    if kind is ProblemKind.ASSIGNMENT:
        edges = []
        for i in range(m):
            left, left2 = 2 * i, 2 * i + 1
            right, right2 = 2 * i, 2 * i + 1
            edges += [
                Arc(left, right, e[i]),
                Arc(left, right2, f[i]),
                Arc(left2, right2, 2 * m + 2 * i),
                Arc(left2, right, 2 * m + 2 * i + 1),
            ]
        edges.sort(key=lambda a: a.element)
        return ChoiceGadget(kind, Bipartite(2 * m, tuple(edges)), 4 * m, e, f, 2 * m)
    raise ParameterError(f"no two-choice gadget for {kind.value}")


def gen_tight_selection(K: int) -> ProblemInstance:
    """Selection of K out of 2K elements on which aggregation is off by exactly w1*K."""
    if K < 1:
        raise ParameterError("K must be >= 1")
    costs = np.zeros((K, 2 * K), dtype=np.int64)
    costs[K - 1, :K] = 1
    costs[np.arange(K), K + np.arange(K)] = 1
    return ProblemInstance(
        ProblemKind.SELECTION,
        Cardinality(K),
        ScenarioSet(costs),
        metadata={"generator": "tight-selection", "K": K},
    )


def gen_partition_gadget(A: Sequence[int], target_kind: ProblemKind | str = ProblemKind.SHORTEST_PATH) -> ProblemInstance:
    """Two scenarios: ``a_i`` on ``e_i`` under the first, on ``f_i`` under the second."""
    A = [int(a) for a in A]
    if not A or any(a <= 0 for a in A):
        raise ParameterError("partition input must be a nonempty list of positive integers")
    if sum(A) % 2:
        raise ParameterError(f"partition input must have an even total, got {sum(A)}")
    g = choice_gadget(len(A), target_kind)
    costs = np.zeros((2, g.n_elements), dtype=np.int64)
    costs[0, list(g.e)] = A
    costs[1, list(g.f)] = A
    return ProblemInstance(
        g.kind,
        g.structure,
        ScenarioSet(costs),
        metadata={"generator": "partition", "A": list(A)},
    )


# ---------------------------------------------------------------- formulas


@dataclass(frozen=True)
class Formula:
    """CNF-style clause list; literal ``+i`` is ``x_i``, ``-i`` its negation."""

    num_vars: int
    clauses: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if not self.clauses:
            raise ParseError("formula has no clauses")
        for c in self.clauses:
            if not 1 <= len(c) <= 3:
                raise ParseError(f"clause {c} must have 1 to 3 literals")
            if any(lit == 0 or abs(lit) > self.num_vars for lit in c):
                raise ParseError(f"clause {c} uses a literal outside 1..{self.num_vars}")

    @property
    def m(self) -> int:
        return len(self.clauses)

    def satisfied_count(self, assignment: Sequence[bool]) -> int:
        return sum(any(assignment[abs(l) - 1] == (l > 0) for l in c) for c in self.clauses)


def parse_formula(text: str) -> Formula:
    """One clause per line as signed integers; blank lines, ``c``/``#`` comments and a ``p`` header are skipped.

    A trailing ``0`` (DIMACS terminator) is accepted.
    """
    clauses = []
    declared = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line[0] in "c#%":
            continue
        if line.startswith("p"):
            parts = line.split()
            try:
                declared = int(parts[2])
            except (IndexError, ValueError):
                raise ParseError(f"bad header {line!r}", line=lineno) from None
            continue
        try:
            lits = [int(tok) for tok in line.replace(",", " ").split()]
        except ValueError:
            raise ParseError(f"non-integer literal in {line!r}", line=lineno) from None
        if lits and lits[-1] == 0:
            lits = lits[:-1]
        if not 1 <= len(lits) <= 3 or 0 in lits:
            raise ParseError(f"clause must have 1 to 3 nonzero literals, got {line!r}", line=lineno)
        clauses.append(tuple(lits))
    if not clauses:
        raise ParseError("formula has no clauses")
    used = max(abs(l) for c in clauses for l in c)
    return Formula(max(used, declared or 0), tuple(clauses))


def format_formula(formula: Formula) -> str:
    return "".join(" ".join(str(l) for l in c) + "\n" for c in formula.clauses)


def read_formula(path: str | Path) -> Formula:
    return parse_formula(Path(path).read_text(encoding="utf-8"))


def random_formula(num_vars: int, m: int, rng: np.random.Generator, max_len: int = 3) -> Formula:
    clauses = []
    for _ in range(m):
        length = int(rng.integers(1, min(max_len, num_vars) + 1))
        vars_ = rng.choice(num_vars, size=length, replace=False) + 1
        signs = rng.choice([-1, 1], size=length)
        clauses.append(tuple(int(v * s) for v, s in zip(vars_, signs)))
    return Formula(num_vars, tuple(clauses))


MIN3SAT_VARIANTS = ("nondecreasing", "median", "positive")


def gen_min3sat_gadget(
    formula: Formula,
    L: int,
    variant: str = "nondecreasing",
    rho: int = 2,
    target_kind: ProblemKind | str = ProblemKind.SHORTEST_PATH,
) -> tuple[ProblemInstance, WeightVector]:
    """Scenario per clause on the two-choice gadget; choosing ``e_i`` sets ``x_i = 1``.

    * ``nondecreasing``: weights ``0`` on the L largest costs, ``1/(m-L)`` on the rest;
      optimum is 0 iff some assignment satisfies at most L clauses.
    * ``median``: padded with all-one scenarios (``2L <= m``) or all-zero
      scenarios (``2L > m``) so that the median weight sits right after the
      L-th largest clause cost; same 0 / nonzero gap.
    * ``positive``: as ``nondecreasing`` but clause costs are
      ``(P+1)(m-L)*rho`` and all other costs 1, with ``P`` the solution
      cardinality; yes-instances have optimum ``P``, no-instances at least
      ``(P+1)*rho``.
    """
    if variant not in MIN3SAT_VARIANTS:
        raise ParameterError(f"variant must be one of {MIN3SAT_VARIANTS}, got {variant!r}")
    m = formula.m
    if not 0 <= L <= m:
        raise ParameterError(f"L must be in [0, {m}], got {L}")
    g = choice_gadget(formula.num_vars, target_kind)
    rows = np.zeros((m, g.n_elements), dtype=np.int64)
    for j, clause in enumerate(formula.clauses):
        for lit in clause:
            arc = g.e[lit - 1] if lit > 0 else g.f[-lit - 1]
            rows[j, arc] = 1
    meta = {
        "generator": "min3sat",
        "variant": variant,
        "L": L,
        "clauses": [list(c) for c in formula.clauses],
        "num_vars": formula.num_vars,
    }
    if variant == "median":
        if 2 * L <= m:
            pad = np.ones((m - 2 * L, g.n_elements), dtype=np.int64)
            position = m - L + 1
        else:
            pad = np.zeros((2 * L - m, g.n_elements), dtype=np.int64)
            position = L + 1
        rows = np.vstack([rows, pad])
        K = rows.shape[0]
        w = preset_weights(WeightKind.QUANTILE, K, position)
    else:
        if L >= m:
            raise ParameterError(f"{variant} variant needs L < m = {m}")
        K = m
        w = WeightVector(tuple([0.0] * L + [1.0 / (K - L)] * (K - L)))
        if variant == "positive":
            if rho < 1:
                raise ParameterError(f"rho must be >= 1, got {rho}")
            big = (g.solution_size + 1) * (K - L) * int(rho)
            rows = np.where(rows == 1, big, 1)
            meta["rho"] = int(rho)
    inst = ProblemInstance(g.kind, g.structure, ScenarioSet(rows), weights=w, metadata=meta)
    return inst, w


def gen_hurwicz_lift(base: ProblemInstance) -> ProblemInstance:
    """Append an all-zero scenario, turning min-max into Hurwicz(alpha) scaled by alpha."""
    meta = dict(base.metadata)
    meta["lifted"] = int(meta.get("lifted", 0)) + 1
    return ProblemInstance(
        base.kind,
        base.structure,
        base.scenarios.append([0] * base.n),
        base.scale,
        None,
        meta,
    )


# ------------------------------------------------------------------- random


def gen_random(
    kind: ProblemKind | str,
    K: int,
    cost_max: int,
    seed: int,
    **shape,
) -> ProblemInstance:
    """Random instance; equal arguments give identical instances.

    Shapes by kind:

    * selection: ``n``, ``p``
    * shortest-path: ``layers``, ``width``, ``density`` (layered DAG, s/t added)
    * spanning-tree: ``vertices``, ``extra`` (random tree plus extra edges)
    * assignment: ``size``, ``density`` (a hidden perfect matching is always present)
    * st-cut: ``vertices``, ``arcs``
    """
    kind = ProblemKind(kind)
    if K < 1:
        raise ParameterError("K must be >= 1")
    if cost_max < 0:
        raise ParameterError("cost_max must be >= 0")
    rng = np.random.default_rng(seed)
    if kind is ProblemKind.SELECTION:
        n = int(shape.get("n", 8))
        p = int(shape.get("p", max(1, n // 2)))
        structure = Cardinality(p)
    elif kind is ProblemKind.SHORTEST_PATH:
        structure = _random_layered(rng, int(shape.get("layers", 3)), int(shape.get("width", 2)), float(shape.get("density", 0.6)))
        n = len(structure.arcs)
    elif kind is ProblemKind.SPANNING_TREE:
        structure = _random_connected(rng, int(shape.get("vertices", 5)), int(shape.get("extra", 3)))
        n = len(structure.edges)
    elif kind is ProblemKind.ASSIGNMENT:
        structure = _random_bipartite(rng, int(shape.get("size", 3)), float(shape.get("density", 0.6)))
        n = len(structure.edges)
    else:
        structure = _random_digraph(rng, int(shape.get("vertices", 5)), int(shape.get("arcs", 8)))
        n = len(structure.arcs)
    if n < 1:
        raise ParameterError("shape yields an empty ground set")
    costs = rng.integers(0, cost_max + 1, size=(K, n), dtype=np.int64)
    meta = {"generator": "random", "seed": int(seed), **{k: shape[k] for k in sorted(shape)}}
    return ProblemInstance(kind, structure, ScenarioSet(costs), metadata=meta)


def _random_layered(rng, layers: int, width: int, density: float) -> Digraph:
    if layers < 1 or width < 1:
        raise ParameterError("layered DAG needs layers >= 1 and width >= 1")
    s, t = 0, 1
    ids = [[2 + l * width + i for i in range(width)] for l in range(layers)]
    pairs = [(s, v) for v in ids[0]]
    for l in range(layers - 1):
        chosen = set()
        for u in ids[l]:
            for v in ids[l + 1]:
                if rng.random() < density:
                    chosen.add((u, v))
        # every vertex keeps an in- and an out-arc
        for u in ids[l]:
            if not any(a == u for a, _ in chosen):
                chosen.add((u, ids[l + 1][int(rng.integers(width))]))
        for v in ids[l + 1]:
            if not any(b == v for _, b in chosen):
                chosen.add((ids[l][int(rng.integers(width))], v))
        pairs += sorted(chosen)
    pairs += [(v, t) for v in ids[-1]]
    arcs = tuple(Arc(u, v, i) for i, (u, v) in enumerate(pairs))
    return Digraph(2 + layers * width, arcs, s, t)


def _random_connected(rng, vertices: int, extra: int) -> Graph:
    if vertices < 2:
        raise ParameterError("spanning-tree instance needs >= 2 vertices")
    order = rng.permutation(vertices)
    pairs = []
    for i in range(1, vertices):
        pairs.append((int(order[int(rng.integers(i))]), int(order[i])))
    used = {tuple(sorted(p)) for p in pairs}
    others = [(u, v) for u in range(vertices) for v in range(u + 1, vertices) if (u, v) not in used]
    if others and extra > 0:
        pick = rng.choice(len(others), size=min(extra, len(others)), replace=False)
        pairs += [others[int(i)] for i in sorted(pick)]
    return Graph(vertices, tuple(Arc(int(u), int(v), i) for i, (u, v) in enumerate(pairs)))


def _random_bipartite(rng, size: int, density: float) -> Bipartite:
    if size < 1:
        raise ParameterError("assignment instance needs size >= 1")
    perm = rng.permutation(size)
    pairs = {(i, int(perm[i])) for i in range(size)}
    for i in range(size):
        for j in range(size):
            if rng.random() < density:
                pairs.add((i, j))
    return Bipartite(size, tuple(Arc(i, j, e) for e, (i, j) in enumerate(sorted(pairs))))


def _random_digraph(rng, vertices: int, arcs: int) -> Digraph:
    if vertices < 2:
        raise ParameterError("st-cut instance needs >= 2 vertices")
    pairs = [(u, v) for u in range(vertices) for v in range(vertices) if u != v]
    pick = rng.choice(len(pairs), size=min(arcs, len(pairs)), replace=False)
    chosen = [pairs[int(i)] for i in sorted(pick)]
    return Digraph(vertices, tuple(Arc(u, v, e) for e, (u, v) in enumerate(chosen)), 0, vertices - 1)


# -------------------------------------------------------------- file format

_GRAPH_KINDS = (ProblemKind.SHORTEST_PATH, ProblemKind.ST_CUT)


def _structure_doc(inst: ProblemInstance) -> dict:
    s = inst.structure
    if isinstance(s, Cardinality):
        return {"p": s.p}
    if isinstance(s, Digraph):
        return {"vertices": s.num_vertices, "source": s.source, "sink": s.sink, "arcs": _records(s.arcs)}
    if isinstance(s, Graph):
        return {"vertices": s.num_vertices, "edges": _records(s.edges)}
    return {"size": s.size, "edges": _records(s.edges)}


def _records(arcs: Iterable[Arc]) -> list[dict]:
    return [{"from": a.tail, "to": a.head, "element": a.element} for a in arcs]


def _format_cost(c: int, scale: int) -> str:
    if scale == 0:
        return str(c)
    return format(Decimal(c).scaleb(-scale), "f")


def dumps_instance(inst: ProblemInstance) -> str:
    """Serialise deterministically (fixed key order, one record per line)."""
    j = json.dumps
    lines = ["{"]
    fields = [
        ("kind", j(inst.kind.value)),
        ("n", j(inst.n)),
        ("K", j(inst.K)),
        ("scale", j(inst.scale)),
    ]
    sdoc = _structure_doc(inst)
    parts = []
    for key, val in sdoc.items():
        if isinstance(val, list):
            body = ",\n".join("      " + j(r) for r in val)
            parts.append(f'    {j(key)}: [\n{body}\n    ]' if val else f"    {j(key)}: []")
        else:
            parts.append(f"    {j(key)}: {j(val)}")
    fields.append(("structure", "{\n" + ",\n".join(parts) + "\n  }"))
    rows = ",\n".join("    [" + ", ".join(_format_cost(int(c), inst.scale) for c in row) + "]" for row in inst.scenarios.costs)
    fields.append(("costs", "[\n" + rows + "\n  ]"))
    if inst.weights is not None:
        fields.append(("weights", "[" + ", ".join(repr(x) for x in inst.weights) + "]"))
    if inst.metadata:
        fields.append(("metadata", j(dict(inst.metadata), sort_keys=True)))
    lines.append(",\n".join(f"  {j(k)}: {v}" for k, v in fields))
    lines.append("}")
    return "\n".join(lines) + "\n"


def write_instance(path: str | Path, inst: ProblemInstance) -> None:
    Path(path).write_text(dumps_instance(inst), encoding="utf-8")


def _require(doc: dict, key: str, typ, where: str = ""):
    name = f"{where}{key}"
    if key not in doc:
        raise ParseError("missing required field", field=name)
    val = doc[key]
    if typ is int and (isinstance(val, bool) or not isinstance(val, int)):
        raise ParseError(f"expected an integer, got {val!r}", field=name)
    if typ is not int and not isinstance(val, typ):
        raise ParseError(f"expected {typ.__name__}, got {type(val).__name__}", field=name)
    return val


def _parse_arcs(doc: dict, key: str) -> tuple[Arc, ...]:
    recs = _require(doc, key, list, "structure.")
    arcs = []
    for i, r in enumerate(recs):
        where = f"structure.{key}[{i}]."
        if not isinstance(r, dict):
            raise ParseError("expected an object", field=where[:-1])
        arcs.append(Arc(_require(r, "from", int, where), _require(r, "to", int, where), _require(r, "element", int, where)))
    return tuple(arcs)


def loads_instance(text: str) -> ProblemInstance:
    try:
        doc = json.loads(text, parse_float=Decimal)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno) from None
    if not isinstance(doc, dict):
        raise ParseError("top level must be a JSON object")
    kind_s = _require(doc, "kind", str)
    try:
        kind = ProblemKind(kind_s)
    except ValueError:
        raise ParseError(f"unknown kind {kind_s!r}", field="kind") from None
    n = _require(doc, "n", int)
    K = _require(doc, "K", int)
    scale = doc.get("scale", 0)
    if isinstance(scale, bool) or not isinstance(scale, int) or scale < 0:
        raise ParseError(f"scale must be a nonnegative integer, got {scale!r}", field="scale")
    sdoc = _require(doc, "structure", dict)
    if kind is ProblemKind.SELECTION:
        structure = Cardinality(_require(sdoc, "p", int, "structure."))
    elif kind in _GRAPH_KINDS:
        structure = Digraph(
            _require(sdoc, "vertices", int, "structure."),
            _parse_arcs(sdoc, "arcs"),
            _require(sdoc, "source", int, "structure."),
            _require(sdoc, "sink", int, "structure."),
        )
    elif kind is ProblemKind.SPANNING_TREE:
        structure = Graph(_require(sdoc, "vertices", int, "structure."), _parse_arcs(sdoc, "edges"))
    else:
        structure = Bipartite(_require(sdoc, "size", int, "structure."), _parse_arcs(sdoc, "edges"))
    rows = _require(doc, "costs", list)
    if len(rows) != K:
        raise ParseError(f"expected {K} rows, got {len(rows)}", field="costs")
    factor = Decimal(10) ** scale
    costs = []
    for j, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != n:
            raise ParseError(f"expected a list of {n} costs", field=f"costs[{j}]")
        out = []
        for i, c in enumerate(row):
            if isinstance(c, bool) or not isinstance(c, (int, Decimal)):
                raise ParseError(f"expected a number, got {c!r}", field=f"costs[{j}][{i}]")
            try:
                scaled = Decimal(c) * factor
            except InvalidOperation:
                raise ParseError(f"bad number {c!r}", field=f"costs[{j}][{i}]") from None
            if scaled != scaled.to_integral_value() or scaled < 0:
                raise ParseError(
                    f"{c} is not a nonnegative multiple of 10^-{scale}", field=f"costs[{j}][{i}]"
                )
            out.append(int(scaled))
        costs.append(out)
    weights = None
    if "weights" in doc:
        ws = doc["weights"]
        if not isinstance(ws, list):
            raise ParseError("expected a list", field="weights")
        try:
            weights = WeightVector(tuple(float(x) for x in ws))
        except (ParameterError, TypeError, ValueError) as exc:
            raise ParseError(str(exc), field="weights") from None
    meta = doc.get("metadata", {})
    if not isinstance(meta, dict):
        raise ParseError("expected an object", field="metadata")
    meta = json.loads(json.dumps(meta, default=float))
    try:
        return ProblemInstance(kind, structure, ScenarioSet(costs), scale, weights, meta)
    except (ParameterError, ValueError) as exc:
        raise ParseError(str(exc), field="structure") from None


def read_instance(path: str | Path) -> ProblemInstance:
    return loads_instance(Path(path).read_text(encoding="utf-8"))
