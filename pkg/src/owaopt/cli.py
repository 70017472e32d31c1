"""Command-line front end: ``owaopt solve | gen | eval | bench``.

Exit codes: 0 success, 1 bench rows failed or violated a certificate,
2 infeasible instance or solution, 3 bad parameters or malformed input.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any

import numpy as np

from . import algorithms as alg
from .errors import (
    BudgetError,
    CapabilityError,
    DimensionError,
    EnumerationTooLarge,
    InfeasibleError,
    OwaError,
    ParameterError,
    ParseError,
)
from .instances import (
    Formula,
    gen_hurwicz_lift,
    gen_min3sat_gadget,
    gen_partition_gadget,
    gen_random,
    gen_tight_selection,
    random_formula,
    read_formula,
    read_instance,
    write_instance,
)
from .owa import (
    TOL,
    Solution,
    WeightKind,
    WeightVector,
    classify_weights,
    evaluate,
    preset_weights,
)
from .pareto import fptas_min_owa
from .problems import DEFAULT_LIMIT, ProblemInstance, count_feasible

EXIT_OK, EXIT_FAILED, EXIT_INFEASIBLE, EXIT_PARAM = 0, 1, 2, 3

ALGORITHMS = (
    "bruteforce",
    "min-average",
    "min-min",
    "minmax-aggregate",
    "two-scenario",
    "aggregate",
    "hurwicz-top2",
    "hurwicz-minmax",
    "quantile-enum",
    "fptas",
)


# ------------------------------------------------------------------ weights


def parse_weights(spec: str | None, K: int, default: WeightVector | None = None) -> WeightVector:
    """``preset:<name>[:param]``, ``file:<path>`` or an inline comma list."""
    if spec is None:
        if default is None:
            raise ParameterError("no --weights given and the instance carries none")
        return default
    if spec.startswith("preset:"):
        parts = spec.split(":")
        name = parts[1]
        try:
            kind = WeightKind(name)
        except ValueError:
            raise ParameterError(f"unknown preset {name!r}") from None
        param = None
        if len(parts) > 2:
            try:
                param = float(parts[2])
            except ValueError:
                raise ParameterError(f"bad preset parameter {parts[2]!r}") from None
            if kind is WeightKind.QUANTILE:
                param = int(param) if param == int(param) else param
        return preset_weights(kind, K, param)
    if spec.startswith("file:"):
        text = Path(spec[5:]).read_text(encoding="utf-8")
        try:
            values = json.loads(text)
        except json.JSONDecodeError:
            values = [float(tok) for tok in text.replace(",", " ").split()]
        spec_values = values
    else:
        try:
            spec_values = [float(tok) for tok in spec.split(",") if tok.strip()]
        except ValueError:
            raise ParameterError(f"bad weight list {spec!r}") from None
    w = WeightVector(tuple(float(x) for x in spec_values))
    if w.K != K:
        raise DimensionError(f"weights have length {w.K}, instance has K = {K}")
    return w


# --------------------------------------------------------------- algorithms


def _alpha_from(w: WeightVector, alpha: float | None) -> float:
    if alpha is not None:
        return alpha
    wc = classify_weights(w)
    if wc.kind is WeightKind.HURWICZ:
        return wc.alpha
    if wc.kind is WeightKind.MAXIMUM:
        return 1.0
    if wc.kind is WeightKind.MINIMUM:
        return 0.0
    if w.K == 2:
        return w[0]
    raise ParameterError(f"--alpha required: weights are {wc}, not Hurwicz")


def _k_from(w: WeightVector, k: int | None) -> int:
    if k is not None:
        return k
    wc = classify_weights(w)
    if wc.kind is WeightKind.QUANTILE:
        return wc.k
    if wc.kind is WeightKind.MEDIAN:
        return w.K // 2 + 1
    if wc.kind is WeightKind.MAXIMUM:
        return 1
    if wc.kind is WeightKind.MINIMUM:
        return w.K
    raise ParameterError(f"--k required: weights are {wc}, not a quantile")


def _inner(name: str, limit: int):
    if name == "aggregate":
        return alg.solve_minmax_aggregate
    if name == "bruteforce":
        return alg.minmax_bruteforce(limit)
    raise ParameterError(f"inner solver must be 'aggregate' or 'bruteforce', got {name!r}")


def run_algorithm(name: str, inst: ProblemInstance, w: WeightVector, params: dict[str, Any]) -> alg.AlgorithmReport:
    """Dispatch by CLI name; ``params`` may hold alpha, k, epsilon, inner, oracle_limit."""
    limit = int(params.get("oracle_limit") or DEFAULT_LIMIT)
    alpha = params.get("alpha")
    k = params.get("k")
    if name == "bruteforce":
        return alg.brute_force_owa(inst, w, limit)
    if name == "min-average":
        return alg.solve_min_average(inst)
    if name == "min-min":
        return alg.solve_min_min(inst)
    if name == "minmax-aggregate":
        return alg.solve_minmax_aggregate(inst)
    if name == "two-scenario":
        return alg.solve_two_scenario_owa(inst, _alpha_from(w, alpha))
    if name == "aggregate":
        return alg.solve_owa_aggregate(inst, w)
    if name == "hurwicz-top2":
        return alg.solve_hurwicz_top2(inst, _alpha_from(w, alpha))
    if name == "hurwicz-minmax":
        return alg.solve_hurwicz_via_minmax(inst, _alpha_from(w, alpha), _inner(params.get("inner") or "aggregate", limit))
    if name == "quantile-enum":
        return alg.solve_quantile_enum(inst, _k_from(w, k), _inner(params.get("inner") or "aggregate", limit))
    if name == "fptas":
        eps = params.get("epsilon")
        return fptas_min_owa(inst, w, 0.1 if eps is None else float(eps))
    raise ParameterError(f"unknown algorithm {name!r}; choose from {', '.join(ALGORITHMS)}")


def reconcile(report: alg.AlgorithmReport, inst: ProblemInstance, w: WeightVector) -> tuple[float, tuple[int, ...], alg.Certificate | None, str | None]:
    """Re-evaluate under the requested weights; drop certificates that do not apply."""
    owa, sc = evaluate(inst, report.solution, w)
    if not report.weights.isclose(w):
        warning = f"{report.algorithm} targets weights {classify_weights(report.weights)}, not {classify_weights(w)}: no certificate"
        return owa, sc, None, warning
    if report.certificate is None:
        return owa, sc, None, f"{report.algorithm} has no certificate for {classify_weights(w)} weights"
    return owa, sc, report.certificate, None


def _fmt(x: float | None) -> str:
    if x is None:
        return ""
    return format(x, ".12g")


# -------------------------------------------------------------------- solve


def cmd_solve(args) -> int:
    inst = read_instance(args.instance)
    w = parse_weights(args.weights, inst.K, inst.weights)
    params = {"alpha": args.alpha, "k": args.k, "epsilon": args.epsilon, "inner": args.inner, "oracle_limit": args.oracle_limit}
    report = run_algorithm(args.algo, inst, w, params)
    owa, sc, cert, warning = reconcile(report, inst, w)
    if warning:
        print(f"warning: {warning}", file=sys.stderr)
    out = sys.stdout
    print(f"algorithm: {report.algorithm}", file=out)
    print(f"weights: {classify_weights(w)}", file=out)
    print(f"solution: {' '.join(map(str, report.solution.elements))}", file=out)
    print(f"scenario_costs: {' '.join(map(str, sc))}", file=out)
    print(f"owa: {_fmt(owa)}", file=out)
    if cert is None:
        print("certificate: none", file=out)
    else:
        print(f"certificate: {_fmt(cert.ratio)} ({cert.basis})", file=out)
    print(f"elapsed_ms: {report.elapsed * 1000:.3f}", file=out)
    return EXIT_OK


def cmd_eval(args) -> int:
    inst = read_instance(args.instance)
    w = parse_weights(args.weights, inst.K, inst.weights)
    try:
        X = Solution.of(int(tok) for tok in args.solution.replace(",", " ").split())
    except ValueError:
        raise ParameterError(f"bad solution list {args.solution!r}") from None
    owa, sc = evaluate(inst, X, w)
    print(f"solution: {' '.join(map(str, X.elements))}")
    print(f"scenario_costs: {' '.join(map(str, sc))}")
    print(f"owa: {_fmt(owa)}")
    return EXIT_OK


# ---------------------------------------------------------------------- gen


def _int_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.replace(",", " ").split()]
    except ValueError:
        raise ParameterError(f"bad integer list {text!r}") from None


def build_generated(name: str, params: dict[str, Any], seed: int = 0) -> tuple[ProblemInstance, WeightVector | None]:
    """Instance from a generator name and keyword parameters."""
    p = dict(params)
    if name == "tight-selection":
        return gen_tight_selection(int(p["K"])), None
    if name == "partition":
        A = p["A"] if isinstance(p["A"], list) else _int_list(str(p["A"]))
        return gen_partition_gadget(A, p.get("kind", "shortest-path")), None
    if name == "min3sat":
        if "formula" in p:
            formula = read_formula(p["formula"])
        elif "clauses" in p:
            clauses = tuple(tuple(c) for c in p["clauses"])
            nv = int(p.get("num_vars", max(abs(l) for c in clauses for l in c)))
            formula = Formula(nv, clauses)
        else:
            formula = random_formula(int(p["num_vars"]), int(p["m"]), np.random.default_rng(seed))
        inst, w = gen_min3sat_gadget(formula, int(p["L"]), p.get("variant", "nondecreasing"), int(p.get("rho", 2)), p.get("kind", "shortest-path"))
        return inst, w
    if name == "lift":
        if "instance" in p:
            base = read_instance(p["instance"])
        else:
            base, _ = build_generated(p["base"]["generator"], p["base"].get("params", {}), seed)
        return gen_hurwicz_lift(base), None
    if name == "random":
        shape = {k: v for k, v in p.items() if k not in ("kind", "K", "cost_max", "seed")}
        return gen_random(p["kind"], int(p["K"]), int(p.get("cost_max", 20)), int(p.get("seed", seed)), **shape), None
    raise ParameterError(f"unknown generator {name!r}")


def cmd_gen(args) -> int:
    params: dict[str, Any] = {}
    if args.generator == "tight-selection":
        if args.K is None:
            raise ParameterError("tight-selection needs --K")
        params["K"] = args.K
    elif args.generator == "partition":
        if args.a is None:
            raise ParameterError("partition needs --a")
        params = {"A": _int_list(args.a), "kind": args.kind or "shortest-path"}
    elif args.generator == "min3sat":
        if args.formula is None or args.L is None:
            raise ParameterError("min3sat needs --formula and --L")
        params = {"formula": args.formula, "L": args.L, "variant": args.variant, "rho": args.rho, "kind": args.kind or "shortest-path"}
    elif args.generator == "lift":
        if args.instance is None:
            raise ParameterError("lift needs --instance")
        params = {"instance": args.instance}
    else:
        if args.kind is None or args.K is None:
            raise ParameterError("random needs --kind and --K")
        params = {"kind": args.kind, "K": args.K, "cost_max": args.cost_max, "seed": args.seed}
        for key in ("n", "p", "layers", "width", "density", "vertices", "extra", "size", "arcs"):
            val = getattr(args, key)
            if val is not None:
                params[key] = val
    inst, w = build_generated(args.generator, params, args.seed)
    if w is not None and inst.weights is None:
        inst = ProblemInstance(inst.kind, inst.structure, inst.scenarios, inst.scale, w, inst.metadata)
    if args.out is None:
        raise ParameterError("--out is required")
    write_instance(args.out, inst)
    print(f"wrote {args.out}: kind={inst.kind.value} n={inst.n} K={inst.K}")
    return EXIT_OK


# -------------------------------------------------------------------- bench


@dataclass
class BenchRow:
    instance_id: str
    kind: str
    n: int
    K: int
    weight_class: str
    algorithm: str
    owa: str
    oracle: str
    observed_ratio: str
    certified_ratio: str
    elapsed_ms: str
    seed: str


BENCH_COLUMNS = tuple(f.name for f in fields(BenchRow))


def _expand(params: dict[str, Any]) -> list[dict[str, Any]]:
    """Grid over list-valued parameters (``A`` and ``clauses`` are literal lists)."""
    literal = {"A", "clauses"}
    keys = sorted(params)
    axes = [params[k] if isinstance(params[k], list) and k not in literal else [params[k]] for k in keys]
    return [dict(zip(keys, combo)) for combo in itertools.product(*axes)]


def run_bench(suite: dict[str, Any], oracle_limit: int | None = None) -> tuple[list[BenchRow], list[str], bool]:
    """Evaluate a suite; returns rows, summary lines and whether everything passed."""
    limit = int(oracle_limit or suite.get("oracle_limit", DEFAULT_LIMIT))
    rows: list[BenchRow] = []
    ok = True
    stats: dict[str, list[float]] = {}
    certs: dict[str, float] = {}
    violations = 0
    errors = 0
    for e_idx, entry in enumerate(suite.get("entries", [])):
        gen = entry["generator"]
        count = int(entry.get("count", 1))
        base_seed = int(entry.get("seed", 0))
        algos = entry.get("algorithms", [])
        wspecs = entry.get("weights")
        wspecs = wspecs if isinstance(wspecs, list) else [wspecs]
        aparams = dict(entry.get("algo_params", {}))
        aparams.setdefault("oracle_limit", limit)
        for g_idx, params in enumerate(_expand(entry.get("params", {}))):
            for i in range(count):
                seed = base_seed + i
                label = ",".join(f"{k}={_label(v)}" for k, v in sorted(params.items()))
                iid = f"{gen}[{label}]#{i}" if label else f"{gen}#{i}"
                try:
                    inst, gw = build_generated(gen, {**params, "seed": seed} if gen == "random" else params, seed)
                except OwaError as exc:
                    errors += 1
                    rows.append(BenchRow(iid, "", 0, 0, "", "generate", f"error:{type(exc).__name__}", "", "", "", "", str(seed)))
                    continue
                phi = count_feasible(inst, limit)
                for wspec in wspecs:
                    try:
                        w = parse_weights(wspec, inst.K, gw or inst.weights)
                    except (OwaError, OSError) as exc:
                        errors += 1
                        rows.append(BenchRow(iid, inst.kind.value, inst.n, inst.K, "", "weights", f"error:{type(exc).__name__}", "", "", "", "", str(seed)))
                        continue
                    oracle = None
                    if phi is not None:
                        oracle = alg.brute_force_owa(inst, w, limit).owa
                    for name in algos:
                        row = BenchRow(iid, inst.kind.value, inst.n, inst.K, str(classify_weights(w)), name, "", _fmt(oracle), "", "", "", str(seed))
                        try:
                            report = run_algorithm(name, inst, w, aparams)
                            owa, _, cert, _ = reconcile(report, inst, w)
                        except OwaError as exc:
                            errors += 1
                            row.owa = f"error:{type(exc).__name__}"
                            rows.append(row)
                            continue
                        row.owa = _fmt(owa)
                        row.elapsed_ms = f"{report.elapsed * 1000:.3f}"
                        if cert is not None:
                            row.certified_ratio = _fmt(cert.ratio)
                            certs[name] = max(certs.get(name, 1.0), cert.ratio)
                        observed = None
                        if oracle is not None:
                            if oracle > TOL:
                                observed = owa / oracle
                            elif owa > TOL:
                                observed = float("inf")
                        if observed is not None:
                            row.observed_ratio = _fmt(observed)
                            stats.setdefault(name, []).append(observed)
                            if cert is not None and observed > cert.ratio + 1e-6:
                                violations += 1
                        rows.append(row)
    summary = []
    for name in sorted(stats):
        cert_s = f" (max certified {_fmt(certs[name])})" if name in certs else ""
        summary.append(f"max observed ratio {name}: {_fmt(max(stats[name]))}{cert_s}")
    summary.append(f"rows: {len(rows)}, errors: {errors}, certificate violations: {violations}")
    ok = errors == 0 and violations == 0
    return rows, summary, ok


def _label(v: Any) -> str:
    if isinstance(v, list):
        return "-".join(_label(x) for x in v)
    return str(v)


def format_rows(rows: list[BenchRow], fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(BENCH_COLUMNS)
        for r in rows:
            writer.writerow(asdict(r).values())
        return buf.getvalue()
    if fmt == "markdown":
        lines = ["| " + " | ".join(BENCH_COLUMNS) + " |", "|" + "---|" * len(BENCH_COLUMNS)]
        for r in rows:
            lines.append("| " + " | ".join(str(v) for v in asdict(r).values()) + " |")
        return "\n".join(lines) + "\n"
    raise ParameterError(f"format must be csv or markdown, got {fmt!r}")


def cmd_bench(args) -> int:
    if args.suite is None:
        raise ParameterError("bench needs --suite")
    try:
        suite = json.loads(Path(args.suite).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno) from None
    rows, summary, ok = run_bench(suite, args.oracle_limit)
    text = format_rows(rows, args.format)
    if args.format == "markdown":
        text += "\n" + "\n".join(f"- {s}" for s in summary) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    for line in summary:
        print(line, file=sys.stderr if not args.out else sys.stdout)
    return EXIT_OK if ok else EXIT_FAILED


# --------------------------------------------------------------------- main


class _Parser(argparse.ArgumentParser):
    # usage errors are parameter errors, not the infeasibility code argparse uses
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARAM, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="owaopt", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, instance_required=True):
        p.add_argument("--instance", required=instance_required)
        p.add_argument("--weights", help="preset:<name>[:param], file:<path> or comma list")
        p.add_argument("--oracle-limit", type=int, default=DEFAULT_LIMIT)

    p = sub.add_parser("solve", help="run one algorithm on an instance file")
    common(p)
    p.add_argument("--algo", required=True, choices=ALGORITHMS)
    p.add_argument("--alpha", type=float)
    p.add_argument("--k", type=int)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--inner", choices=("aggregate", "bruteforce"), default="aggregate")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("eval", help="evaluate a given solution")
    common(p)
    p.add_argument("--solution", required=True, help="comma-separated element indices")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("gen", help="write a generated instance file")
    p.add_argument("generator", choices=("tight-selection", "partition", "min3sat", "lift", "random"))
    p.add_argument("--out")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--K", type=int)
    p.add_argument("--a", help="partition integers, comma-separated")
    p.add_argument("--kind")
    p.add_argument("--formula", help="clause file, one clause of signed integers per line")
    p.add_argument("--L", type=int)
    p.add_argument("--variant", default="nondecreasing", choices=("nondecreasing", "median", "positive"))
    p.add_argument("--rho", type=int, default=2)
    p.add_argument("--instance")
    p.add_argument("--cost-max", type=int, default=20)
    for name, typ in (("n", int), ("p", int), ("layers", int), ("width", int), ("density", float),
                      ("vertices", int), ("extra", int), ("size", int), ("arcs", int)):
        p.add_argument(f"--{name}", type=typ)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="run a benchmark suite against the brute-force oracle")
    p.add_argument("--suite", required=True)
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "markdown"), default="csv")
    p.add_argument("--oracle-limit", type=int)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InfeasibleError as exc:
        print(f"error: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ParameterError, DimensionError, ParseError, CapabilityError, BudgetError, EnumerationTooLarge, KeyError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PARAM
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAM


if __name__ == "__main__":
    sys.exit(main())
