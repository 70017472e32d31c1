import json

import numpy as np
import pytest

from owaopt import (
    Formula,
    ParameterError,
    ParseError,
    brute_force_owa,
    enumerate_feasible,
    gen_hurwicz_lift,
    gen_min3sat_gadget,
    gen_partition_gadget,
    gen_random,
    gen_tight_selection,
    parse_formula,
    preset_weights,
    read_instance,
    write_instance,
)
from owaopt.instances import choice_gadget, dumps_instance, format_formula, loads_instance, random_formula

from helpers import KINDS, brute_opt, costs_of, feasible_by_filter, min_satisfied, owa_plain, subset_sum_yes


class TestTightSelection:
    def test_shape(self):
        inst = gen_tight_selection(5)
        assert (inst.n, inst.K, inst.structure.p) == (10, 5, 5)

    def test_rows(self):
        c = gen_tight_selection(3).scenarios.costs.tolist()
        assert c == [[0, 0, 0, 1, 0, 0], [0, 0, 0, 0, 1, 0], [1, 1, 1, 0, 0, 1]]


class TestPartition:
    def test_gadget_paths(self):
        inst = gen_partition_gadget([1, 1, 2])
        assert len(enumerate_feasible(inst)) == 8

    def test_validation(self):
        with pytest.raises(ParameterError):
            gen_partition_gadget([1, 2])
        with pytest.raises(ParameterError):
            gen_partition_gadget([0, 2])

    @pytest.mark.parametrize("A", [[1, 1, 2], [2, 3, 3, 4], [1, 3, 5, 7], [2, 2, 6], [1, 2, 3, 4, 6]])
    @pytest.mark.parametrize("alpha", [0.6, 0.9, 1.0])
    def test_soundness(self, A, alpha):
        S = sum(A) // 2
        opt = brute_force_owa(gen_partition_gadget(A), preset_weights("hurwicz", 2, alpha)).owa
        assert (abs(opt - S) <= 1e-9) == subset_sum_yes(A)
        assert opt >= S - 1e-9

    def test_no_instance_value(self):
        # [2, 2, 6]: best split is 4 vs 6, so opt = alpha*6 + (1-alpha)*4
        opt = brute_force_owa(gen_partition_gadget([2, 2, 6]), preset_weights("hurwicz", 2, 0.75)).owa
        assert opt == pytest.approx(5.5)

    def test_path_tree_transfer(self):
        A = [1, 1, 2]
        sp = gen_partition_gadget(A, "shortest-path")
        st = gen_partition_gadget(A, "spanning-tree")
        trees = {tuple(costs_of(st, X)) for X in enumerate_feasible(st)}
        for X in enumerate_feasible(sp):
            assert tuple(costs_of(sp, X)) in trees
        for alpha in (0.6, 1.0):
            w = preset_weights("hurwicz", 2, alpha)
            assert brute_force_owa(sp, w).owa == pytest.approx(brute_force_owa(st, w).owa)

    @pytest.mark.parametrize("kind", ["st-cut", "assignment"])
    def test_other_targets(self, kind):
        A = [2, 3, 3, 4]
        inst = gen_partition_gadget(A, kind)
        assert brute_force_owa(inst, preset_weights("hurwicz", 2, 0.7)).owa == pytest.approx(6.0)


def test_choice_gadget_spanning_tree_paths():
    g = choice_gadget(3, "spanning-tree")
    assert g.solution_size == 5
    with pytest.raises(ParameterError):
        choice_gadget(0)


class TestFormula:
    def test_parse(self):
        f = parse_formula("c comment\np cnf 3 2\n1 -2 0\n\n3\n")
        assert f == Formula(3, ((1, -2), (3,)))
        assert parse_formula(format_formula(f)).clauses == f.clauses

    @pytest.mark.parametrize("text", ["", "1 2 3 4\n", "1 x\n", "0\n"])
    def test_parse_errors(self, text):
        with pytest.raises(ParseError):
            parse_formula(text)

    def test_line_number(self):
        with pytest.raises(ParseError) as info:
            parse_formula("1 2\n-1 q\n")
        assert info.value.line == 2

    def test_satisfied_count(self):
        f = parse_formula("1 2\n-1\n-2\n")
        assert f.satisfied_count([True, False]) == 2
        assert min_satisfied(f) == 1  # x1 = x2 = true


class TestMin3Sat:
    def test_example_yes(self):
        inst, w = gen_min3sat_gadget(parse_formula("1 2\n-1\n-2\n"), 1)
        assert w.weights == pytest.approx((0, 0.5, 0.5))
        assert inst.n == 5
        rep = brute_force_owa(inst, w)
        assert rep.owa == 0

    def test_example_no(self):
        inst, w = gen_min3sat_gadget(parse_formula("1 2\n-1\n-2\n"), 0)
        assert brute_force_owa(inst, w).owa == pytest.approx(2 / 3)

    @pytest.mark.parametrize("seed", range(25))
    @pytest.mark.parametrize("variant", ["nondecreasing", "median"])
    def test_gap(self, seed, variant):
        rng = np.random.default_rng(seed)
        f = random_formula(int(rng.integers(2, 5)), int(rng.integers(2, 6)), rng)
        L = int(rng.integers(0, f.m))
        inst, w = gen_min3sat_gadget(f, L, variant)
        if variant == "median":
            assert inst.K >= f.m and sorted(w.weights)[-1] == 1.0
        opt = brute_opt(inst, w.weights)
        assert (opt <= 1e-9) == (min_satisfied(f) <= L)

    @pytest.mark.parametrize("seed", range(15))
    def test_positive_gap(self, seed):
        rng = np.random.default_rng(100 + seed)
        f = random_formula(int(rng.integers(2, 4)), int(rng.integers(2, 5)), rng)
        L = int(rng.integers(0, f.m))
        rho = 3
        inst, w = gen_min3sat_gadget(f, L, "positive", rho=rho)
        assert inst.scenarios.costs.min() >= 1
        opt = brute_opt(inst, w.weights)
        P = 2 * f.num_vars - 1
        if min_satisfied(f) <= L:
            assert opt == pytest.approx(P)
        else:
            assert opt >= (P + 1) * rho - 1e-9

    def test_median_boundary_uses_zero_padding(self):
        f = parse_formula("1\n2\n-1\n-2\n")  # m = 4, L = 2 = floor(m/2)
        inst, w = gen_min3sat_gadget(f, 2, "median")
        assert inst.K == 4 and w.weights == (0, 0, 1, 0)

    def test_bad_args(self):
        f = parse_formula("1\n")
        with pytest.raises(ParameterError):
            gen_min3sat_gadget(f, 1)
        with pytest.raises(ParameterError):
            gen_min3sat_gadget(f, 0, "nope")


class TestLift:
    def test_tight_selection(self):
        lifted = gen_hurwicz_lift(gen_tight_selection(3))
        assert lifted.K == 4 and not lifted.scenarios.costs[-1].any()
        assert brute_force_owa(lifted, preset_weights("hurwicz", 4, 0.5)).owa == pytest.approx(0.5)

    @pytest.mark.parametrize("seed", range(20))
    @pytest.mark.parametrize("alpha", [0.3, 1.0])
    def test_identity(self, seed, alpha):
        base = gen_random(KINDS[seed % len(KINDS)], 1 + seed % 3, 15, seed, n=6, p=3, layers=1, vertices=4, size=2, arcs=6)
        lifted = gen_hurwicz_lift(base)
        w = preset_weights("hurwicz", lifted.K, alpha).weights
        for X in feasible_by_filter(base):
            assert owa_plain(costs_of(lifted, X), w) == pytest.approx(alpha * max(costs_of(base, X)), abs=1e-12)

    def test_single_scenario_alpha_one(self):
        base = gen_random("selection", 1, 9, 3, n=5, p=2)
        lifted = gen_hurwicz_lift(base)
        assert brute_force_owa(lifted, preset_weights("hurwicz", 2, 1.0)).owa == brute_opt(base, (1.0,))

    def test_twice(self):
        base = gen_random("selection", 2, 9, 3, n=5, p=2)
        twice = gen_hurwicz_lift(gen_hurwicz_lift(base))
        assert twice.K == 4
        for X in feasible_by_filter(base):
            c = costs_of(twice, X)
            assert max(c) == max(costs_of(base, X)) and min(c) == 0


class TestRandom:
    @pytest.mark.parametrize("kind", KINDS)
    def test_deterministic(self, kind):
        a = gen_random(kind, 3, 50, 11)
        b = gen_random(kind, 3, 50, 11)
        assert a == b
        assert dumps_instance(a) == dumps_instance(b)

    @pytest.mark.parametrize("kind", KINDS)
    def test_cost_max_zero(self, kind):
        assert not gen_random(kind, 2, 0, 1).scenarios.costs.any()

    @pytest.mark.parametrize("kind", KINDS)
    def test_has_feasible_solution(self, kind):
        inst = gen_random(kind, 2, 5, 4)
        assert enumerate_feasible(inst, limit=10**5)

    def test_bad_args(self):
        with pytest.raises(ParameterError):
            gen_random("selection", 0, 5, 1)
        with pytest.raises(ParameterError):
            gen_random("selection", 1, -1, 1)


class TestFileFormat:
    def test_round_trip_tight(self, tmp_path):
        inst = gen_tight_selection(4)
        path = tmp_path / "t.json"
        write_instance(path, inst)
        assert read_instance(path) == inst
        assert dumps_instance(read_instance(path)) == path.read_text()

    @pytest.mark.parametrize("seed", range(10))
    def test_round_trip_random(self, seed):
        inst = gen_random(KINDS[seed % len(KINDS)], 3, 1000, seed)
        assert loads_instance(dumps_instance(inst)) == inst

    def test_round_trip_weights(self):
        inst, _ = gen_min3sat_gadget(parse_formula("1 2\n-1\n-2\n"), 1)
        back = loads_instance(dumps_instance(inst))
        assert back == inst and back.weights == inst.weights

    def test_scaled_decimals(self):
        doc = {"kind": "selection", "n": 2, "K": 1, "scale": 2, "structure": {"p": 1}, "costs": [[1.25, 0.5]]}
        inst = loads_instance(json.dumps(doc))
        assert inst.scenarios.costs.tolist() == [[125, 50]]
        assert loads_instance(dumps_instance(inst)) == inst
        assert "1.25" in dumps_instance(inst)

    @pytest.mark.parametrize("mutate, field", [
        (lambda d: d.pop("kind"), "kind"),
        (lambda d: d.update(kind="knapsack"), "kind"),
        (lambda d: d.update(K=3), "costs"),
        (lambda d: d["costs"][0].__setitem__(1, -1), "costs[0][1]"),
        (lambda d: d["costs"][0].__setitem__(0, "x"), "costs[0][0]"),
        (lambda d: d["structure"].pop("p"), "structure.p"),
        (lambda d: d.update(scale=-1), "scale"),
        (lambda d: d.update(weights=[0.5]), "weights"),
    ])
    def test_field_errors(self, mutate, field):
        doc = {"kind": "selection", "n": 2, "K": 1, "scale": 0, "structure": {"p": 1}, "costs": [[1, 2]]}
        mutate(doc)
        with pytest.raises(ParseError) as info:
            loads_instance(json.dumps(doc))
        assert info.value.field == field

    def test_non_multiple_of_scale(self):
        doc = {"kind": "selection", "n": 1, "K": 1, "scale": 1, "structure": {"p": 1}, "costs": [[0.25]]}
        with pytest.raises(ParseError):
            loads_instance(json.dumps(doc))

    def test_syntax_error_line(self):
        with pytest.raises(ParseError) as info:
            loads_instance('{\n  "kind": "selection",\n  oops\n}')
        assert info.value.line == 3

    def test_graph_arc_errors(self):
        inst = gen_partition_gadget([1, 1, 2])
        doc = json.loads(dumps_instance(inst))
        doc["structure"]["arcs"][1].pop("to")
        with pytest.raises(ParseError) as info:
            loads_instance(json.dumps(doc))
        assert info.value.field == "structure.arcs[1].to"
