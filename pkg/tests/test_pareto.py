import numpy as np
import pytest

from owaopt import (
    Arc,
    BudgetError,
    CapabilityError,
    Digraph,
    ParameterError,
    ProblemInstance,
    ScenarioSet,
    approximate_pareto_set,
    exact_vector_query,
    fptas_min_owa,
    gen_partition_gadget,
    gen_random,
    preset_weights,
)
from owaopt import pareto
from owaopt.pareto import trimming_delta

from helpers import brute_opt, costs_of, feasible_by_filter, random_small_instance


def _small_dag_or_selection(seed, K=None):
    kind = "selection" if seed % 2 else "shortest-path"
    return random_small_instance(seed, K=K or 1 + seed % 3, kind=kind)


class TestExactQuery:
    def test_two_witnesses(self):
        inst = gen_partition_gadget([1, 1, 2])
        X = exact_vector_query(inst, (2, 2))
        assert X is not None and X.elements in {(2, 3, 4, 6, 7), (0, 1, 5, 6, 7)}
        assert costs_of(inst, X) == [2, 2]

    def test_unreachable(self):
        inst = gen_partition_gadget([1, 1, 2])
        assert exact_vector_query(inst, (1, 2)) is None
        assert exact_vector_query(inst, (-1, 5)) is None

    @pytest.mark.parametrize("seed", range(40))
    def test_agrees_with_enumeration(self, seed):
        inst = _small_dag_or_selection(seed)
        vectors = {tuple(costs_of(inst, X)) for X in feasible_by_filter(inst)}
        rng = np.random.default_rng(seed)
        probes = list(vectors)[:5] + [tuple(int(x) for x in rng.integers(0, 30, inst.K)) for _ in range(5)]
        for v in probes:
            X = exact_vector_query(inst, v)
            if v in vectors:
                assert X is not None and tuple(costs_of(inst, X)) == v
            else:
                assert X is None

    def test_wrong_length(self):
        with pytest.raises(ParameterError):
            exact_vector_query(gen_partition_gadget([1, 1, 2]), (1, 2, 3))


class TestApproximateSet:
    def test_delta(self):
        d = trimming_delta(0.1, 7)
        assert (1 + d) ** 7 == pytest.approx(1.1)

    @pytest.mark.parametrize("seed", range(40))
    @pytest.mark.parametrize("eps", [0.05, 0.5])
    def test_coverage(self, seed, eps):
        inst = _small_dag_or_selection(seed)
        pset = approximate_pareto_set(inst, eps)
        vectors = {tuple(costs_of(inst, X)) for X in feasible_by_filter(inst)}
        for m in pset:
            assert tuple(costs_of(inst, m.solution)) == m.values
        for v in vectors:
            assert pset.covers(v)

    @pytest.mark.parametrize("seed", range(30))
    @pytest.mark.parametrize("eps", [0.1, 0.5])
    def test_fptas_bound(self, seed, eps):
        inst = _small_dag_or_selection(seed)
        w = preset_weights("average" if seed % 3 else "maximum", inst.K)
        rep = fptas_min_owa(inst, w, eps)
        opt = brute_opt(inst, w.weights)
        assert opt - 1e-9 <= rep.owa <= (1 + eps) * opt + 1e-9
        assert rep.certificate.ratio == 1 + eps

    def test_fptas_partition(self):
        inst = gen_partition_gadget([2, 3, 3, 4])
        assert fptas_min_owa(inst, preset_weights("hurwicz", 2, 0.6), 0.1).owa == pytest.approx(6.0)

    def test_bad_epsilon(self):
        with pytest.raises(ParameterError):
            approximate_pareto_set(gen_partition_gadget([1, 1, 2]), 0)


class TestCapabilities:
    def test_unsupported_kind(self):
        inst = random_small_instance(0, kind="spanning-tree")
        with pytest.raises(CapabilityError):
            approximate_pareto_set(inst, 0.1)

    def test_cyclic_digraph(self):
        g = Digraph(3, (Arc(0, 1, 0), Arc(1, 0, 1), Arc(1, 2, 2)), 0, 2)
        inst = ProblemInstance("shortest-path", g, ScenarioSet([[1, 1, 1]]))
        with pytest.raises(CapabilityError):
            exact_vector_query(inst, (1,))

    def test_budget(self, monkeypatch):
        monkeypatch.setattr(pareto, "MAX_CELLS", 5000)
        inst = gen_random("selection", 6, 10**6, 1, n=60, p=30)
        with pytest.raises(BudgetError):
            approximate_pareto_set(inst, 1e-6)
        with pytest.raises(BudgetError):
            exact_vector_query(inst, (10**7,) * 6)
