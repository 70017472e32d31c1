import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from owaopt import (
    DimensionError,
    ParameterError,
    ScenarioSet,
    Solution,
    WeightClass,
    WeightKind,
    WeightVector,
    classify_weights,
    evaluate,
    gen_tight_selection,
    owa_value,
    preset_weights,
)
from owaopt.owa import weights_for_class

from helpers import owa_plain


@st.composite
def values_and_weights(draw, max_k=8):
    K = draw(st.integers(1, max_k))
    values = draw(st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=K, max_size=K))
    raw = draw(st.lists(st.floats(0, 1), min_size=K, max_size=K))
    total = sum(raw)
    if total == 0:
        raw = [1.0] + [0.0] * (K - 1)
        total = 1.0
    ws = [x / total for x in raw]
    ws[-1] = max(0.0, 1.0 - sum(ws[:-1]))
    return values, WeightVector(tuple(ws))


def test_owa_hand_example():
    assert owa_value((3, 2, 1), WeightVector((0.5, 0.3, 0.2))) == pytest.approx(2.3, abs=1e-12)


def test_owa_maximum_preset():
    assert owa_value((5, 9, 2), WeightVector((1, 0, 0))) == 9


def test_owa_length_mismatch():
    with pytest.raises(DimensionError):
        owa_value((1, 2), WeightVector((1.0,)))


@pytest.mark.parametrize("a", [0, 1.5, 7])
def test_owa_idempotent(a):
    w = WeightVector((0.1, 0.6, 0.3))
    assert owa_value((a, a, a), w) == pytest.approx(a, abs=1e-9)


@settings(max_examples=300, deadline=None)
@given(values_and_weights())
def test_owa_bounded_and_symmetric(vw):
    values, w = vw
    v = owa_value(values, w)
    assert min(values) - 1e-6 <= v <= max(values) + 1e-6
    assert v == pytest.approx(owa_value(list(reversed(values)), w), abs=1e-6)
    assert v == pytest.approx(owa_plain(values, w.weights), abs=1e-6)


@settings(max_examples=300, deadline=None)
@given(values_and_weights(), st.lists(st.floats(0, 1e3), min_size=8, max_size=8))
def test_owa_monotone(vw, bumps):
    values, w = vw
    bigger = [v + b for v, b in zip(values, bumps)]
    assert owa_value(bigger, w) >= owa_value(values, w) - 1e-6


def test_weight_vector_validation():
    with pytest.raises(ParameterError):
        WeightVector((0.5, 0.6))
    with pytest.raises(ParameterError):
        WeightVector((1.5, -0.5))
    with pytest.raises(ParameterError):
        WeightVector(())


def test_scenario_set_validation():
    with pytest.raises(ParameterError):
        ScenarioSet([[1, -1]])
    with pytest.raises(ParameterError):
        ScenarioSet([[1.5, 1]])
    with pytest.raises(DimensionError):
        ScenarioSet([1, 2, 3])
    s = ScenarioSet([[1, 2], [3, 4]])
    assert (s.K, s.n) == (2, 2)
    assert s == ScenarioSet(np.array([[1, 2], [3, 4]]))
    with pytest.raises(ValueError):
        s.costs[0, 0] = 9


def test_solution_normalises():
    assert Solution.of([3, 1, 2]).elements == (1, 2, 3)
    with pytest.raises(ParameterError):
        Solution.of([1, 1])


class TestPresets:
    def test_hurwicz(self):
        assert preset_weights("hurwicz", 4, 0.7).weights == pytest.approx((0.7, 0, 0, 0.3))

    def test_median(self):
        assert preset_weights("median", 5).weights == (0, 0, 1, 0, 0)

    def test_average(self):
        assert preset_weights("average", 2).weights == (0.5, 0.5)

    @pytest.mark.parametrize("kind, K, param", [("quantile", 3, 4), ("quantile", 3, 0), ("hurwicz", 3, 1.2), ("hurwicz", 3, None), ("general", 3, None)])
    def test_bad_params(self, kind, K, param):
        with pytest.raises(ParameterError):
            preset_weights(kind, K, param)


class TestClassify:
    def test_examples(self):
        assert classify_weights(WeightVector((1, 0, 0))) == WeightClass(WeightKind.MAXIMUM)
        assert classify_weights(WeightVector((0.2, 0.3, 0.5))) == WeightClass(WeightKind.NONDECREASING)
        assert classify_weights(WeightVector((0.6, 0, 0.4))) == WeightClass(WeightKind.HURWICZ, alpha=0.6)

    def test_other_classes(self):
        assert classify_weights(WeightVector((0.5, 0.3, 0.2))).kind is WeightKind.NONINCREASING
        assert classify_weights(WeightVector((0.2, 0.5, 0.3))).kind is WeightKind.GENERAL
        assert classify_weights(WeightVector((0, 1, 0, 0))) == WeightClass(WeightKind.QUANTILE, k=2)
        assert classify_weights(WeightVector((0, 0, 1, 0))).kind is WeightKind.MEDIAN
        assert classify_weights(WeightVector((0.25,) * 4)).kind is WeightKind.AVERAGE

    def test_round_trip(self):
        # Degenerate parameters collapse onto a more specific class with the
        # same weight vector (e.g. quantile(1) is the maximum).
        for K in range(1, 11):
            tags = [WeightClass(WeightKind.MAXIMUM), WeightClass(WeightKind.MINIMUM),
                    WeightClass(WeightKind.AVERAGE), WeightClass(WeightKind.MEDIAN)]
            tags += [WeightClass(WeightKind.QUANTILE, k=k) for k in range(1, K + 1)]
            tags += [WeightClass(WeightKind.HURWICZ, alpha=a) for a in (0.0, 0.25, 0.5, 0.7, 1.0)]
            for tag in tags:
                w = weights_for_class(tag, K)
                got = classify_weights(w)
                assert weights_for_class(got, K).isclose(w)
                degenerate = (
                    K <= 2
                    or (tag.kind is WeightKind.QUANTILE and tag.k in (1, K, K // 2 + 1))
                    or (tag.kind is WeightKind.HURWICZ and tag.alpha in (0.0, 1.0))
                )
                if not degenerate:
                    assert got == tag, (K, tag, got)

    def test_preset_always_valid(self):
        for K, kind in itertools.product(range(1, 11), ["maximum", "minimum", "average", "median"]):
            w = preset_weights(kind, K)
            assert abs(sum(w) - 1) <= 1e-9 and all(0 <= x <= 1 for x in w)


class TestEvaluate:
    def test_tight_bad_candidate(self):
        inst = gen_tight_selection(3)
        w = WeightVector((0.5, 0.3, 0.2))
        owa, sc = evaluate(inst, Solution.of([0, 1, 2]), w)
        assert sc == (0, 0, 3)
        assert owa == pytest.approx(3 * 0.5)

    def test_tight_good_candidate(self):
        inst = gen_tight_selection(3)
        owa, sc = evaluate(inst, Solution.of([3, 4, 5]), WeightVector((0.5, 0.3, 0.2)))
        assert sc == (1, 1, 1)
        assert owa == pytest.approx(1.0)

    def test_zero_costs(self):
        from owaopt import Cardinality, ProblemInstance

        inst = ProblemInstance("selection", Cardinality(2), ScenarioSet(np.zeros((3, 4), dtype=int)))
        assert evaluate(inst, Solution.of([0, 3]), preset_weights("average", 3))[0] == 0

    def test_infeasible(self):
        from owaopt import InfeasibleError

        with pytest.raises(InfeasibleError):
            evaluate(gen_tight_selection(3), Solution.of([0]), preset_weights("maximum", 3))
