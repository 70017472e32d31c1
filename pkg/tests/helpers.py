"""Independent oracles for the test-suite.

Nothing here calls the package's enumerators or OWA operator: feasible sets
come from filtering all ``2**n`` subsets through ``is_feasible`` and OWA is
recomputed with a plain sort.
"""

from __future__ import annotations

import itertools

import numpy as np

from owaopt import ProblemKind, Solution, gen_random, is_feasible

KINDS = [k.value for k in ProblemKind]


def owa_plain(values, weights):
    return sum(w * v for w, v in zip(weights, sorted(values, reverse=True)))


def costs_of(inst, X):
    c = inst.scenarios.costs
    return [int(sum(int(c[j, i]) for i in X)) for j in range(inst.K)]


def feasible_by_filter(inst):
    """Feasible set by checking every subset of the ground set."""
    out = []
    for mask in range(1 << inst.n):
        X = Solution.of(i for i in range(inst.n) if mask >> i & 1)
        if is_feasible(inst, X):
            out.append(X)
    return out


def brute_opt(inst, weights, sols=None):
    sols = feasible_by_filter(inst) if sols is None else sols
    return min(owa_plain(costs_of(inst, X), weights) for X in sols)


def subset_sum_yes(A):
    total = sum(A)
    reach = {0}
    for a in A:
        reach |= {r + a for r in reach}
    return total % 2 == 0 and total // 2 in reach


def min_satisfied(formula):
    return min(
        formula.satisfied_count(bits)
        for bits in itertools.product([False, True], repeat=formula.num_vars)
    )


def random_small_instance(seed, K=None, kind=None, cost_max=20):
    """Small random instance with n <= 10 and at most a few hundred solutions."""
    rng = np.random.default_rng(seed)
    kind = kind or KINDS[int(rng.integers(len(KINDS)))]
    K = K or int(rng.integers(1, 6))
    if kind == "selection":
        n = int(rng.integers(2, 11))
        shape = {"n": n, "p": int(rng.integers(1, n + 1))}
    elif kind == "shortest-path":
        shape = {"layers": int(rng.integers(1, 3)), "width": 2, "density": 0.6}
    elif kind == "spanning-tree":
        v = int(rng.integers(3, 6))
        shape = {"vertices": v, "extra": min(int(rng.integers(0, 5)), 10 - (v - 1))}
    elif kind == "assignment":
        shape = {"size": int(rng.integers(1, 4)), "density": 0.5}
    else:
        shape = {"vertices": int(rng.integers(3, 6)), "arcs": int(rng.integers(3, 11))}
    return gen_random(kind, K, cost_max, seed, **shape)
