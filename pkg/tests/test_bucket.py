import itertools

import numpy as np
import pytest
from hypothesis import given

from oracles import brute_min
from strategies import small_wcsps
from wcsp_hybrid.bucket import be_recombine, be_solve, eliminate_pass, restricted_domains
from wcsp_hybrid.core import TOP, Assignment, CostFunction, MemoryRefusal, WcspInstance, evaluate
from wcsp_hybrid.harness.generate import gen_random_wcsp


@given(small_wcsps(max_vars=6, max_domain=4))
def test_be_matches_brute_force(inst):
    cost, t = be_solve(inst)
    ref, _ = brute_min(inst)
    assert cost == min(ref, TOP)
    assert evaluate(inst, t) == cost


@given(small_wcsps(max_vars=5))
def test_be_any_ordering(inst):
    order = tuple(reversed(range(inst.n)))
    permuted = WcspInstance(inst.domains, inst.functions, order)
    assert be_solve(permuted)[0] == be_solve(inst)[0]


def test_be_refuses_over_cap():
    inst = gen_random_wcsp(6, 4, 10, 3, 0.0, seed=1)
    with pytest.raises(MemoryRefusal):
        eliminate_pass(inst, memory_cap=8)


def test_empty_instance_costs_nothing():
    inst = WcspInstance([np.arange(3)] * 2)
    cost, t = be_solve(inst)
    assert cost == 0 and len(t) == 2


def test_infeasible_instance():
    inst = WcspInstance([np.arange(2)], [CostFunction((0,), [TOP, TOP])])
    assert be_solve(inst)[0] == TOP


def _enumerate_children(inst, parents):
    keep = restricted_domains(inst, parents)
    best = TOP
    for t in itertools.product(*keep):
        best = min(best, evaluate(inst, t))
    return best


@given(small_wcsps(max_vars=5, max_domain=4, tops=True))
def test_recombination_is_best_parental_child(inst):
    rng = np.random.default_rng(inst.n)
    parents = [rng.integers(0, s) for s in inst.domain_sizes], \
              [rng.integers(0, s) for s in inst.domain_sizes]
    parents = [[int(v) for v in p] for p in parents]
    cost, child = be_recombine(inst, parents)
    values = child.values(inst.n)
    for v, x in enumerate(values):
        assert x in (parents[0][v], parents[1][v])
    assert cost == _enumerate_children(inst, parents)
    assert cost <= min(evaluate(inst, p) for p in parents)
    assert evaluate(inst, values) == cost


def test_recombination_of_identical_parents():
    inst = gen_random_wcsp(4, 3, 5, 2, 0.0, seed=3)
    p = Assignment.from_values([2, 0, 1, 1])
    cost, child = be_recombine(inst, [p, p])
    assert child.values(4) == [2, 0, 1, 1]
    assert cost == evaluate(inst, p)
