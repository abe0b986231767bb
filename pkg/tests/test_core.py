import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import brute_min
from strategies import small_wcsps
from wcsp_hybrid.core import (
    TOP,
    Assignment,
    CostFunction,
    MemoryRefusal,
    WcspError,
    WcspInstance,
    add,
    brute_force_opt,
    eliminate,
    estimate_complexity,
    evaluate,
    sum_functions,
)
from wcsp_hybrid.core import sum as fsum


def tables(shape_vars, sizes, seed, tops=0.0):
    rng = np.random.default_rng(seed)
    shape = tuple(sizes[v] for v in shape_vars)
    t = rng.integers(0, 10, size=shape)
    return np.where(rng.random(shape) < tops, TOP, t)


def test_saturating_add():
    assert add(3, 4) == 7
    assert add(TOP, 5) == TOP
    assert add(TOP - 1, 2) == TOP


def test_rejects_bad_tables():
    with pytest.raises(WcspError):
        CostFunction((0, 0), np.zeros((2, 2)))
    with pytest.raises(WcspError):
        CostFunction((0,), np.zeros((2, 2)))
    with pytest.raises(WcspError):
        CostFunction((0,), [-1, 2])


def test_instance_validation():
    with pytest.raises(WcspError):
        WcspInstance([np.arange(2)], [CostFunction((0, 1), np.zeros((2, 2)))])
    with pytest.raises(WcspError):
        WcspInstance([np.arange(2), np.arange(3)], [CostFunction((0, 1), np.zeros((2, 2)))])
    with pytest.raises(WcspError):
        WcspInstance([np.arange(2)], ordering=(1,))
    with pytest.raises(WcspError):
        WcspInstance([np.arange(0)])


def test_assignment_rejects_rebinding():
    with pytest.raises(WcspError):
        Assignment(((0, 1), (0, 2)))
    with pytest.raises(WcspError):
        Assignment.from_values([1]).values(2)


@given(st.integers(0, 10_000), st.sampled_from([0.0, 0.2]))
def test_sum_matches_pointwise(seed, tops):
    sizes = {0: 2, 1: 3, 2: 2}
    f = CostFunction((0, 1), tables((0, 1), sizes, seed, tops))
    g = CostFunction((2, 1), tables((2, 1), sizes, seed + 1, tops))
    h = fsum(f, g)
    assert h.scope == (0, 1, 2)
    for a, b, c in itertools.product(range(2), range(3), range(2)):
        expect = min(int(f.table[a, b]) + int(g.table[c, b]), TOP)
        assert h.table[a, b, c] == expect


@given(st.integers(0, 10_000))
def test_sum_commutes_and_associates(seed):
    sizes = {0: 2, 1: 2, 2: 3}
    f = CostFunction((0,), tables((0,), sizes, seed))
    g = CostFunction((1, 2), tables((1, 2), sizes, seed + 1, 0.2))
    h = CostFunction((0, 2), tables((0, 2), sizes, seed + 2))
    assert np.array_equal(fsum(f, g).table, fsum(g, f).table)
    left = fsum(fsum(f, g), h)
    right = fsum(f, fsum(g, h))
    assert left.scope == right.scope
    assert np.array_equal(left.table, right.table)


@given(st.integers(0, 10_000))
def test_eliminate_is_min(seed):
    sizes = {0: 3, 1: 2, 2: 4}
    f = CostFunction((0, 1, 2), tables((0, 1, 2), sizes, seed, 0.3))
    g = eliminate(f, 1)
    assert g.scope == (0, 2)
    for a, c in itertools.product(range(3), range(4)):
        assert g.table[a, c] == min(f.table[a, 0, c], f.table[a, 1, c])


@given(st.integers(0, 10_000))
def test_min_of_sum_dominates_sum_of_mins(seed):
    sizes = {0: 3, 1: 3}
    f = CostFunction((0, 1), tables((0, 1), sizes, seed, 0.2))
    g = CostFunction((0, 1), tables((0, 1), sizes, seed + 7, 0.2))
    lhs = eliminate(fsum(f, g), 1).table
    rhs = np.minimum(eliminate(f, 1).table + eliminate(g, 1).table, TOP)
    assert np.all(lhs >= rhs)


def test_elimination_errors():
    f = CostFunction((0,), [1, 2])
    with pytest.raises(WcspError):
        eliminate(f, 3)


@given(small_wcsps())
def test_evaluate_matches_direct_sum(inst):
    for t in itertools.islice(itertools.product(*(range(s) for s in inst.domain_sizes)), 50):
        total = sum(int(f.table[tuple(t[v] for v in f.scope)]) for f in inst.functions)
        assert evaluate(inst, t) == min(total, TOP)


@given(small_wcsps())
def test_brute_force_matches_loop_oracle(inst):
    cost, t = brute_force_opt(inst)
    ref, _ = brute_min(inst)
    assert cost == min(ref, TOP)
    assert evaluate(inst, t) == cost


def test_brute_force_ties_lexicographic():
    inst = WcspInstance([np.arange(2), np.arange(2)], [CostFunction((0, 1), np.zeros((2, 2)))])
    _, t = brute_force_opt(inst)
    assert t.values(2) == [0, 0]


def test_brute_force_refuses_large():
    inst = WcspInstance([np.arange(10)] * 8)
    with pytest.raises(MemoryRefusal):
        brute_force_opt(inst, cap=1000)


def test_sum_of_nothing_is_zero():
    assert int(sum_functions([]).table) == 0


def test_complexity_of_chain():
    fs = [CostFunction((i, i + 1), np.zeros((2, 2))) for i in range(4)]
    est = estimate_complexity(WcspInstance([np.arange(2)] * 5, fs))
    assert est.induced_width == 1
    assert est.space_entries == 5 * 2


def test_evaluate_rejects_out_of_range():
    inst = WcspInstance([np.arange(2)], [CostFunction((0,), [0, 1])])
    with pytest.raises(WcspError):
        evaluate(inst, [2])
