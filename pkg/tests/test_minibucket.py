import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from strategies import small_wcsps
from wcsp_hybrid.bucket import Bucket, be_solve
from wcsp_hybrid.core import TOP, Assignment, CostFunction, WcspError, WcspInstance, evaluate
from wcsp_hybrid.minibucket import mb_bound, mb_estimate, mb_partition, mb_preprocess


def _best_completion(inst, order, prefix):
    rest = order[len(prefix):]
    best = TOP
    for tail in itertools.product(*(range(inst.domain_sizes[v]) for v in rest)):
        t = dict(zip(order, prefix))
        t.update(zip(rest, tail))
        best = min(best, evaluate(inst, [t[v] for v in range(inst.n)]))
    return best


@given(small_wcsps(max_vars=5, max_arity=3), st.integers(1, 3))
def test_bound_below_optimum(inst, z):
    widest = max((f.arity for f in inst.functions), default=0)
    z = max(z, widest)
    assert mb_bound(inst, z) <= be_solve(inst)[0]


@given(small_wcsps(max_vars=5, max_arity=2))
def test_large_z_is_exact(inst):
    assert mb_bound(inst, inst.n) == be_solve(inst)[0]


@given(small_wcsps(max_vars=4, max_domain=3, max_arity=3), st.integers(0, 1000))
def test_estimate_is_admissible_on_prefixes(inst, seed):
    widest = max((f.arity for f in inst.functions), default=1)
    rng = np.random.default_rng(seed)
    order = tuple(int(v) for v in rng.permutation(inst.n))
    h = mb_preprocess(inst, max(2, widest), order)
    for i in range(inst.n + 1):
        prefix = [int(rng.integers(inst.domain_sizes[v])) for v in order[:i]]
        assert mb_estimate(h, prefix) <= _best_completion(inst, order, prefix)


@given(small_wcsps(max_vars=4))
def test_full_prefix_estimate_is_evaluate(inst):
    widest = max((f.arity for f in inst.functions), default=1)
    h = mb_preprocess(inst, widest)
    t = [0] * inst.n
    assert mb_estimate(h, t) == evaluate(inst, t)
    assert mb_estimate(h, []) == h.bound


def test_partition_respects_z():
    fs = [CostFunction((0, 1), np.zeros((2, 2))), CostFunction((0, 2), np.zeros((2, 2))),
          CostFunction((0, 3), np.zeros((2, 2)))]
    part = mb_partition(Bucket(0, fs), 3)
    for g in part.groups:
        assert len(set().union(*(f.scope for f in g))) <= 3
    assert sum(len(g) for g in part.groups) == 3
    with pytest.raises(WcspError):
        mb_partition(Bucket(0, fs), 1)


def test_estimate_rejects_misaligned_prefix():
    inst = WcspInstance([np.arange(2)] * 2, [CostFunction((0, 1), np.zeros((2, 2)))])
    h = mb_preprocess(inst, 2, (1, 0))
    with pytest.raises(WcspError):
        mb_estimate(h, Assignment(((0, 1),)))
