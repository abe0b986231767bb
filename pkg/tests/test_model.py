import functools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from wcsp_hybrid.bucket import be_solve
from wcsp_hybrid.core import TOP, MemoryRefusal, WcspError, brute_force_opt, evaluate
from wcsp_hybrid.stilllife import rows as R
from wcsp_hybrid.stilllife.columns import build_mb_columns, slice_bounds
from wcsp_hybrid.stilllife.model import (
    OPTIMUM,
    Board,
    StillLifeModel,
    build_wcsp,
    chain_tables,
    evaluate_rows,
    partial_quality,
    verify_still_life,
)

BLOCK4 = "....\n.##.\n.##.\n....\n"


def test_block_board():
    inst = build_wcsp(StillLifeModel(4))
    b = Board.from_text(BLOCK4)
    assert evaluate(inst, inst.assignment_of(b.rows)) == 12
    assert verify_still_life(b)
    assert b.dead == 12
    assert b.to_text() == BLOCK4


def test_single_cell_is_forbidden():
    inst = build_wcsp(StillLifeModel(4))
    rows = [0, R.parse_row("0100"), 0, 0]
    assert evaluate(inst, inst.assignment_of(rows)) == TOP


def test_verifier_examples():
    assert not verify_still_life(Board.from_text("....\n###.\n....\n....\n"))
    assert verify_still_life(Board.from_rows([0] * 5))
    # a beehive touching the edge still needs its outside neighbours quiet
    assert verify_still_life(Board.from_text(".##.\n#..#\n.##.\n....\n"))


def test_board_text_errors():
    with pytest.raises(WcspError):
        Board.from_text("...\n..\n...\n")
    with pytest.raises(WcspError):
        Board.from_text("..\nx.\n")
    with pytest.raises(WcspError):
        Board.from_text("")


def test_symmetric_domain():
    inst = build_wcsp(StillLifeModel(6, symmetric=True))
    assert inst.domain_sizes == (8,) * 6
    assert all(R.mirror(int(r), 6) == int(r) for r in inst.domains[0])


def test_size_limits():
    with pytest.raises(WcspError):
        StillLifeModel(1)
    with pytest.raises(WcspError):
        StillLifeModel(63)
    with pytest.raises(MemoryRefusal):
        chain_tables(StillLifeModel(12), memory_cap=1000)


def test_default_columns():
    assert StillLifeModel(12).columns == 3
    assert StillLifeModel(22).columns == 4
    assert slice_bounds(13, 3) == [(0, 5), (5, 10), (10, 13)]


@pytest.mark.parametrize("n", [3, 4])
def test_chain_be_matches_brute_force(n):
    inst = build_wcsp(StillLifeModel(n))
    cost, t = be_solve(inst)
    assert cost == brute_force_opt(inst)[0]
    assert evaluate(inst, t) == cost


@pytest.mark.parametrize("n", [5, 6, 7])
def test_chain_be_matches_oracle(n):
    inst = build_wcsp(StillLifeModel(n))
    cost, t = be_solve(inst)
    assert cost == oracles.still_life_optimum(n) == OPTIMUM[n]
    rows = inst.rows_of(t)
    assert verify_still_life(Board.from_rows(rows))
    assert evaluate_rows(rows, n) == cost


def test_symmetric_small_matches_full_when_symmetric():
    for n in (5, 6, 7):
        sym, t = be_solve(build_wcsp(StillLifeModel(n, symmetric=True)))
        inst = build_wcsp(StillLifeModel(n, symmetric=True))
        rows = inst.rows_of(t)
        assert verify_still_life(Board.from_rows(rows))
        assert sym >= OPTIMUM[n]


def test_generic_restrict_matches_row_rules():
    inst = build_wcsp(StillLifeModel(4))
    keep = [np.array([0, 6]), np.array([0, 6]), np.array([0, 6])]
    f = inst.functions[1].restrict(keep)
    for i, a in enumerate((0, 6)):
        for j, b in enumerate((0, 6)):
            for k, c in enumerate((0, 6)):
                want = R.row_cost(2, a, b, c, 4)
                assert f.table[i, j, k] == (TOP if want is None else want)


def test_partial_quality_examples():
    n = 6
    inst = build_wcsp(StillLifeModel(n))
    cost, t = be_solve(inst)
    rows = inst.rows_of(t)
    assert partial_quality(rows, n) == cost
    assert partial_quality([R.parse_row("111000")], n) == TOP
    with pytest.raises(WcspError):
        partial_quality([], n)


@functools.lru_cache(None)
def _best_tail(a, b, level, n):
    """Fewest dead cells on rows level+1..n after rows (a, b) at level-1, level."""
    if level == n:
        ok = R.stable(a, b, 0, n) and not R.has_three_adjacent(b)
        return 0 if ok else TOP
    best = TOP
    for c in R.stable_extensions(a, b, n):
        rest = _best_tail(b, c, level + 1, n)
        if rest < TOP:
            best = min(best, R.zeroes(c, n) + rest)
    return best


@given(st.integers(0, 2**31 - 1))
def test_partial_quality_without_bound_is_lower_bound(seed):
    n = 7
    rng = np.random.default_rng(seed)
    rows = []
    a, b = 0, 0
    for level in range(1, n + 1):
        ext = R.stable_extensions(0, 0, n, is_first=True) if level == 1 else \
            R.stable_extensions(a, b, n)
        if not ext:
            break
        c = int(rng.choice(ext))
        rows.append(c)
        a, b = b, c
        q = partial_quality(rows, n)
        tail = _best_tail(rows[-2] if len(rows) > 1 else 0, rows[-1], len(rows), n)
        if q < TOP and tail < TOP:
            assert q <= sum(R.zeroes(r, n) for r in rows) + tail


def test_mb_columns_single_slice_is_exact():
    n = 6
    bound = build_mb_columns(StillLifeModel(n), M=1, z=3)
    rng = np.random.default_rng(0)
    for _ in range(200):
        rows = []
        a, b = 0, 0
        for level in range(1, n):
            ext = R.stable_extensions(0, 0, n, True) if level == 1 else R.stable_extensions(a, b, n)
            if not ext:
                break
            c = int(rng.choice(ext))
            rows.append(c)
            a, b = b, c
            exact = _best_tail(rows[-2] if level > 1 else 0, c, level, n)
            assert bound.completion(level, rows[-2] if level > 1 else 0, c) == exact


def test_mb_columns_large_n_constructs():
    bound = build_mb_columns(StillLifeModel(22))
    assert len(bound.slices) == 4
    assert 0 < bound.root() < 22 * 22
