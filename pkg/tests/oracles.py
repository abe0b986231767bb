"""Reference implementations that share no code with the solvers."""

from __future__ import annotations

import itertools

import numpy as np

INF = float("inf")


def brute_min(instance):
    """Minimum by looping over every total assignment (pure Python)."""
    best, arg = INF, None
    for t in itertools.product(*(range(s) for s in instance.domain_sizes)):
        total = 0
        for f in instance.functions:
            total += int(f.table[tuple(t[v] for v in f.scope)])
        if total < best:
            best, arg = total, t
    return best, arg


def _bits(rows: np.ndarray, n: int) -> np.ndarray:
    """(..., n) array of cells from bit-packed rows, column j = bit j."""
    return (rows[..., None] >> np.arange(n)) & 1


def middle_row_ok(a, b, c, n: int) -> np.ndarray:
    """Direct cell count: every cell of b keeps its state, and no cell just
    left or right of b (outside the board) is born.  a, b, c broadcast."""
    A, B, C = (_bits(np.asarray(x, dtype=np.int64), n) for x in (a, b, c))
    A, B, C = np.broadcast_arrays(A, B, C)
    col = A + B + C
    pad = np.zeros(col.shape[:-1] + (1,), dtype=col.dtype)
    wide = np.concatenate([pad, col, pad], axis=-1)
    nb = wide[..., :-2] + wide[..., 1:-1] + wide[..., 2:] - B
    alive_ok = (B == 0) | ((nb >= 2) & (nb <= 3))
    dead_ok = (B == 1) | (nb != 3)
    ok = np.all(alive_ok & dead_ok, axis=-1)
    # cells outside the left/right edge next to b see the edge column only
    ok &= col[..., 0] != 3
    ok &= col[..., -1] != 3
    return ok


def outer_row_ok(b, n: int) -> np.ndarray:
    """No birth in the dead row just outside the board next to row b."""
    B = _bits(np.asarray(b, dtype=np.int64), n)
    pad = np.zeros(B.shape[:-1] + (1,), dtype=B.dtype)
    wide = np.concatenate([pad, B, pad], axis=-1)
    nb = wide[..., :-2] + wide[..., 1:-1] + wide[..., 2:]
    return np.all(nb != 3, axis=-1)


def still_life_optimum(n: int) -> int:
    """Fewest dead cells of an n x n still life by a row-pair transfer DP.

    Transition validity is computed by direct neighbour counting over all
    (a, b, c) row triples at once.
    """
    R = np.arange(1 << n, dtype=np.int64)
    dead = n - _bits(R, n).sum(axis=1)
    big = 10 ** 9
    # best[a, b]: fewest dead cells on rows so far, ending with rows a, b
    zero = np.zeros(1, dtype=np.int64)
    first = np.where(middle_row_ok(zero[:, None, None], R[None, :, None], R[None, None, :], n)[0]
                     & outer_row_ok(R, n)[:, None], 0, big)
    # first[b, c]: row 1 = b stable given row 2 = c; cost counted for b
    best = np.where(first < big, dead[:, None], big)
    valid = np.stack([middle_row_ok(R[a], R[:, None], R[None, :], n) for a in range(len(R))])
    for _ in range(n - 2):
        nxt = np.full((len(R), len(R)), big, dtype=np.int64)
        for a in range(len(R)):
            nxt = np.minimum(nxt, np.where(valid[a], best[a][:, None], big))
        best = np.where(nxt < big, nxt + dead[:, None], big)
    # close: last row c, its own stability with a dead row below, no births below
    total = big
    for b in range(len(R)):
        ok = middle_row_ok(R[b], R, 0, n) & outer_row_ok(R, n)
        v = np.where(ok & (best[b] < big), best[b] + dead, big)
        total = min(total, int(v.min()))
    return total


def still_life_tails(n: int):
    """Exact cost-to-go over row pairs, with the reachable pair masks.

    ``tails[i][a, b]`` is the fewest dead cells on rows i+1..n over completions
    of a board whose rows i-1 and i are a and b (INF if none); ``reach[i]``
    marks pairs that some stable-so-far prefix ends with.  Index 0 is unused.
    """
    R = np.arange(1 << n, dtype=np.int64)
    d = len(R)
    dead = (n - _bits(R, n).sum(axis=1)).astype(float)
    ok3 = np.stack([middle_row_ok(R[a], R[:, None], R[None, :], n) for a in range(d)])
    outer = outer_row_ok(R, n)
    close = ok3[:, :, 0] & outer[None, :]
    tails = [None] * (n + 1)
    tails[n] = np.where(close, 0.0, INF)
    for i in range(n - 1, 0, -1):
        nxt = tails[i + 1]
        cur = np.empty((d, d))
        for a in range(d):
            cur[a] = np.where(ok3[a], dead[None, :] + nxt, INF).min(axis=1)
        tails[i] = cur
    reach = [None] * (n + 1)
    reach[1] = np.zeros((d, d), dtype=bool)
    reach[1][0] = outer
    for i in range(1, n):
        has_b = reach[i]
        nxt = np.zeros((d, d), dtype=bool)
        for a in np.flatnonzero(has_b.any(axis=1)):
            nxt |= has_b[a][:, None] & ok3[a]
        reach[i + 1] = nxt
    return tails, reach


def boards_are_still(grids: np.ndarray) -> np.ndarray:
    """Batch Life step on (k, n, n) 0/1 grids inside a dead plane."""
    k, n, _ = grids.shape
    g = np.zeros((k, n + 4, n + 4), dtype=np.int8)
    g[:, 2:-2, 2:-2] = grids
    nb = np.zeros((k, n + 2, n + 2), dtype=np.int8)
    for dx in range(3):
        for dy in range(3):
            if dx != 1 or dy != 1:
                nb += g[:, dx:dx + n + 2, dy:dy + n + 2]
    cur = g[:, 1:-1, 1:-1]
    nxt = (nb == 3) | ((cur == 1) & (nb == 2))
    return np.all(nxt == (cur == 1), axis=(1, 2))
