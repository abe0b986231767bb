"""Penalty fitness and single-flip tabu search on boards (numba kernels).

A fitness is the triple (violations, distance, dead cells) compared
lexicographically.  Kernels pack it into one integer,
``violations * W**2 + distance * W + dead``, so comparisons stay scalar.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from . import rows as R

W = 1 << 20


def pack(violations: int, distance: int, dead: int) -> int:
    return (violations * W + distance) * W + dead


def unpack(key: int) -> tuple[int, int, int]:
    key = int(key)
    return key // (W * W), key // W % W, key % W


@njit(cache=True)
def _grid(rows, n):
    g = np.zeros((n + 4, n + 4), dtype=np.int64)
    for i in range(n):
        r = rows[i]
        for j in range(n):
            g[i + 2, j + 2] = r >> j & 1
    return g


@njit(cache=True)
def _counts(g, n):
    c = np.zeros_like(g)
    for x in range(1, n + 3):
        for y in range(1, n + 3):
            s = 0
            for dx in range(-1, 2):
                for dy in range(-1, 2):
                    if dx or dy:
                        s += g[x + dx, y + dy]
            c[x, y] = s
    return c


@njit(cache=True)
def _score(state, cnt, on_board):
    """violations * W + distance for one cell."""
    if on_board and state == 1:
        if 2 <= cnt <= 3:
            return 0
        d = 0
        if cnt < 2:
            d = 2 - cnt
        else:
            d = cnt - 3
        return W + d
    if cnt == 3:
        return W + 1
    return 0


@njit(cache=True)
def _on_board(x, y, n):
    return 2 <= x <= n + 1 and 2 <= y <= n + 1


@njit(cache=True)
def _key_of(g, c, n):
    vd = 0
    dead = 0
    for x in range(1, n + 3):
        for y in range(1, n + 3):
            ob = _on_board(x, y, n)
            vd += _score(g[x, y], c[x, y], ob)
            if ob and g[x, y] == 0:
                dead += 1
    return vd * W + dead


@njit(cache=True)
def fitness_key(rows, n):
    g = _grid(rows, n)
    return _key_of(g, _counts(g, n), n)


@njit(cache=True)
def _flip_delta(g, c, x, y, n):
    before = 0
    after = 0
    s = g[x, y]
    step = 1 - 2 * s  # +1 if the cell becomes live
    for dx in range(-1, 2):
        for dy in range(-1, 2):
            u = x + dx
            v = y + dy
            ob = _on_board(u, v, n)
            before += _score(g[u, v], c[u, v], ob)
            if dx == 0 and dy == 0:
                after += _score(1 - s, c[u, v], ob)
            else:
                after += _score(g[u, v], c[u, v] + step, ob)
    return (after - before) * W - step


@njit(cache=True)
def _apply(g, c, x, y):
    step = 1 - 2 * g[x, y]
    g[x, y] += step
    for dx in range(-1, 2):
        for dy in range(-1, 2):
            if dx or dy:
                c[x + dx, y + dy] += step


@njit(cache=True)
def _rows_of(g, n, out):
    for i in range(n):
        r = 0
        for j in range(n):
            if g[i + 2, j + 2]:
                r |= 1 << j
        out[i] = r


@njit(cache=True)
def tabu_kernel(rows, n, tenure, stall, max_moves, seed):
    """Best-improvement tabu walk over single-cell flips.

    A cell flipped at move ``t`` stays tabu through move ``t + tenure`` unless
    flipping it would beat the best key seen so far.  Stops after ``stall``
    consecutive moves without a new best (at least one), when no move is
    admissible, or after ``max_moves``.  Returns (best rows, best key, moves).
    """
    np.random.seed(seed)
    g = _grid(rows, n)
    c = _counts(g, n)
    cur = _key_of(g, c, n)
    best = cur
    best_rows = rows.copy()
    last = np.full((n, n), -(1 << 40), dtype=np.int64)
    limit = max(stall, 1)
    since = 0
    moves = 0
    while moves < max_moves:
        pick_x = -1
        pick_y = -1
        pick = 0
        ties = 0
        for i in range(n):
            for j in range(n):
                val = cur + _flip_delta(g, c, i + 2, j + 2, n)
                if moves - last[i, j] <= tenure and not val < best:
                    continue
                if pick_x < 0 or val < pick:
                    pick = val
                    pick_x = i
                    pick_y = j
                    ties = 1
                elif val == pick:
                    ties += 1
                    if np.random.randint(ties) == 0:
                        pick_x = i
                        pick_y = j
        if pick_x < 0:
            break
        _apply(g, c, pick_x + 2, pick_y + 2)
        last[pick_x, pick_y] = moves
        cur = pick
        moves += 1
        if cur < best:
            best = cur
            _rows_of(g, n, best_rows)
            since = 0
        else:
            since += 1
            if since >= limit:
                break
    return best_rows, best, moves


@njit(cache=True)
def flip_keys(rows, n):
    """Packed key after flipping each single cell (row-major n*n)."""
    g = _grid(rows, n)
    c = _counts(g, n)
    cur = _key_of(g, c, n)
    out = np.empty(n * n, dtype=np.int64)
    for i in range(n):
        for j in range(n):
            out[i * n + j] = cur + _flip_delta(g, c, i + 2, j + 2, n)
    return out


@njit(cache=True)
def _row_violation(level, a, b, c, n):
    """Cells of row ``level`` (1-based) plus adjacent margin cells that change."""
    v = R.popcount(R.unstable_cells(a, b, c, n))
    if level == 1 or level == n:
        v += R.popcount(b & (b >> 1) & (b >> 2))
    if 1 < level < n:
        abc = a & b & c
        v += (abc & 1) + (abc >> (n - 1) & 1)
    return v


@njit(cache=True)
def soft_recombine(cands, sizes, n):
    """Row-chain elimination over per-row candidate sets with soft violations.

    Each violation costs more than any board's dead cells, so the result is
    the cheapest feasible combination whenever one exists, and otherwise the
    combination with the fewest violations.  Ties go to the lowest index.
    """
    k = cands.shape[1]
    P = n * n + 1
    big = np.int64(1) << 60
    # H[L][p, q]: best cost of rows L..n given rows L-1 (index p), L (index q)
    H = np.full((n + 1, k, k), big, dtype=np.int64)
    for p in range(sizes[n - 2] if n >= 2 else 1):
        a = cands[n - 2, p]
        for q in range(sizes[n - 1]):
            b = cands[n - 1, q]
            H[n, p, q] = R.zeroes(b, n) + P * _row_violation(n, a, b, 0, n)
    for L in range(n - 1, 1, -1):
        for p in range(sizes[L - 2]):
            a = cands[L - 2, p]
            for q in range(sizes[L - 1]):
                b = cands[L - 1, q]
                best = big
                for r in range(sizes[L]):
                    c = cands[L, r]
                    v = R.zeroes(b, n) + P * _row_violation(L, a, b, c, n) + H[L + 1, q, r]
                    if v < best:
                        best = v
                H[L, p, q] = best
    out = np.zeros(n, dtype=np.int64)
    best = big
    arg = np.zeros(2, dtype=np.int64)
    for q in range(sizes[0]):
        b = cands[0, q]
        for r in range(sizes[1]):
            c = cands[1, r]
            v = R.zeroes(b, n) + P * _row_violation(1, 0, b, c, n) + H[2, q, r]
            if v < best:
                best = v
                arg[0] = q
                arg[1] = r
    out[0] = cands[0, arg[0]]
    out[1] = cands[1, arg[1]]
    p, q = arg[0], arg[1]
    for L in range(2, n):
        a = cands[L - 2, p]
        b = cands[L - 1, q]
        target = H[L, p, q]
        for r in range(sizes[L]):
            c = cands[L, r]
            v = R.zeroes(b, n) + P * _row_violation(L, a, b, c, n) + H[L + 1, q, r]
            if v == target:
                out[L] = c
                p, q = q, r
                break
    return out, best
