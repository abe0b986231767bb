"""Still-life branching for beam search and random prefix completion."""

from __future__ import annotations

import numpy as np
from numba import njit

from ..core import Assignment
from . import rows as R
from .columns import ColumnBound, build_mb_columns
from .model import StillLifeModel


@njit(cache=True)
def is_symmetric(c, n):
    for j in range(n // 2):
        if (c >> j & 1) != (c >> (n - 1 - j) & 1):
            return False
    return True


@njit(cache=True)
def first_rows(n, symmetric):
    """Candidates for row 1: rows without three adjacent live cells."""
    count = 0
    for r in range(1 << n):
        if not R.has_three_adjacent(r) and (not symmetric or is_symmetric(r, n)):
            count += 1
    out = np.empty(count, dtype=np.int64)
    k = 0
    for r in range(1 << n):
        if not R.has_three_adjacent(r) and (not symmetric or is_symmetric(r, n)):
            out[k] = r
            k += 1
    return out


@njit(cache=True)
def _completion(tables, lo, widths, level, a, b):
    total = 0
    for s in range(lo.shape[0]):
        m = (1 << widths[s]) - 1
        v = tables[level, s, (a >> lo[s]) & m, (b >> lo[s]) & m]
        if v == 65535:
            return -1
        total += v
    return total


@njit(cache=True)
def _grow(x, need):
    if need <= x.shape[0]:
        return x
    y = np.empty(max(need, 2 * x.shape[0]), dtype=x.dtype)
    y[: x.shape[0]] = x
    return y


@njit(cache=True)
def expand_kernel(last2, parent_q, level, n, symmetric, firsts, tables, lo, widths, use_bound):
    """Children of every beam node at ``level`` (1-based row being placed).

    ``last2[p]`` holds the two most recent rows of node ``p`` (zero padded).
    """
    k = last2.shape[0]
    cap = 1024
    parent = np.empty(cap, dtype=np.int64)
    value = np.empty(cap, dtype=np.int64)
    qual = np.empty(cap, dtype=np.int64)
    score = np.empty(cap, dtype=np.int64)
    buf = np.empty(4096, dtype=np.int64)
    m = 0
    for p in range(k):
        a = last2[p, 0]
        b = last2[p, 1]
        if level == 1:
            cands = firsts
            cnt = firsts.shape[0]
        else:
            cnt = R._extensions_into(a, b, n, buf)
            if cnt > buf.shape[0]:
                buf = np.empty(cnt, dtype=np.int64)
                cnt = R._extensions_into(a, b, n, buf)
            cands = buf
        for t in range(cnt):
            c = cands[t]
            if symmetric and level > 1 and not is_symmetric(c, n):
                continue
            if level == n and (R.has_three_adjacent(c) or not R.stable(b, c, 0, n)):
                continue
            q = parent_q[p] + R.zeroes(c, n)
            s = q
            if use_bound and level < n:
                extra = _completion(tables, lo, widths, level, b, c)
                if extra < 0:
                    continue
                s = q + extra
            if m == parent.shape[0]:
                parent = _grow(parent, m + 1)
                value = _grow(value, m + 1)
                qual = _grow(qual, m + 1)
                score = _grow(score, m + 1)
            parent[m] = p
            value[m] = c
            qual[m] = q
            score[m] = s
            m += 1
    return parent[:m], value[:m], qual[:m], score[:m]


@njit(cache=True)
def complete_kernel(prefix, n, seed):
    """Extend a prefix to n rows with uniformly chosen stable extensions.

    When a pair of rows has no stable continuation a uniform random row is
    used instead; the memetic repair handles the rest.
    """
    np.random.seed(seed)
    out = np.zeros(n, dtype=np.int64)
    i = prefix.shape[0]
    out[:i] = prefix
    buf = np.empty(4096, dtype=np.int64)
    for L in range(i, n):
        if L == 0:
            while True:
                r = np.random.randint(0, 1 << n)
                if not R.has_three_adjacent(r):
                    break
            out[0] = r
            continue
        a = out[L - 2] if L >= 2 else 0
        b = out[L - 1]
        cnt = R._extensions_into(a, b, n, buf)
        if cnt > buf.shape[0]:
            buf = np.empty(cnt, dtype=np.int64)
            cnt = R._extensions_into(a, b, n, buf)
        if L == n - 1:
            # prefer rows that also close the board
            good = 0
            for t in range(cnt):
                c = buf[t]
                if not R.has_three_adjacent(c) and R.stable(b, c, 0, n):
                    buf[good] = c
                    good += 1
            if good > 0:
                cnt = good
        if cnt > 0:
            out[L] = buf[np.random.randint(0, cnt)]
        else:
            out[L] = np.random.randint(0, 1 << n)
    return out


class StillLifeBeamModel:
    """Beam branching over stable row extensions.

    Quality is the dead-cell count of the prefix; with ``bound`` the score adds
    the column-slice completion estimate for the rows still to come.
    """

    def __init__(self, model: StillLifeModel, bound: ColumnBound | None = None):
        self.model = model
        self.n = model.n
        self.bound = bound
        self.firsts = first_rows(model.n, model.symmetric)
        if bound is not None:
            self._tables = bound.tables
            self._lo = bound.lo
            self._w = bound.widths
        else:
            self._tables = np.zeros((1, 1, 1, 1), dtype=np.uint16)
            self._lo = np.zeros(1, dtype=np.int64)
            self._w = np.ones(1, dtype=np.int64)

    @classmethod
    def with_mb(cls, model: StillLifeModel, M: int | None = None, z: int | None = None):
        return cls(model, build_mb_columns(model, M, z))

    def expand(self, prefixes: np.ndarray, quality: np.ndarray):
        k, i = prefixes.shape
        last2 = np.zeros((k, 2), dtype=np.int64)
        if i >= 1:
            last2[:, 1] = prefixes[:, i - 1]
        if i >= 2:
            last2[:, 0] = prefixes[:, i - 2]
        return expand_kernel(last2, np.ascontiguousarray(quality, dtype=np.int64), i + 1,
                             self.n, self.model.symmetric, self.firsts, self._tables,
                             self._lo, self._w, self.bound is not None)

    def assignment(self, values) -> Assignment:
        # value indices in the full row domain are the rows themselves
        if self.model.symmetric:
            dom = np.asarray(self.model.domain())
            return Assignment.from_values(np.searchsorted(dom, values).tolist())
        return Assignment.from_values([int(v) for v in values])

    def root_bound(self) -> int:
        return 0 if self.bound is None else self.bound.root()


def complete_prefix(prefix, n: int, rng) -> np.ndarray:
    return complete_kernel(np.asarray(prefix, dtype=np.int64), n, int(rng.integers(1 << 31)))

