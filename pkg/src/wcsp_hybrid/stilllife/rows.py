"""Bit-packed row primitives for n x n life boards.

Bit ``j`` of a row holds column ``j`` (0-based); the leftmost character in
the text form of a row is bit 0.  Everything here is pure and has both a
scalar Python entry point and a numba kernel used by the hot loops.
"""

from __future__ import annotations

import numpy as np
from numba import njit

MAX_WIDTH = 62


def row_mask(n: int) -> int:
    return (1 << n) - 1


def parse_row(text: str) -> int:
    """``'0110'`` or ``'.##.'`` -> int (first character is column 0)."""
    row = 0
    for j, ch in enumerate(text):
        if ch in "1#":
            row |= 1 << j
        elif ch not in "0.":
            raise ValueError(f"bad cell character {ch!r}")
    return row


def format_row(row: int, n: int, live: str = "1", dead: str = "0") -> str:
    return "".join(live if row >> j & 1 else dead for j in range(n))


@njit(cache=True)
def popcount(x: int) -> int:
    c = 0
    while x:
        x &= x - 1
        c += 1
    return c


@njit(cache=True)
def zeroes(a: int, n: int) -> int:
    return n - popcount(a)


@njit(cache=True)
def adjs(a: int) -> int:
    best = 0
    run = 0
    while a:
        if a & 1:
            run += 1
            if run > best:
                best = run
        else:
            run = 0
        a >>= 1
    return best


@njit(cache=True)
def has_three_adjacent(a: int) -> bool:
    return (a & (a >> 1) & (a >> 2)) != 0


@njit(cache=True)
def eta(a: int, b: int, c: int, i: int, n: int) -> int:
    """Live neighbours of cell ``i`` (1-based column) of the middle row."""
    total = 0
    for j in range(max(1, i - 1), min(n, i + 1) + 1):
        bit = j - 1
        total += (a >> bit & 1) + (b >> bit & 1) + (c >> bit & 1)
    return total - (b >> (i - 1) & 1)


@njit(cache=True)
def unstable_cells(a: int, b: int, c: int, n: int) -> int:
    """Bitmask of cells of ``b`` that change state one step later.

    Word-parallel: the eight neighbour planes are summed with a bit-sliced
    adder, so each bit position carries its own 4-bit neighbour count.
    """
    m = (1 << n) - 1
    planes = (
        (a << 1) & m, a, a >> 1,
        (b << 1) & m, b >> 1,
        (c << 1) & m, c, c >> 1,
    )
    s0 = 0
    s1 = 0
    s2 = 0
    s3 = 0
    for p in planes:
        carry0 = s0 & p
        s0 ^= p
        carry1 = s1 & carry0
        s1 ^= carry0
        carry2 = s2 & carry1
        s2 ^= carry1
        s3 |= carry2
    low = ~s2 & ~s3 & m
    two_or_three = s1 & low
    exactly_three = s0 & two_or_three
    # live cell survives on 2 or 3; dead cell is born on exactly 3
    return ((b & ~two_or_three) | (~b & exactly_three)) & m


@njit(cache=True)
def stable(a: int, b: int, c: int, n: int) -> bool:
    return unstable_cells(a, b, c, n) == 0


@njit(cache=True)
def edge_birth(a: int, b: int, c: int, n: int) -> bool:
    """Birth just outside the left or right board edge next to row ``b``."""
    left = a & b & c & 1
    right = (a & b & c) >> (n - 1) & 1
    return (left | right) != 0


def mirror(row: int, n: int) -> int:
    out = 0
    for j in range(n):
        if row >> j & 1:
            out |= 1 << (n - 1 - j)
    return out


def symmetric_rows(n: int) -> np.ndarray:
    """All rows with bit j == bit n-1-j, ascending."""
    half = (n + 1) // 2
    rows = []
    for h in range(1 << half):
        row = 0
        for j in range(half):
            if h >> j & 1:
                row |= 1 << j
                row |= 1 << (n - 1 - j)
        rows.append(row)
    return np.array(sorted(rows), dtype=np.int64)


@njit(cache=True)
def _extensions_into(a: int, b: int, n: int, out: np.ndarray) -> int:
    """Write every row ``c`` with Stable(a, b, c) and no edge birth into out.

    Cell-by-cell DFS over the bits of ``c``; placing c_j fixes the full
    neighbourhood of b_{j-1}, which is checked immediately.  Returns the
    number of rows found; only the first ``len(out)`` are stored, so callers
    retry with a larger buffer when the count exceeds it.
    """
    # known neighbour contribution per column, from a and b only
    known = np.empty(n, dtype=np.int64)
    for j in range(n):
        k = 0
        for jj in range(j - 1, j + 2):
            if 0 <= jj < n:
                k += a >> jj & 1
                if jj != j:
                    k += b >> jj & 1
        known[j] = k
    count = 0
    choice = np.zeros(n + 1, dtype=np.int64)
    j = 0
    c = 0
    choice[0] = -1
    while j >= 0:
        choice[j] += 1
        if choice[j] > 1:
            j -= 1
            continue
        if choice[j] == 1:
            c |= 1 << j
        else:
            c &= ~(1 << j)
        ok = True
        # edge birth columns
        if j == 0 and (a & b & 1) and choice[0] == 1:
            ok = False
        if ok and j == n - 1 and ((a & b) >> (n - 1) & 1) and choice[j] == 1:
            ok = False
        # cell j-1 is now fully determined
        if ok and j >= 1:
            col = j - 1
            s = choice[j]
            s += choice[j - 1]
            if j >= 2:
                s += choice[j - 2]
            e = known[col] + s
            if b >> col & 1:
                ok = 2 <= e <= 3
            else:
                ok = e != 3
        if ok and j == n - 1:
            col = n - 1
            s = choice[j]
            if n >= 2:
                s += choice[j - 1]
            e = known[col] + s
            if b >> col & 1:
                ok = 2 <= e <= 3
            else:
                ok = e != 3
        if not ok:
            continue
        if j == n - 1:
            if count < out.shape[0]:
                out[count] = c
            count += 1
            continue
        j += 1
        choice[j] = -1
    return count


def stable_extensions(a: int, b: int, n: int, is_first: bool = False) -> list[int]:
    """Rows that can follow ``a, b`` without destabilising ``b``.

    With ``is_first`` the arguments ``a, b`` are ignored and the candidates for
    the first row are returned instead: rows with no three adjacent live cells.
    """
    if is_first:
        return [r for r in range(1 << n) if not has_three_adjacent(r)]
    buf = np.empty(1024, dtype=np.int64)
    k = _extensions_into(a, b, n, buf)
    if k > buf.shape[0]:
        buf = np.empty(k, dtype=np.int64)
        k = _extensions_into(a, b, n, buf)
    return sorted(buf[:k].tolist())


def row_cost(i: int, a: int, b: int, c: int, n: int) -> int | None:
    """Cost of the row-``i`` function (1-based); ``None`` stands for TOP."""
    if i == 1:
        a = 0
    if i == n:
        c = 0
    if not stable(a, b, c, n):
        return None
    if (i == 1 or i == n) and has_three_adjacent(b):
        return None
    if 1 < i < n and edge_birth(a, b, c, n):
        return None
    return zeroes(b, n)


# vectorised helpers over int64 arrays (numpy broadcasting)

def unstable_cells_np(a, b, c, n: int) -> np.ndarray:
    m = np.int64((1 << n) - 1)
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    c = np.asarray(c, dtype=np.int64)
    planes = ((a << 1) & m, a, a >> 1, (b << 1) & m, b >> 1, (c << 1) & m, c, c >> 1)
    s0 = s1 = s2 = s3 = np.int64(0)
    for p in planes:
        carry0 = s0 & p
        s0 = s0 ^ p
        carry1 = s1 & carry0
        s1 = s1 ^ carry0
        carry2 = s2 & carry1
        s2 = s2 ^ carry1
        s3 = s3 | carry2
    low = ~s2 & ~s3 & m
    two_or_three = s1 & low
    exactly_three = s0 & two_or_three
    return ((b & ~two_or_three) | (~b & exactly_three)) & m


def popcount_np(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.uint64)
    return np.bitwise_count(x).astype(np.int64)
