"""Maximum density still life as a row-chain weighted CSP."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from ..core import TOP, Assignment, CostFunction, MemoryRefusal, WcspError, WcspInstance, take
from . import rows as R

# known optima (dead cells); the symmetric relaxation has its own column
OPTIMUM = {5: 9, 6: 18, 7: 21, 8: 28, 9: 38, 10: 46, 11: 57,
           12: 68, 13: 79, 14: 92, 15: 106, 16: 120, 17: 137, 18: 153, 19: 171, 20: 190}
SYMMETRIC_OPTIMUM = {12: 68, 13: 79, 14: 92, 15: 106, 16: 120, 17: 137, 18: 154, 19: 172,
                     20: 192, 22: 232, 24: 276, 26: 326, 28: 378}
BEST_KNOWN = {**OPTIMUM, 22: 232, 24: 275, 26: 324, 28: 378}

SMALL_TOP = np.uint16(65535)
DENSE_CAP = 1 << 22


@dataclass(frozen=True)
class StillLifeModel:
    n: int
    symmetric: bool = False
    M: int | None = None  # column slices for the mini-bucket bound
    z: int = 3

    def __post_init__(self):
        if not 2 <= self.n <= R.MAX_WIDTH:
            raise WcspError(f"board size {self.n} outside 2..{R.MAX_WIDTH}")

    @property
    def columns(self) -> int:
        if self.M is not None:
            return self.M
        return 4 if self.n >= 22 else 3

    def domain(self):
        """Row values of every variable; the full domain is kept as a range."""
        if self.symmetric:
            return R.symmetric_rows(self.n)
        return range(1 << self.n)

    @property
    def known_optimum(self) -> int | None:
        table = SYMMETRIC_OPTIMUM if self.symmetric else OPTIMUM
        return table.get(self.n)


def row_cost_np(level: int, a, b, c, n: int) -> np.ndarray:
    """Vectorised row-``level`` cost (1-based); TOP where forbidden."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    c = np.asarray(c, dtype=np.int64)
    if level == 1:
        a = np.zeros_like(a)
    if level == n:
        c = np.zeros_like(c)
    a, b, c = np.broadcast_arrays(a, b, c)
    bad = R.unstable_cells_np(a, b, c, n) != 0
    if level == 1 or level == n:
        bad |= (b & (b >> 1) & (b >> 2)) != 0
    if 1 < level < n:
        abc = a & b & c
        bad |= ((abc & 1) | (abc >> (n - 1) & 1)) != 0
    cost = n - R.popcount_np(b)
    return np.where(bad, TOP, cost).astype(np.int64)


class RowCostFunction(CostFunction):
    """Row function whose table is computed on demand from the row rules."""

    __slots__ = ("level", "n", "rows")

    def __init__(self, level: int, scope, rows, n: int):
        self.level = level
        self.n = n
        self.rows = tuple(r if isinstance(r, range) else np.asarray(r, dtype=np.int64)
                          for r in rows)
        super().__init__(scope, None)

    @property
    def shape(self):
        return tuple(len(r) for r in self.rows)

    def _abc(self, vals):
        if self.level == 1:
            b, c = vals
            return 0, b, c
        if self.level == self.n:
            a, b = vals
            return a, b, 0
        return vals

    def _costs(self, vals):
        return row_cost_np(self.level, *self._abc(vals), self.n)

    @property
    def table(self):
        if self._table is None:
            entries = int(np.prod(self.shape))
            if entries > DENSE_CAP:
                raise MemoryRefusal(entries, DENSE_CAP, f"dense table of f_{self.level}")
            grids = np.meshgrid(*(take(r, np.arange(len(r))) for r in self.rows), indexing="ij")
            self._table = self._costs(grids)
        return self._table

    def lookup(self, *indices):
        vals = [take(r, i) for r, i in zip(self.rows, indices)]
        return self._costs(vals)

    def restrict(self, keep):
        rows = [take(r, k) for r, k in zip(self.rows, keep)]
        grids = np.meshgrid(*rows, indexing="ij")
        return CostFunction(self.scope, self._costs(grids))


class StillLifeWcsp(WcspInstance):
    """Still-life instance; exact elimination uses the sparse row-chain path."""

    model: StillLifeModel

    def bucket_elimination(self, memory_cap: int):
        return chain_be(self, memory_cap)

    def rows_of(self, t) -> np.ndarray:
        values = t.values(self.n) if isinstance(t, Assignment) else list(t)
        return np.array([int(take(self.domains[v], x)) for v, x in enumerate(values)],
                        dtype=np.int64)

    def assignment_of(self, rows) -> Assignment:
        idx = []
        for v, r in enumerate(rows):
            dom = self.domains[v]
            i = int(r) - dom.start if isinstance(dom, range) else int(np.searchsorted(dom, r))
            if not 0 <= i < len(dom) or int(take(dom, i)) != int(r):
                raise WcspError(f"row {r} not in domain of variable {v}")
            idx.append(i)
        return Assignment.from_values(idx)


def build_wcsp(model: StillLifeModel) -> StillLifeWcsp:
    n = model.n
    dom = model.domain()
    functions = [RowCostFunction(1, (0, 1), (dom, dom), n)]
    for i in range(2, n):
        functions.append(RowCostFunction(i, (i - 2, i - 1, i), (dom, dom, dom), n))
    functions.append(RowCostFunction(n, (n - 2, n - 1), (dom, dom), n))
    inst = StillLifeWcsp([dom] * n, functions)
    inst.model = model
    return inst


# ---------------------------------------------------------------- chain BE

@njit(cache=True)
def _chain_backward(domain, index_of, n, tables):
    """tables[L-2] over (r_{L-1}, r_L) pairs holds the best cost of f_L..f_n."""
    d = domain.shape[0]
    buf = np.empty(1 << n, dtype=np.int64)
    last = tables[n - 2]
    for p in range(d):
        a = domain[p]
        for q in range(d):
            b = domain[q]
            if R.has_three_adjacent(b) or not R.stable(a, b, 0, n):
                last[p * d + q] = 65535
            else:
                last[p * d + q] = R.zeroes(b, n)
    for L in range(n - 1, 1, -1):
        nxt = tables[L - 1]
        cur = tables[L - 2]
        for q in range(d):
            b = domain[q]
            zb = R.zeroes(b, n)
            # rows r = index of c; nxt is indexed by (b, c) = q * d + r
            for p in range(d):
                a = domain[p]
                k = R._extensions_into(a, b, n, buf)
                best = 65535
                for t in range(k):
                    r = index_of[buf[t]]
                    if r < 0:
                        continue
                    v = nxt[q * d + r]
                    if v < best:
                        best = v
                if best == 65535:
                    cur[p * d + q] = 65535
                else:
                    cur[p * d + q] = best + zb
    # first row: zero row above
    first = np.full(d, 65535, dtype=np.int64)
    nxt = tables[0]
    for q in range(d):
        b = domain[q]
        if R.has_three_adjacent(b):
            continue
        k = R._extensions_into(0, b, n, buf)
        best = 65535
        for t in range(k):
            r = index_of[buf[t]]
            if r < 0:
                continue
            v = nxt[q * d + r]
            if v < best:
                best = v
        if best != 65535:
            first[q] = best + R.zeroes(b, n)
    return first


@njit(cache=True)
def _chain_forward(domain, index_of, n, tables, first):
    d = domain.shape[0]
    buf = np.empty(1 << n, dtype=np.int64)
    out = np.empty(n, dtype=np.int64)
    best = 65535
    arg = 0
    for q in range(d):
        if first[q] < best:
            best = first[q]
            arg = q
    out[0] = arg
    for L in range(2, n + 1):
        a = 0 if L == 2 else domain[out[L - 3]]
        b = domain[out[L - 2]]
        tab = tables[L - 2]
        k = R._extensions_into(a, b, n, buf)
        bestv = 65535
        arg = -1
        for t in range(k):
            r = index_of[buf[t]]
            if r < 0:
                continue
            v = tab[out[L - 2] * d + r]
            if v < bestv or (v == bestv and (arg < 0 or r < arg)):
                bestv = v
                arg = r
        out[L - 1] = arg if arg >= 0 else 0
    return out


def chain_tables(model: StillLifeModel, memory_cap: int = 1 << 28):
    """Backward pass of the row chain: (domain, index_of, tables, first-row costs)."""
    n = model.n
    dom = np.asarray(model.domain(), dtype=np.int64)
    d = len(dom)
    entries = n * d * d
    if entries > memory_cap:
        raise MemoryRefusal(entries, memory_cap, "row-chain bucket elimination")
    index_of = np.full(1 << n, -1, dtype=np.int64)
    index_of[dom] = np.arange(d)
    tables = np.empty((n - 1, d * d), dtype=np.uint16)
    first = _chain_backward(dom, index_of, n, tables)
    return dom, index_of, tables, first


def chain_be(inst: StillLifeWcsp, memory_cap: int = 1 << 28):
    model = inst.model
    dom, index_of, tables, first = chain_tables(model, memory_cap)
    opt = int(first.min())
    idx = _chain_forward(dom, index_of, model.n, tables, first)
    if opt >= 65535:
        return TOP, Assignment.from_values([0] * model.n)
    return opt, Assignment.from_values(idx.tolist())


# ------------------------------------------------------------ board level

@dataclass(frozen=True)
class Board:
    rows: tuple[int, ...]
    n: int

    def __post_init__(self):
        if len(self.rows) != self.n:
            raise WcspError(f"board has {len(self.rows)} rows, expected {self.n}")
        m = R.row_mask(self.n)
        for r in self.rows:
            if int(r) & ~m or int(r) < 0:
                raise WcspError(f"row {r} wider than {self.n}")

    @classmethod
    def from_rows(cls, rows, n: int | None = None) -> "Board":
        rows = tuple(int(r) for r in rows)
        return cls(rows, len(rows) if n is None else n)

    @classmethod
    def from_grid(cls, grid) -> "Board":
        grid = np.asarray(grid)
        rows = [int(sum(1 << j for j in range(grid.shape[1]) if grid[i, j]))
                for i in range(grid.shape[0])]
        return cls(tuple(rows), grid.shape[0])

    @classmethod
    def from_text(cls, text: str) -> "Board":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise WcspError("empty board text")
        n = len(lines)
        for k, ln in enumerate(lines, 1):
            if len(ln) != n or set(ln) - set("#."):
                raise WcspError(f"line {k}: expected {n} characters of '#'/'.'")
        return cls(tuple(R.parse_row(ln) for ln in lines), n)

    def to_text(self) -> str:
        return "".join(R.format_row(r, self.n, "#", ".") + "\n" for r in self.rows)

    def grid(self) -> np.ndarray:
        g = np.zeros((self.n, self.n), dtype=np.uint8)
        for i, r in enumerate(self.rows):
            for j in range(self.n):
                g[i, j] = r >> j & 1
        return g

    @property
    def dead(self) -> int:
        return self.n * self.n - int(self.grid().sum())


def life_step(grid: np.ndarray) -> np.ndarray:
    """One generation on a dead plane; the result is one cell larger per side."""
    g = np.pad(np.asarray(grid, dtype=np.int64), 2)
    h, w = g.shape
    nb = np.zeros_like(g)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di or dj:
                nb[1:h - 1, 1:w - 1] += g[1 + di:h - 1 + di, 1 + dj:w - 1 + dj]
    nxt = ((g == 1) & ((nb == 2) | (nb == 3))) | ((g == 0) & (nb == 3))
    return nxt[1:h - 1, 1:w - 1].astype(np.uint8)


def verify_still_life(board) -> bool:
    grid = board.grid() if isinstance(board, Board) else np.asarray(board)
    return bool(np.array_equal(life_step(grid), np.pad(grid.astype(np.uint8), 1)))


def evaluate_rows(rows, n: int) -> int:
    """Objective of a full board through the row functions (TOP if unstable)."""
    rows = [int(r) for r in rows]
    total = 0
    for i in range(1, n + 1):
        a = rows[i - 2] if i >= 2 else 0
        c = rows[i] if i < n else 0
        cost = R.row_cost(i, a, rows[i - 1], c, n)
        if cost is None:
            return TOP
        total += cost
    return total


def partial_quality(prefix, n: int, bound=None) -> int:
    """TOP when some fully determined check fails, else prefix dead cells.

    With a column bound the estimated dead cells of the remaining rows are
    added (admissible: never above the best feasible completion).
    """
    rows = [int(r) for r in prefix]
    i = len(rows)
    if not 1 <= i <= n:
        raise WcspError(f"prefix length {i} outside 1..{n}")
    if R.has_three_adjacent(rows[0]):
        return TOP
    for k in range(2, i + 1):
        a = rows[k - 3] if k >= 3 else 0
        b, c = rows[k - 2], rows[k - 1]
        if not R.stable(a, b, c, n):
            return TOP
        if k >= 3 and R.edge_birth(a, b, c, n):
            return TOP
    if i == n:
        a = rows[n - 2] if n >= 2 else 0
        if not R.stable(a, rows[n - 1], 0, n) or R.has_three_adjacent(rows[n - 1]):
            return TOP
    dead = sum(R.zeroes(r, n) for r in rows)
    if bound is None or i == n:
        return dead
    a = rows[i - 2] if i >= 2 else 0
    extra = bound.completion(i, a, rows[i - 1])
    return TOP if extra >= TOP else dead + extra
