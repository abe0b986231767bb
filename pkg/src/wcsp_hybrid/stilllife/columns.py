"""Column-slice mini-bucket bound on the dead cells of unfinished boards.

Each row is cut into ``M`` contiguous column slices.  A slice is a small
row-chain WCSP over a window of the board: the slice columns, optionally
widened by context columns borrowed from the neighbours.  Dead cells are
counted on the slice columns only, and stability is required only of slice
cells whose whole neighbourhood lies in the window (or off the board).  Every
feasible board restricted to a window is feasible in that slice problem, so
the summed slice optima never exceed the true remaining cost.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..bucket import DEFAULT_MEMORY_CAP
from ..core import TOP, CostFunction, MemoryRefusal, WcspInstance
from ..minibucket import MbHeuristic, level_table, mb_preprocess
from . import rows as R
from .model import SMALL_TOP, StillLifeModel


def slice_bounds(n: int, M: int) -> list[tuple[int, int]]:
    width = -(-n // M)
    out = []
    lo = 0
    while lo < n:
        out.append((lo, min(n, lo + width)))
        lo += width
    return out


def slice_window(n: int, lo: int, hi: int, context: int = 0) -> tuple[int, int]:
    """Columns a slice looks at: its own plus ``context`` columns per cut."""
    return max(0, lo - context), min(n, hi + context)


def _enforced(n: int, lo: int, hi: int, wlo: int, whi: int) -> int:
    """Slice cells whose whole neighbourhood is inside the window or off board."""
    mask = 0
    for g in range(lo, hi):
        if (g == 0 or g - 1 >= wlo) and (g == n - 1 or g + 1 < whi):
            mask |= 1 << (g - wlo)
    return mask


def _slice_cost(level: int, a, b, c, n: int, lo: int, hi: int, context: int = 0) -> np.ndarray:
    """Row cost of one slice, over rows restricted to the slice window.

    Dead cells are counted on the slice columns only; stability is required
    only where a cell's neighbourhood is fully visible.
    """
    wlo, whi = slice_window(n, lo, hi, context)
    w = whi - wlo
    a = np.zeros_like(b) if level == 1 else a
    c = np.zeros_like(b) if level == n else c
    a, b, c = np.broadcast_arrays(a, b, c)
    own = ((1 << (hi - lo)) - 1) << (lo - wlo)
    bad = (R.unstable_cells_np(a, b, c, w) & _enforced(n, lo, hi, wlo, whi)) != 0
    if level == 1 or level == n:
        bad |= (b & (b >> 1) & (b >> 2)) != 0
    if 1 < level < n:
        abc = a & b & c
        if wlo == 0:
            bad |= (abc & 1) != 0
        if whi == n:
            bad |= (abc >> (w - 1) & 1) != 0
    cost = (hi - lo) - R.popcount_np(b & own)
    return np.where(bad, TOP, cost).astype(np.int64)


def slice_instance(n: int, lo: int, hi: int, context: int = 0) -> WcspInstance:
    wlo, whi = slice_window(n, lo, hi, context)
    vals = np.arange(1 << (whi - wlo), dtype=np.int64)
    A, B = np.meshgrid(vals, vals, indexing="ij")
    fs = [CostFunction((0, 1), _slice_cost(1, None, A, B, n, lo, hi, context))]
    if n > 2:
        # filled one value of the first row at a time to bound temporaries
        middle = np.empty((len(vals),) * 3, dtype=np.int64)
        for a in vals:
            middle[a] = _slice_cost(2, a, A, B, n, lo, hi, context)
        for i in range(2, n):
            fs.append(CostFunction((i - 2, i - 1, i), middle))
    fs.append(CostFunction((n - 2, n - 1), _slice_cost(n, A, B, None, n, lo, hi, context)))
    return WcspInstance([vals] * n, fs)


@dataclass
class ColumnBound:
    """Completion estimate summed over column slices.

    ``tables[L, s]`` is indexed by (window of r_{L-1}, window of r_L) and holds
    a lower bound on the dead cells of rows L+1..n inside slice ``s``.
    """

    n: int
    slices: list
    heuristics: list
    tables: np.ndarray  # (n + 1, S, 2**wmax, 2**wmax) uint16
    context: int = 0

    @property
    def windows(self) -> list[tuple[int, int]]:
        return [slice_window(self.n, lo, hi, self.context) for lo, hi in self.slices]

    @property
    def lo(self) -> np.ndarray:
        return np.array([w[0] for w in self.windows], dtype=np.int64)

    @property
    def widths(self) -> np.ndarray:
        return np.array([w[1] - w[0] for w in self.windows], dtype=np.int64)

    def completion(self, level: int, a: int, b: int) -> int:
        total = 0
        for s, (lo, hi) in enumerate(self.windows):
            m = (1 << (hi - lo)) - 1
            v = int(self.tables[level, s, (a >> lo) & m, (b >> lo) & m])
            if v >= SMALL_TOP:
                return TOP
            total += v
        return total

    def root(self) -> int:
        """Bound on the whole board (the empty prefix)."""
        total = 0
        for h in self.heuristics:
            total += h.bound
        return min(total, TOP)


def _completion_tables(h: MbHeuristic, n: int, w: int, own: int) -> np.ndarray:
    size = 1 << w
    zb = R.popcount_np(np.int64(own)) - R.popcount_np(np.arange(size, dtype=np.int64) & own)
    out = np.zeros((n + 1, size, size), dtype=np.int64)
    for L in range(1, n):
        if L == 1:
            t = level_table(h, 1, (0,), (size,))
            t = np.broadcast_to(t[None, :], (size, size))
        else:
            t = level_table(h, L, (L - 2, L - 1), (size, size))
        out[L] = np.where(t >= TOP, TOP, t - zb[None, :])
    return out


MAX_WINDOW = 8  # widest slice window (bits) chosen automatically


def auto_context(n: int, M: int) -> int:
    """One context column per cut when the widened windows stay small."""
    width = max(hi - lo for lo, hi in slice_bounds(n, M))
    return 1 if M > 1 and width + 2 <= MAX_WINDOW else 0


def build_mb_columns(model: StillLifeModel, M: int | None = None, z: int | None = None,
                     memory_cap: int = DEFAULT_MEMORY_CAP, context: int | None = None
                     ) -> ColumnBound:
    n = model.n
    M = model.columns if M is None else M
    z = model.z if z is None else z
    if context is None:
        context = auto_context(n, M)
    slices = slice_bounds(n, M)
    windows = [slice_window(n, lo, hi, context) for lo, hi in slices]
    wmax = max(hi - lo for lo, hi in windows)
    size = 1 << wmax
    entries = (1 << (3 * wmax)) * 3
    if entries > memory_cap:
        raise MemoryRefusal(entries, memory_cap, "column-slice tables")
    tables = np.full((n + 1, len(slices), size, size), SMALL_TOP, dtype=np.uint16)
    heuristics = []
    for s, ((lo, hi), (wlo, whi)) in enumerate(zip(slices, windows)):
        w = whi - wlo
        own = ((1 << (hi - lo)) - 1) << (lo - wlo)
        h = mb_preprocess(slice_instance(n, lo, hi, context), z, tuple(range(n)), memory_cap)
        heuristics.append(h)
        comp = _completion_tables(h, n, w, own)
        comp = np.where(comp >= TOP, int(SMALL_TOP), np.minimum(comp, int(SMALL_TOP) - 1))
        tables[:, s, : 1 << w, : 1 << w] = comp
    tables[n] = 0
    return ColumnBound(n, slices, heuristics, tables, context)
