"""Level-synchronous beam search over partial assignments.

A model exposes ``n`` and ``expand(prefixes, quality)``.  Given the current
beam as an ``(k, i)`` array of prefix values and their cached qualities it
returns four equally long arrays ``(parent, value, quality, score)``, one
entry per feasible child.  ``score`` is the selection key (quality plus an
optional completion bound); infeasible children are simply not returned.

Children are ranked by ``(score, quality, prefix)`` with prefixes compared
lexicographically, and the best ``k_bw`` survive.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .core import TOP, Assignment, WcspInstance, add
from .minibucket import MbHeuristic

UNLIMITED = None


@dataclass(frozen=True)
class BeamConfig:
    k_bw: int | None = 2000  # None: keep every node
    k_ext: int | None = UNLIMITED

    def __post_init__(self):
        if self.k_bw is not None and self.k_bw < 1:
            raise ValueError("k_bw must be at least 1")
        if self.k_ext is not None and self.k_ext < 1:
            raise ValueError("k_ext must be at least 1")


@dataclass(frozen=True)
class PartialSolution:
    prefix: tuple[int, ...]
    quality: int
    bound: int = 0

    @property
    def score(self) -> int:
        return add(self.quality, self.bound)

    def assignment(self, ordering: Sequence[int] | None = None) -> Assignment:
        return Assignment.from_values(self.prefix, ordering[: len(self.prefix)] if ordering else None)


class Level:
    """Sorted candidate pool of one level (before trimming to the beam)."""

    def __init__(self, index: int, parents: np.ndarray, parent: np.ndarray, value: np.ndarray,
                 quality: np.ndarray, score: np.ndarray, elapsed: float):
        self.index = index  # number of bound variables in every pool node
        self._parents = parents
        self.parent = parent
        self.value = value
        self.quality = quality
        self.score = score
        self.elapsed = elapsed

    def __len__(self) -> int:
        return len(self.value)

    def prefixes(self, k: int | None = None) -> np.ndarray:
        k = len(self) if k is None else min(k, len(self))
        return np.concatenate([self._parents[self.parent[:k]], self.value[:k, None]], axis=1)

    def top(self, k: int | None = None) -> list[PartialSolution]:
        rows = self.prefixes(k)
        return [PartialSolution(tuple(int(v) for v in r), int(q), int(s) - int(q))
                for r, q, s in zip(rows, self.quality, self.score)]

    @property
    def best_score(self) -> int:
        return int(self.score[0]) if len(self) else TOP


@dataclass
class BeamResult:
    cost: int
    assignment: Assignment | None
    values: np.ndarray | None
    levels: list = field(default_factory=list)  # (index, pool size, beam best score, elapsed)

    def __iter__(self):
        yield self.cost
        yield self.assignment


def _cap_per_parent(parent, value, quality, score, k_ext: int):
    order = np.lexsort((value, quality, score, parent))
    p = parent[order]
    start = np.r_[0, np.flatnonzero(p[1:] != p[:-1]) + 1]
    rank = np.arange(len(p)) - np.repeat(start, np.diff(np.r_[start, len(p)]))
    keep = order[rank < k_ext]
    return parent[keep], value[keep], quality[keep], score[keep]


def select_order(parent_rank: np.ndarray, value: np.ndarray, quality: np.ndarray,
                 score: np.ndarray) -> np.ndarray:
    """Indices sorting children by score, quality, then lexicographic prefix."""
    return np.lexsort((value, parent_rank, quality, score))


def _lex_ranks(prefixes: np.ndarray) -> np.ndarray:
    if prefixes.shape[1] == 0:
        return np.zeros(len(prefixes), dtype=np.int64)
    order = np.lexsort(prefixes.T[::-1])
    rank = np.empty(len(order), dtype=np.int64)
    rank[order] = np.arange(len(order))
    return rank


def bs_run(model, cfg: BeamConfig = BeamConfig(), quality: Callable | None = None,
           on_level: Callable[[Level], None] | None = None) -> BeamResult:
    """Best complete solution reached by the beam, or ``(TOP, None)``.

    ``quality`` optionally replaces the model's own scoring with a function of
    the prefix value tuple (TOP prunes the prefix).
    """
    if quality is not None:
        model = QualityModel(model, quality)
    t0 = time.perf_counter()
    beam = np.zeros((1, 0), dtype=np.int64)
    beam_q = np.zeros(1, dtype=np.int64)
    result = BeamResult(TOP, None, None)
    for i in range(1, model.n + 1):
        parent, value, q, s = (np.asarray(x, dtype=np.int64) for x in model.expand(beam, beam_q))
        if cfg.k_ext is not None and len(value):
            parent, value, q, s = _cap_per_parent(parent, value, q, s, cfg.k_ext)
        rank = _lex_ranks(beam)
        order = select_order(rank[parent], value, q, s)
        parent, value, q, s = parent[order], value[order], q[order], s[order]
        # drop exact duplicate children (same parent and value)
        if len(value) > 1:
            dup = np.r_[False, (parent[1:] == parent[:-1]) & (value[1:] == value[:-1])]
            if dup.any():
                parent, value, q, s = parent[~dup], value[~dup], q[~dup], s[~dup]
        level = Level(i, beam, parent, value, q, s, time.perf_counter() - t0)
        if on_level is not None:
            on_level(level)
        if not len(value):
            result.levels.append((i, 0, TOP, level.elapsed))
            return result
        k = len(value) if cfg.k_bw is None else min(cfg.k_bw, len(value))
        beam = level.prefixes(k)
        beam_q = q[:k]
        result.levels.append((i, len(value), int(s[0]), level.elapsed))
    result.cost = int(beam_q[0])
    result.values = beam[0].copy()
    result.assignment = model.assignment(beam[0])
    return result


# ------------------------------------------------------------------ models

class WcspBeamModel:
    """Any WCSP, branching over the full domain of the next variable.

    Quality is the cost of the functions whose scope is fully bound; with a
    mini-bucket heuristic the score is the mini-bucket estimate of the prefix.
    """

    def __init__(self, instance: WcspInstance, heuristic: MbHeuristic | None = None):
        self.instance = instance
        self.order = tuple(heuristic.order if heuristic is not None else instance.ordering)
        self.heuristic = heuristic
        self.n = instance.n
        pos = {v: p for p, v in enumerate(self.order)}
        # functions that become fully bound at each depth
        self.closing = [[] for _ in range(self.n + 1)]
        for f in instance.functions:
            depth = 1 + max((pos[v] for v in f.scope), default=-1)
            self.closing[depth].append(f)
        self.base = 0
        for f in self.closing[0]:
            self.base = add(self.base, int(f.table))

    @staticmethod
    def _sum_at(functions, cols: dict, m: int) -> np.ndarray:
        total = np.zeros(m, dtype=np.int64)
        for f in functions:
            total = np.minimum(total + f.lookup(*(cols[v] for v in f.scope)), TOP)
        return total

    def expand(self, prefixes: np.ndarray, quality: np.ndarray):
        k, i = prefixes.shape
        x = self.order[i]
        d = self.instance.domain_sizes[x]
        parent = np.repeat(np.arange(k), d)
        value = np.tile(np.arange(d), k)
        cols = {self.order[p]: prefixes[parent, p] for p in range(i)}
        cols[x] = value
        base = quality[parent] if i else np.full(len(value), self.base, dtype=np.int64)
        q = np.minimum(base + self._sum_at(self.closing[i + 1], cols, len(value)), TOP)
        if self.heuristic is None:
            s = q
        else:
            s = self._sum_at(self.heuristic.levels[i + 1], cols, len(value))
            s = np.maximum(s, q)
        ok = (q < TOP) & (s < TOP)
        return parent[ok], value[ok], q[ok], s[ok]

    def assignment(self, values) -> Assignment:
        return Assignment.from_values(values, self.order)


class QualityModel:
    """Wraps a model's branching with a caller-supplied prefix quality."""

    def __init__(self, model, quality: Callable):
        self.model = model
        self.quality = quality
        self.n = model.n

    def expand(self, prefixes, quality):
        parent, value, _, _ = self.model.expand(prefixes, quality)
        q = np.array([self.quality(tuple(int(v) for v in prefixes[p]) + (int(a),))
                      for p, a in zip(parent, value)], dtype=np.int64)
        ok = q < TOP
        return parent[ok], value[ok], q[ok], q[ok]

    def assignment(self, values):
        return self.model.assignment(values)


def extend_partial(model, s: PartialSolution, k_ext: int | None = UNLIMITED
                   ) -> list[PartialSolution]:
    """Feasible children of one node, best first, at most ``k_ext``."""
    prefix = np.array([s.prefix], dtype=np.int64).reshape(1, len(s.prefix))
    parent, value, q, sc = (np.asarray(x, dtype=np.int64)
                            for x in model.expand(prefix, np.array([s.quality], dtype=np.int64)))
    order = np.lexsort((value, q, sc))
    if k_ext is not None:
        order = order[:k_ext]
    return [PartialSolution(s.prefix + (int(value[j]),), int(q[j]), int(sc[j]) - int(q[j]))
            for j in order]
