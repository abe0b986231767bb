"""Still-life boards as a memetic-algorithm problem.

Genomes are ``int64`` arrays of ``n`` bit-packed rows.
"""

from __future__ import annotations

import numpy as np

from ..bucket import DEFAULT_MEMORY_CAP, be_recombine
from ..core import Assignment
from ..memetic import FitnessTriple
from . import local
from .model import StillLifeModel, build_wcsp


class StillLifeProblem:
    def __init__(self, n: int, tenure: int | None = None, stall: int | None = None,
                 max_moves: int | None = None, memory_cap: int = DEFAULT_MEMORY_CAP,
                 exact_recombination: bool = False):
        self.n = n
        self.model = StillLifeModel(n)
        self.wcsp = build_wcsp(self.model)
        self.tenure = n if tenure is None else tenure
        self.stall = 2 * n * n if stall is None else stall
        self.max_moves = 50 * n * n if max_moves is None else max_moves
        self.memory_cap = memory_cap
        self.exact_recombination = exact_recombination
        self._weights = np.int64(1) << np.arange(n, dtype=np.int64)

    @property
    def n_genes(self) -> int:
        return self.n * self.n

    @property
    def known_optimum(self):
        return self.model.known_optimum

    def key(self, genome) -> bytes:
        return np.asarray(genome, dtype=np.int64).tobytes()

    def random_genome(self, rng) -> np.ndarray:
        return rng.integers(0, 1 << self.n, size=self.n, dtype=np.int64)

    def fitness(self, genome) -> FitnessTriple:
        return FitnessTriple(*local.unpack(local.fitness_key(np.asarray(genome, dtype=np.int64), self.n)))

    def improve(self, genome, rng, tenure=None, stall=None):
        tenure = self.tenure if tenure is None else tenure
        stall = self.stall if stall is None else stall
        seed = int(rng.integers(1 << 31))
        rows, key, _ = local.tabu_kernel(np.asarray(genome, dtype=np.int64), self.n,
                                         tenure, stall, self.max_moves, seed)
        return rows, FitnessTriple(*local.unpack(key))

    def mutate(self, genome, p_m: float, rng) -> np.ndarray:
        g = np.asarray(genome, dtype=np.int64)
        if p_m <= 0:
            return g.copy()
        flips = rng.random((self.n, self.n)) < p_m
        return g ^ (flips.astype(np.int64) @ self._weights)

    def blind_crossover(self, p1, p2, rng) -> np.ndarray:
        """Row-major single cut: cells before the cut from p1, the rest from p2."""
        n = self.n
        cut = int(rng.integers(1, n * n)) if n * n > 1 else 0
        r, j = divmod(cut, n)
        child = np.array(p2, dtype=np.int64, copy=True)
        child[:r] = np.asarray(p1)[:r]
        if r < n:
            low = (1 << j) - 1
            child[r] = (int(p1[r]) & low) | (int(p2[r]) & ~low & ((1 << n) - 1))
        return child

    def optimal_recombination(self, parents) -> np.ndarray:
        """Best child over the parental rows of each position.

        Runs the row-chain elimination with violations priced above any dead
        count, which equals exact ``be_recombine`` whenever a feasible child
        exists and otherwise still returns a least-violating child instead of
        an arbitrary one.
        """
        if self.exact_recombination:
            # on the full row domain the value index of a row is the row itself
            assigns = [Assignment.from_values(np.asarray(p).tolist()) for p in parents]
            _, child = be_recombine(self.wcsp, assigns, self.memory_cap)
            return np.array(child.values(self.n), dtype=np.int64)
        stack = np.array([np.asarray(p, dtype=np.int64) for p in parents])
        cands = np.zeros((self.n, len(parents)), dtype=np.int64)
        sizes = np.zeros(self.n, dtype=np.int64)
        for i in range(self.n):
            u = np.unique(stack[:, i])
            cands[i, : len(u)] = u
            sizes[i] = len(u)
        child, _ = local.soft_recombine(cands, sizes, self.n)
        return child
