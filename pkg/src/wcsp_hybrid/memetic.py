"""Steady-state memetic algorithm with tabu improvement and BE recombination.

The algorithm is problem-agnostic; a problem object supplies genomes and
operators (see ``stilllife.problem.StillLifeProblem`` for the reference
implementation and the attribute list it provides).
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field, replace
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .core import MemoryRefusal

log = logging.getLogger(__name__)

VARIANTS = ("ts", "be", "be1f", "be2f")


class FitnessTriple(NamedTuple):
    violations: int
    distance: int
    objective: int

    @property
    def feasible(self) -> bool:
        return self.violations == 0


@dataclass
class Individual:
    genome: np.ndarray
    fitness: FitnessTriple


@dataclass(frozen=True)
class MaConfig:
    popsize: int = 100
    p_x: float = 0.9
    p_m: float | None = None  # None: one expected flip per genome
    arity: int = 2
    variant: str = "be"
    generations: int | None = None
    time_limit: float | None = None
    tenure: int | None = None
    stall: int | None = None
    seed: int = 0
    stop_at: int | None = None  # objective value that ends the run once feasible

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}; expected one of {VARIANTS}")
        if not 0 <= self.p_x <= 1:
            raise ValueError("p_x must lie in [0, 1]")
        if self.p_m is not None and not 0 <= self.p_m <= 1:
            raise ValueError("p_m must lie in [0, 1]")
        if self.arity < 2:
            raise ValueError("arity must be at least 2")
        if self.popsize < 1 or (self.p_x > 0 and self.popsize < self.arity):
            raise ValueError("popsize must be at least the recombination arity")


@dataclass
class GenerationStats:
    generation: int
    elapsed: float
    best: FitnessTriple
    worst: FitnessTriple
    feasible: int
    used_be: bool | None


@dataclass
class MaResult:
    best: Individual
    generations: int
    elapsed: float
    time_to_best: float
    trace: list = field(default_factory=list)  # (generation, elapsed, FitnessTriple) per new best
    be_calls: int = 0
    blind_calls: int = 0
    refusals: int = 0


def fitness(problem, genome) -> FitnessTriple:
    return problem.fitness(genome)


def tabu_search(problem, ind: Individual, rng, tenure: int | None = None,
                stall: int | None = None) -> Individual:
    genome, fit = problem.improve(ind.genome, rng, tenure, stall)
    if fit > ind.fitness:  # the walk returns its best visited; keep the input on a tie
        return ind
    return Individual(genome, fit)


def mutate(genome, p_m: float, rng, problem=None):
    if problem is not None:
        return problem.mutate(genome, p_m, rng)
    g = np.array(genome, copy=True)
    flips = rng.random(g.shape) < p_m
    return np.where(flips, 1 - g, g)


def recombine(problem, parents: Sequence, variant: str, rng, stats: dict | None = None):
    """Child genome; BE variants fall back to blind crossover when gated off."""
    use_be = variant != "ts"
    if variant in ("be1f", "be2f"):
        feas = [problem.fitness(p).feasible for p in parents]
        use_be = any(feas) if variant == "be1f" else all(feas)
    if use_be:
        try:
            child = problem.optimal_recombination(parents)
            if stats is not None:
                stats["be"] = stats.get("be", 0) + 1
                stats["last"] = True
            return child
        except MemoryRefusal as exc:
            log.info("BE recombination refused (%s); using blind crossover", exc)
            if stats is not None:
                stats["refused"] = stats.get("refused", 0) + 1
    if stats is not None:
        stats["blind"] = stats.get("blind", 0) + 1
        stats["last"] = False
    return problem.blind_crossover(parents[0], parents[1], rng)


class _Population:
    def __init__(self):
        self.members: list[Individual] = []
        self.keys: set = set()

    def add(self, ind: Individual, key) -> bool:
        if key in self.keys:
            return False
        self.members.append(ind)
        self.keys.add(key)
        return True

    def worst_index(self) -> int:
        return max(range(len(self.members)), key=lambda i: self.members[i].fitness)

    def best(self) -> Individual:
        return min(self.members, key=lambda m: m.fitness)


def ma_run(problem, cfg: MaConfig, initial_population: Sequence | None = None,
           on_generation: Callable[[GenerationStats], None] | None = None,
           seed: int | None = None) -> MaResult:
    if seed is not None:
        cfg = replace(cfg, seed=seed)
    rng = np.random.default_rng(cfg.seed)
    p_m = cfg.p_m if cfg.p_m is not None else 1.0 / problem.n_genes
    t0 = time.perf_counter()

    def improve(genome) -> Individual:
        return tabu_search(problem, Individual(genome, problem.fitness(genome)), rng,
                           cfg.tenure, cfg.stall)

    pop = _Population()
    for g in list(initial_population or [])[: cfg.popsize]:
        ind = improve(np.asarray(g))
        pop.add(ind, problem.key(ind.genome))
    attempts = 0
    while len(pop.members) < cfg.popsize and attempts < 20 * cfg.popsize:
        attempts += 1
        ind = improve(problem.random_genome(rng))
        pop.add(ind, problem.key(ind.genome))

    best = pop.best()
    time_to_best = time.perf_counter() - t0
    result = MaResult(best, 0, 0.0, time_to_best, [(0, time_to_best, best.fitness)])
    stats: dict = {}

    def done(gen: int) -> bool:
        if cfg.stop_at is not None and best.fitness.feasible and best.fitness.objective <= cfg.stop_at:
            return True
        if cfg.generations is not None and gen >= cfg.generations:
            return True
        if cfg.time_limit is not None and time.perf_counter() - t0 >= cfg.time_limit:
            return True
        return False

    def select():
        a, b = rng.integers(len(pop.members), size=2)
        m = pop.members
        return m[a] if m[a].fitness <= m[b].fitness else m[b]

    gen = 0
    while not done(gen):
        gen += 1
        stats["last"] = None
        if cfg.p_x > 0 and rng.random() < cfg.p_x:
            parents = [select().genome for _ in range(cfg.arity)]
            if cfg.variant != "ts":
                parents = [problem.mutate(p, p_m, rng) for p in parents]
                child = recombine(problem, parents, cfg.variant, rng, stats)
            else:
                child = problem.mutate(recombine(problem, parents, "ts", rng, stats), p_m, rng)
        else:
            child = problem.mutate(select().genome, p_m, rng)
        off = improve(child)
        key = problem.key(off.genome)
        w = pop.worst_index()
        if off.fitness < pop.members[w].fitness and key not in pop.keys:
            pop.keys.discard(problem.key(pop.members[w].genome))
            pop.members[w] = off
            pop.keys.add(key)
        if off.fitness < best.fitness:
            best = off
            time_to_best = time.perf_counter() - t0
            result.trace.append((gen, time_to_best, best.fitness))
        if on_generation is not None:
            on_generation(GenerationStats(
                gen, time.perf_counter() - t0, best.fitness,
                pop.members[pop.worst_index()].fitness,
                sum(m.fitness.feasible for m in pop.members), stats["last"]))

    result.best = best
    result.generations = gen
    result.elapsed = time.perf_counter() - t0
    result.time_to_best = time_to_best
    result.be_calls = stats.get("be", 0)
    result.blind_calls = stats.get("blind", 0)
    result.refusals = stats.get("refused", 0)
    return result
