"""Beam search interleaved with memetic runs seeded from the beam pool.

From the first level at or past ``k_ma * n`` the best ``popsize`` candidates
of each level are completed to full boards and handed to the memetic
algorithm as its initial population; the incumbent keeps the best result.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .beam import BeamConfig, Level, bs_run
from .core import TOP, MemoryRefusal
from .memetic import MaConfig, ma_run
from .stilllife.columns import build_mb_columns
from .stilllife.model import Board, StillLifeModel, evaluate_rows, partial_quality, verify_still_life
from .stilllife.problem import StillLifeProblem
from .stilllife.search import StillLifeBeamModel, complete_prefix

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class HybridConfig:
    k_bw: int = 2000
    k_ma: float = 0.3
    ma: MaConfig | None = field(default_factory=lambda: MaConfig(generations=1000))
    bound: str = "none"  # "none" or "mb"
    mb_cols: int | None = None
    mb_context: int | None = None  # None: automatic
    z: int = 3
    ma_stride: int = 1
    seed: int = 0
    stop_at: int | None = None  # stop once a solution of this cost is found
    time_limit: float | None = None
    check_bounds: bool = False

    def __post_init__(self):
        if not 0 < self.k_ma <= 1:
            raise ValueError("k_ma must lie in (0, 1]")
        if self.bound not in ("none", "mb"):
            raise ValueError(f"unknown bound {self.bound!r}")
        if self.ma_stride < 1:
            raise ValueError("ma_stride must be at least 1")


@dataclass
class LevelRecord:
    level: int
    pool: int
    beam_best: int
    incumbent: int
    elapsed: float
    ma_best: int | None = None
    ma_generations: int = 0
    bound_ok: bool | None = None


@dataclass
class HybridResult:
    cost: int
    rows: np.ndarray | None
    levels: list = field(default_factory=list)
    trace: list = field(default_factory=list)  # (level, elapsed, incumbent cost)
    bound: str = "none"
    root_bound: int = 0
    bound_violations: int = 0
    elapsed: float = 0.0
    time_to_best: float = 0.0

    def __iter__(self):
        yield self.cost
        yield self.rows

    @property
    def verified(self) -> bool:
        return self.rows is not None and verify_still_life(Board.from_rows(self.rows))


class _Stop(Exception):
    pass


def _seed_population(prefixes: np.ndarray, problem: StillLifeProblem, popsize: int, rng):
    n = problem.n
    genomes, seen = [], set()
    for p in prefixes:
        g = complete_prefix(p, n, rng)
        if g.tobytes() not in seen:
            seen.add(g.tobytes())
            genomes.append(g)
    base = list(genomes) or [problem.random_genome(rng)]
    tries = 0
    while len(genomes) < popsize and tries < 50 * popsize:
        tries += 1
        g = np.array(base[tries % len(base)], copy=True)
        for _ in range(1 + tries // len(base)):
            r, j = rng.integers(n), rng.integers(n)
            g[r] ^= np.int64(1) << j
        if g.tobytes() not in seen:
            seen.add(g.tobytes())
            genomes.append(g)
    return genomes


def bs_ma_run(model: StillLifeModel, cfg: HybridConfig, on_level=None) -> HybridResult:
    n = model.n
    t0 = time.perf_counter()
    bound = None
    used = "none"
    if cfg.bound == "mb":
        try:
            bound = build_mb_columns(model, cfg.mb_cols, cfg.z, context=cfg.mb_context)
            used = "mb"
        except MemoryRefusal as exc:
            log.warning("mini-bucket bound refused (%s); continuing without a bound", exc)
    beam_model = StillLifeBeamModel(model, bound)
    problem = StillLifeProblem(n)
    start = max(1, math.ceil(cfg.k_ma * n - 1e-9))
    res = HybridResult(TOP, None, bound=used, root_bound=beam_model.root_bound())
    seeds = np.random.SeedSequence(cfg.seed)

    def offer(rows, cost, level):
        if cost < res.cost:
            res.cost = int(cost)
            res.rows = np.asarray(rows, dtype=np.int64).copy()
            res.time_to_best = time.perf_counter() - t0
            res.trace.append((level, res.time_to_best, res.cost))

    def hook(lv: Level):
        i = lv.index
        rec = LevelRecord(i, len(lv), lv.best_score, res.cost, time.perf_counter() - t0)
        runs_ma = (cfg.ma is not None and i >= start and (i - start) % cfg.ma_stride == 0
                   and len(lv) > 0)
        if runs_ma:
            child_seed = int(seeds.spawn(1)[0].generate_state(1)[0])
            rng = np.random.default_rng(child_seed)
            genomes = _seed_population(lv.prefixes(cfg.ma.popsize), problem, cfg.ma.popsize, rng)
            ma_cfg = replace(cfg.ma, seed=child_seed, stop_at=cfg.stop_at)
            if cfg.time_limit is not None:
                left = max(0.0, cfg.time_limit - (time.perf_counter() - t0))
                ma_cfg = replace(ma_cfg, time_limit=left if ma_cfg.time_limit is None
                                 else min(left, ma_cfg.time_limit))
            out = ma_run(problem, ma_cfg, initial_population=genomes)
            rec.ma_best = out.best.fitness.objective if out.best.fitness.feasible else TOP
            rec.ma_generations = out.generations
            if out.best.fitness.feasible:
                offer(out.best.genome, evaluate_rows(out.best.genome, n), i)
        if i == n and len(lv):
            offer(lv.prefixes(1)[0], int(lv.quality[0]), i)
        if cfg.check_bounds and res.rows is not None:
            # no prefix of a feasible board may be scored above the board itself
            ok = all(partial_quality(res.rows[: j], n, bound) <= res.cost for j in range(1, n + 1))
            rec.bound_ok = ok and res.root_bound <= res.cost
            res.bound_violations += not rec.bound_ok
        rec.incumbent = res.cost
        res.levels.append(rec)
        if on_level is not None:
            on_level(rec)
        if cfg.stop_at is not None and res.cost <= cfg.stop_at:
            raise _Stop
        if cfg.time_limit is not None and time.perf_counter() - t0 >= cfg.time_limit:
            raise _Stop

    try:
        bs_run(beam_model, BeamConfig(cfg.k_bw), on_level=hook)
    except _Stop:
        pass
    res.elapsed = time.perf_counter() - t0
    return res
