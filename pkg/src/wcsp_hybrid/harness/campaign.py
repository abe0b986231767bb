"""Seeded replicate campaigns over still-life sizes, persisted as JSON lines."""

from __future__ import annotations

import json
import logging
import time
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

from ..beam import BeamConfig, bs_run
from ..bucket import be_solve
from ..core import TOP
from ..hybrid import HybridConfig, bs_ma_run
from ..memetic import MaConfig, ma_run
from ..stilllife.columns import build_mb_columns
from ..stilllife.model import Board, StillLifeModel, build_wcsp, evaluate_rows, verify_still_life
from ..stilllife.problem import StillLifeProblem
from ..stilllife.search import StillLifeBeamModel

log = logging.getLogger(__name__)

ALGORITHMS = ("be", "mb", "bs", "ma", "hybrid")
MA_KEYS = ("variant", "popsize", "p_x", "p_m", "arity", "generations", "tenure", "stall")


@dataclass
class RunRecord:
    run_id: str
    algorithm: str
    instance: str
    seed: int
    best_cost: int | None  # None when no feasible solution was found
    time_to_best: float
    total_time: float
    steps: int  # generations or levels
    params: dict
    verified: bool
    solution: list | None = None
    trace: list = field(default_factory=list)  # [seconds, cost] per improvement
    error: str | None = None

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, line: str) -> "RunRecord":
        return cls(**json.loads(line))


def time_limit_for(n: int, base: float = 180.0, step: float = 60.0, base_n: int = 12) -> float:
    """Wall-clock cap per run; sizes below ``base_n`` keep the base value."""
    return base + step * max(0, n - base_n)


@dataclass
class Campaign:
    algorithm: str
    sizes: list
    configs: list = field(default_factory=lambda: [{}])  # parameter grid
    replicates: int = 20
    seed_base: int = 0
    time_base: float | None = 180.0  # None: rely on generation limits only
    time_step: float = 60.0
    symmetric: bool = False
    workers: int = 1
    out: str | None = None

    def __post_init__(self):
        if self.replicates < 1:
            raise ValueError("replicates must be at least 1")
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")

    def jobs(self):
        for n in self.sizes:
            limit = None if self.time_base is None else time_limit_for(n, self.time_base,
                                                                        self.time_step)
            for c, params in enumerate(self.configs):
                for k in range(self.replicates):
                    yield dict(algorithm=self.algorithm, n=int(n), seed=self.seed_base + k,
                               params=dict(params), time_limit=limit, symmetric=self.symmetric,
                               run_id=f"{self.algorithm}-n{n}-c{c}-r{k}")


def _ma_config(params: dict, seed: int, time_limit, stop_at) -> MaConfig:
    kw = {k: params[k] for k in MA_KEYS if params.get(k) is not None}
    return MaConfig(seed=seed, time_limit=time_limit, stop_at=stop_at, **kw)


def _record(job, rows, cost, t_best, total, steps, trace) -> RunRecord:
    n = job["n"]
    verified = False
    if rows is not None:
        rows = [int(r) for r in rows]
        verified = verify_still_life(Board.from_rows(rows, n))
        cost = evaluate_rows(rows, n)
    best = None if cost is None or cost >= TOP else int(cost)
    return RunRecord(job["run_id"], job["algorithm"], f"mdslp-{n}" + ("s" if job["symmetric"] else ""),
                     job["seed"], best, float(t_best), float(total), int(steps), job["params"],
                     bool(verified and best is not None), rows, trace)


def run_job(job: dict) -> RunRecord:
    """One replicate; failures are captured in the record instead of raised."""
    t0 = time.perf_counter()
    n, seed, params, limit = job["n"], job["seed"], job["params"], job["time_limit"]
    try:
        model = StillLifeModel(n, symmetric=job["symmetric"], M=params.get("mb_cols"))
        stop_at = model.known_optimum if params.get("stop_at_optimum", True) else None
        alg = job["algorithm"]
        if alg == "be":
            inst = build_wcsp(model)
            cost, t = be_solve(inst)
            total = time.perf_counter() - t0
            rows = inst.rows_of(t) if cost < TOP else None
            return _record(job, rows, cost, total, total, n, [[total, cost]])
        if alg == "mb":
            bound = build_mb_columns(model).root()
            total = time.perf_counter() - t0
            rec = _record(job, None, None, total, total, 0, [])
            rec.params = {**params, "lower_bound": int(bound)}
            return rec
        if alg == "bs":
            bound = build_mb_columns(model) if params.get("bound", "mb") == "mb" else None
            r = bs_run(StillLifeBeamModel(model, bound), BeamConfig(params.get("k_bw", 2000)))
            total = time.perf_counter() - t0
            return _record(job, r.values, r.cost, total, total, len(r.levels), [[total, r.cost]])
        if alg == "ma":
            problem = StillLifeProblem(n, tenure=params.get("tenure"), stall=params.get("stall"))
            r = ma_run(problem, _ma_config(params, seed, limit, stop_at))
            trace = [[t, f.objective if f.feasible else None] for _, t, f in r.trace]
            rows = r.best.genome if r.best.fitness.feasible else None
            return _record(job, rows, None, r.time_to_best, r.elapsed, r.generations, trace)
        if alg == "hybrid":
            given = {k: v for k, v in params.items() if v is not None}
            ma = _ma_config({"generations": 1000, **given}, seed, None, None)
            cfg = HybridConfig(k_bw=params.get("k_bw", 2000), k_ma=params.get("k_ma", 0.3), ma=ma,
                               bound=params.get("bound", "none"), mb_cols=params.get("mb_cols"),
                               ma_stride=params.get("ma_stride", 1), seed=seed, stop_at=stop_at,
                               time_limit=limit, check_bounds=params.get("check_bounds", False))
            r = bs_ma_run(model, cfg)
            trace = [[t, c] for _, t, c in r.trace]
            rec = _record(job, r.rows, r.cost, r.time_to_best, r.elapsed, len(r.levels), trace)
            if cfg.check_bounds:
                rec.params = {**params, "bound_violations": r.bound_violations}
            return rec
        raise ValueError(f"unknown algorithm {alg!r}")
    except Exception as exc:  # noqa: BLE001 - campaign keeps going
        log.error("run %s failed: %s", job["run_id"], exc)
        total = time.perf_counter() - t0
        rec = RunRecord(job["run_id"], job["algorithm"], f"mdslp-{n}", seed, None, total, total,
                        0, params, False, error="".join(traceback.format_exception_only(exc)).strip())
        return rec


def run_campaign(c: Campaign, on_record=None) -> list[RunRecord]:
    jobs = list(c.jobs())
    records = []
    fh = open(c.out, "a") if c.out else None
    try:
        if c.workers > 1:
            with ProcessPoolExecutor(c.workers) as pool:
                results = pool.map(run_job, jobs)
                for rec in results:
                    records.append(rec)
                    _emit(rec, fh, on_record)
        else:
            for job in jobs:
                rec = run_job(job)
                records.append(rec)
                _emit(rec, fh, on_record)
    finally:
        if fh:
            fh.close()
    return records


def _emit(rec: RunRecord, fh, on_record):
    if fh is not None:
        fh.write(rec.to_json() + "\n")
        fh.flush()
    if on_record is not None:
        on_record(rec)


def load_records(path) -> list[RunRecord]:
    with open(path) as fh:
        return [RunRecord.from_json(ln) for ln in fh if ln.strip()]


def recheck(rec: RunRecord) -> bool:
    """The stored cost is the re-evaluated cost of the stored solution."""
    if rec.solution is None:
        return rec.best_cost is None
    n = len(rec.solution)
    cost = evaluate_rows(rec.solution, n)
    return (rec.best_cost is None and cost >= TOP) or cost == rec.best_cost

