"""Command-line front end: ``wcsp-hybrid <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time

from .bucket import be_solve
from .core import TOP, fmt_cost
from .harness.campaign import ALGORITHMS, Campaign, load_records, run_campaign
from .harness.generate import gen_random_wcsp
from .harness.report import emit_report, format_report, report_json
from .harness.wcspfile import read_wcsp, serialize_wcsp, write_wcsp
from .hybrid import HybridConfig, bs_ma_run
from .memetic import VARIANTS, MaConfig, ma_run
from .minibucket import mb_bound
from .stilllife.columns import build_mb_columns
from .stilllife.model import Board, StillLifeModel, build_wcsp, evaluate_rows, verify_still_life
from .stilllife.problem import StillLifeProblem


def _pm(text: str):
    return None if text == "auto" else float(text)


def _shared(p: argparse.ArgumentParser, *, instance=True):
    p.add_argument("--n", type=int, help="still-life board size")
    if instance:
        p.add_argument("--instance", help="WCSP instance file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--time-limit", type=float, default=None, help="seconds")
    p.add_argument("--symmetric", action="store_true", help="vertically symmetric rows only")
    p.add_argument("--out", help="write the result here")


def _ma_flags(p: argparse.ArgumentParser, generations=None):
    p.add_argument("--variant", choices=VARIANTS, default="be")
    p.add_argument("--popsize", type=int, default=100)
    p.add_argument("--px", type=float, default=0.9)
    p.add_argument("--pm", type=_pm, default=None, help="'auto' (1/n^2) or a probability")
    p.add_argument("--arity", type=int, default=2)
    p.add_argument("--generations", type=int, default=generations)
    p.add_argument("--tenure", type=int, default=None)
    p.add_argument("--stall", type=int, default=None)


def _hybrid_flags(p: argparse.ArgumentParser):
    p.add_argument("--kbw", type=int, default=2000)
    p.add_argument("--kma", type=float, default=0.3)
    p.add_argument("--bound", choices=("none", "mb"), default="none")
    p.add_argument("--mb-cols", type=int, default=None)
    p.add_argument("--ma-stride", type=int, default=1)


def _ma_config(a, stop_at, generations=None, time_limit=None) -> MaConfig:
    return MaConfig(popsize=a.popsize, p_x=a.px, p_m=a.pm, arity=a.arity, variant=a.variant,
                    generations=generations, time_limit=time_limit, tenure=a.tenure,
                    stall=a.stall, seed=a.seed, stop_at=stop_at)


def _need_n(a):
    if a.n is None:
        raise SystemExit("--n is required")
    return a.n


def _board_out(a, rows, n, cost, extra=None):
    print(f"cost {fmt_cost(cost)}")
    if rows is None:
        return
    board = Board.from_rows(rows, n)
    print(board.to_text(), end="")
    print(f"verified {verify_still_life(board)}")
    if a.out:
        with open(a.out, "w") as fh:
            fh.write(board.to_text())
        if extra is not None:
            with open(a.out + ".json", "w") as fh:
                json.dump(extra, fh, indent=1)


def cmd_solve_be(a):
    if a.instance:
        inst = read_wcsp(a.instance)
        cost, t = be_solve(inst)
        print(f"cost {fmt_cost(cost)}")
        print("assignment", " ".join(str(v) for v in t.values(inst.n)))
        if a.out:
            with open(a.out, "w") as fh:
                json.dump({"cost": None if cost >= TOP else cost, "values": t.values(inst.n)}, fh)
        return 0
    n = _need_n(a)
    inst = build_wcsp(StillLifeModel(n, symmetric=a.symmetric))
    t0 = time.perf_counter()
    cost, t = be_solve(inst)
    print(f"seconds {time.perf_counter() - t0:.2f}")
    _board_out(a, inst.rows_of(t) if cost < TOP else None, n, cost)
    return 0


def cmd_solve_mb(a):
    if a.instance:
        print(f"bound {fmt_cost(mb_bound(read_wcsp(a.instance), a.z))}")
        return 0
    n = _need_n(a)
    model = StillLifeModel(n, symmetric=a.symmetric, M=a.mb_cols, z=a.z)
    print(f"bound {fmt_cost(build_mb_columns(model).root())}")
    return 0


def cmd_solve_ma(a):
    n = _need_n(a)
    stop = StillLifeModel(n).known_optimum if not a.no_stop else None
    cfg = _ma_config(a, stop, a.generations, a.time_limit)
    if cfg.generations is None and cfg.time_limit is None:
        raise SystemExit("give --generations or --time-limit")

    def show(st):
        if st.generation % a.log_every == 0:
            print(f"gen {st.generation} t={st.elapsed:.1f} best={tuple(st.best)}", file=sys.stderr)

    r = ma_run(StillLifeProblem(n, tenure=a.tenure, stall=a.stall), cfg, on_generation=show)
    rows = r.best.genome if r.best.fitness.feasible else None
    print(f"generations {r.generations} seconds {r.elapsed:.2f} time_to_best {r.time_to_best:.2f}")
    cost = evaluate_rows(rows, n) if rows is not None else TOP
    _board_out(a, rows, n, cost, {"trace": [[g, t, list(f)] for g, t, f in r.trace]})
    return 0


def cmd_solve_hybrid(a):
    n = _need_n(a)
    model = StillLifeModel(n, symmetric=a.symmetric, M=a.mb_cols)
    ma = _ma_config(a, None, a.generations or 1000)
    stop = model.known_optimum if not a.no_stop else None
    cfg = HybridConfig(k_bw=a.kbw, k_ma=a.kma, ma=ma, bound=a.bound, mb_cols=a.mb_cols,
                       ma_stride=a.ma_stride, seed=a.seed, stop_at=stop, time_limit=a.time_limit,
                       check_bounds=a.check_bounds)

    def show(rec):
        print(f"level {rec.level} pool={rec.pool} beam_best={fmt_cost(rec.beam_best)} "
              f"incumbent={fmt_cost(rec.incumbent)} ma={rec.ma_best} t={rec.elapsed:.1f}",
              file=sys.stderr)

    r = bs_ma_run(model, cfg, on_level=show)
    print(f"seconds {r.elapsed:.2f} time_to_best {r.time_to_best:.2f} bound {r.bound} "
          f"root {r.root_bound} bound_violations {r.bound_violations}")
    _board_out(a, r.rows, n, r.cost, {"trace": r.trace})
    return 0


def cmd_verify(a):
    with open(a.board) as fh:
        board = Board.from_text(fh.read())
    ok = verify_still_life(board)
    print(f"still_life {ok} n {board.n} dead {board.dead}")
    return 0 if ok else 1


def cmd_gen(a):
    inst = gen_random_wcsp(a.nvars, a.domain, a.nfuncs, a.max_arity, a.top_density, a.seed)
    if a.out:
        write_wcsp(a.out, inst)
    else:
        sys.stdout.write(serialize_wcsp(inst))
    return 0


def cmd_campaign(a):
    params = {"variant": a.variant, "popsize": a.popsize, "p_x": a.px, "p_m": a.pm,
              "arity": a.arity, "generations": a.generations, "tenure": a.tenure,
              "stall": a.stall, "k_bw": a.kbw, "k_ma": a.kma, "bound": a.bound,
              "mb_cols": a.mb_cols, "ma_stride": a.ma_stride, "stop_at_optimum": not a.no_stop,
              "check_bounds": a.check_bounds}
    grid = [params]
    if a.arities:
        grid = [{**params, "arity": int(x)} for x in a.arities.split(",")]
    time_base = None if a.no_time_limit else (a.time_limit if a.time_limit is not None else 180.0)
    c = Campaign(a.algorithm, [int(x) for x in a.sizes.split(",")], grid, a.replicates,
                 a.seed, time_base, 60.0, a.symmetric, a.workers, a.out)

    def show(rec):
        print(f"{rec.run_id} cost={rec.best_cost} verified={rec.verified} "
              f"ttb={rec.time_to_best:.1f} total={rec.total_time:.1f}"
              + (f" error={rec.error}" if rec.error else ""), file=sys.stderr)

    records = run_campaign(c, show)
    print(format_report(emit_report(records)))
    return 0


def cmd_report(a):
    rows = emit_report(load_records(a.records))
    print(format_report(rows))
    if a.out:
        with open(a.out, "w") as fh:
            fh.write(report_json(rows) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="wcsp-hybrid", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("solve-be", help="exact bucket elimination")
    _shared(p)
    p.set_defaults(func=cmd_solve_be)

    p = sub.add_parser("solve-mb", help="mini-bucket lower bound only")
    _shared(p)
    p.add_argument("--z", type=int, default=3)
    p.add_argument("--mb-cols", type=int, default=None)
    p.set_defaults(func=cmd_solve_mb)

    p = sub.add_parser("solve-ma", help="memetic algorithm")
    _shared(p, instance=False)
    _ma_flags(p)
    p.add_argument("--no-stop", action="store_true", help="do not stop at the known optimum")
    p.add_argument("--log-every", type=int, default=500)
    p.set_defaults(func=cmd_solve_ma)

    p = sub.add_parser("solve-hybrid", help="beam search with embedded memetic runs")
    _shared(p, instance=False)
    _ma_flags(p)
    _hybrid_flags(p)
    p.add_argument("--no-stop", action="store_true")
    p.add_argument("--check-bounds", action="store_true")
    p.set_defaults(func=cmd_solve_hybrid)

    p = sub.add_parser("verify", help="check a '#'/'.' board file")
    p.add_argument("board")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen", help="random WCSP instance")
    p.add_argument("--nvars", type=int, default=6)
    p.add_argument("--domain", type=int, default=3)
    p.add_argument("--nfuncs", type=int, default=8)
    p.add_argument("--max-arity", type=int, default=3)
    p.add_argument("--top-density", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("campaign", help="seeded replicates, one JSON record per run")
    p.add_argument("--algorithm", choices=ALGORITHMS, default="ma")
    p.add_argument("--sizes", default="12")
    p.add_argument("--replicates", type=int, default=20)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--arities", help="comma list; one configuration per arity")
    p.add_argument("--no-time-limit", action="store_true", help="generation limits only")
    _shared(p, instance=False)
    _ma_flags(p)
    _hybrid_flags(p)
    p.add_argument("--no-stop", action="store_true")
    p.add_argument("--check-bounds", action="store_true")
    p.set_defaults(func=cmd_campaign)

    p = sub.add_parser("report", help="summarise a records file")
    p.add_argument("records")
    p.add_argument("--out", help="machine-readable summary (JSON lines)")
    p.set_defaults(func=cmd_report)
    return ap


def main(argv=None) -> int:
    a = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if a.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return a.func(a)


if __name__ == "__main__":
    sys.exit(main())
