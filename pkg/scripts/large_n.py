"""Long hybrid runs on boards beyond exact reach, with bound checks on.

Prints the incumbent per beam level and a final verified board.
"""

import argparse
import resource

from wcsp_hybrid.hybrid import HybridConfig, bs_ma_run
from wcsp_hybrid.memetic import MaConfig
from wcsp_hybrid.stilllife.model import BEST_KNOWN, Board, StillLifeModel


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=22)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--time-limit", type=float, default=3600.0)
    ap.add_argument("--kbw", type=int, default=2000)
    a = ap.parse_args()

    def show(rec):
        rss = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss // 1024
        print(f"level {rec.level:>3} pool {rec.pool:>8} incumbent {rec.incumbent} "
              f"ma {rec.ma_best} bound_ok {rec.bound_ok} t {rec.elapsed:.0f}s rss {rss}MB",
              flush=True)

    cfg = HybridConfig(k_bw=a.kbw, k_ma=0.75, ma=MaConfig(generations=1000, arity=4), bound="mb",
                       seed=a.seed, time_limit=a.time_limit, check_bounds=True)
    r = bs_ma_run(StillLifeModel(a.n), cfg, on_level=show)
    print(f"n {a.n} cost {r.cost} best known {BEST_KNOWN.get(a.n)} verified {r.verified} "
          f"violations {r.bound_violations} root bound {r.root_bound} {r.elapsed:.0f}s")
    if r.rows is not None:
        print(Board.from_rows(r.rows, a.n).to_text(), end="")


if __name__ == "__main__":
    main()
