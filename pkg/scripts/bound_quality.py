"""Root value of the column-slice bound against the optimum, per size and slicing."""

import argparse
import time

from wcsp_hybrid.stilllife.columns import build_mb_columns
from wcsp_hybrid.stilllife.model import BEST_KNOWN, StillLifeModel


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", default="8,10,12,14,16,18,20,22")
    ap.add_argument("--contexts", default="0,auto")
    a = ap.parse_args()
    print(f"{'n':>3} {'M':>2} {'ctx':>4} {'root':>5} {'best':>5} {'gap%':>6} {'sec':>6}")
    for n in (int(x) for x in a.sizes.split(",")):
        model = StillLifeModel(n)
        for ctx in a.contexts.split(","):
            t0 = time.perf_counter()
            b = build_mb_columns(model, context=None if ctx == "auto" else int(ctx))
            best = BEST_KNOWN.get(n)
            gap = f"{100 * (best - b.root()) / best:.1f}" if best else "-"
            print(f"{n:>3} {len(b.slices):>2} {b.context:>4} {b.root():>5} {best or '-':>5} "
                  f"{gap:>6} {time.perf_counter() - t0:>6.1f}")


if __name__ == "__main__":
    main()
