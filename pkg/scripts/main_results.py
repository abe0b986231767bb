"""Replicate campaigns of MA-BE and the hybrid for each board size.

    python3 scripts/main_results.py --sizes 12,13,14 --replicates 20 --out results/main.jsonl
"""

import argparse
import os

from wcsp_hybrid.harness.campaign import Campaign, run_campaign
from wcsp_hybrid.harness.report import emit_report, format_report

HYBRID = {"k_bw": 2000, "k_ma": 0.75, "arity": 4, "bound": "mb"}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="12,13,14")
    ap.add_argument("--replicates", type=int, default=20)
    ap.add_argument("--algorithms", default="ma,hybrid")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="results/main.jsonl")
    a = ap.parse_args()
    os.makedirs(os.path.dirname(a.out) or ".", exist_ok=True)
    sizes = [int(x) for x in a.sizes.split(",")]
    records = []
    for alg in a.algorithms.split(","):
        params = HYBRID if alg == "hybrid" else {}
        c = Campaign(alg, sizes, [params], a.replicates, workers=a.workers, out=a.out)
        records += run_campaign(c, lambda r: print(r.run_id, r.best_cost, f"{r.total_time:.1f}s",
                                                   flush=True))
    print(format_report(emit_report(records)))


if __name__ == "__main__":
    main()
