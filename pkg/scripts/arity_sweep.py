"""Hybrid with BE recombination of arity 2, 3 and 4 on the same seeds."""

import argparse

from wcsp_hybrid.harness.campaign import Campaign, run_campaign
from wcsp_hybrid.harness.report import emit_report, format_report


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", default="13,14")
    ap.add_argument("--replicates", type=int, default=10)
    ap.add_argument("--arities", default="2,3,4")
    ap.add_argument("--out", default="results/arity.jsonl")
    a = ap.parse_args()
    grid = [{"k_bw": 2000, "k_ma": 0.75, "bound": "mb", "arity": int(k)}
            for k in a.arities.split(",")]
    c = Campaign("hybrid", [int(x) for x in a.sizes.split(",")], grid, a.replicates, out=a.out)
    recs = run_campaign(c, lambda r: print(r.run_id, r.params["arity"], r.best_cost, flush=True))
    # one table per arity; the report groups by algorithm and instance only
    for k in a.arities.split(","):
        sub = [r for r in recs if r.params["arity"] == int(k)]
        for r in sub:
            r.algorithm = f"hyb-a{k}"
        print(format_report(emit_report(sub)))


if __name__ == "__main__":
    main()
