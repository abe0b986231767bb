"""Summary statistics of run records, per algorithm and instance."""

from __future__ import annotations

import json
from collections import defaultdict

import numpy as np

from ..stilllife.model import BEST_KNOWN, OPTIMUM, SYMMETRIC_OPTIMUM


def reference_cost(instance: str) -> int | None:
    if not instance.startswith("mdslp-"):
        return None
    tag = instance[len("mdslp-"):]
    if tag.endswith("s"):
        return SYMMETRIC_OPTIMUM.get(int(tag[:-1]))
    n = int(tag)
    return OPTIMUM.get(n, BEST_KNOWN.get(n))


def _quartiles(x) -> list[float]:
    return [float(v) for v in np.percentile(np.asarray(x, dtype=float), [25, 50, 75])]


def emit_report(records) -> list[dict]:
    """One summary row per (algorithm, instance)."""
    if not records:
        raise ValueError("no records to summarise")
    groups = defaultdict(list)
    for r in records:
        groups[(r.algorithm, r.instance)].append(r)
    rows = []
    for (alg, inst), rs in sorted(groups.items()):
        costs = [r.best_cost for r in rs if r.best_cost is not None]
        ref = reference_cost(inst)
        row = {"algorithm": alg, "instance": inst, "runs": len(rs), "feasible": len(costs),
               "reference": ref}
        if costs:
            q1, med, q3 = _quartiles(costs)
            row.update(min=int(min(costs)), q1=q1, median=med, q3=q3,
                       mean=float(np.mean(costs)), max=int(max(costs)))
            if ref:
                rel = [100.0 * (c - ref) / ref for c in costs]
                row.update(rel_mean=float(np.mean(rel)), rel_median=float(np.median(rel)),
                           hits=sum(c <= ref for c in costs))
            ttb = [r.time_to_best for r in rs if r.best_cost is not None]
            row["ttb_quartiles"] = _quartiles(ttb)
        rows.append(row)
    return rows


def format_report(rows: list[dict]) -> str:
    head = f"{'algorithm':<10} {'instance':<10} {'runs':>4} {'min':>5} {'q1':>7} {'med':>7} " \
           f"{'q3':>7} {'mean':>7} {'max':>5} {'ref':>5} {'rel%':>6} {'hits':>4} {'ttb-med':>8}"
    out = [head, "-" * len(head)]
    for r in rows:
        if "min" not in r:
            out.append(f"{r['algorithm']:<10} {r['instance']:<10} {r['runs']:>4}  (no feasible runs)")
            continue
        ref = r["reference"] if r["reference"] is not None else "-"
        rel = f"{r['rel_mean']:.2f}" if "rel_mean" in r else "-"
        hits = r.get("hits", "-")
        out.append(f"{r['algorithm']:<10} {r['instance']:<10} {r['runs']:>4} {r['min']:>5} "
                   f"{r['q1']:>7.1f} {r['median']:>7.1f} {r['q3']:>7.1f} {r['mean']:>7.2f} "
                   f"{r['max']:>5} {ref:>5} {rel:>6} {hits:>4} {r['ttb_quartiles'][1]:>8.1f}")
    return "\n".join(out)


def report_json(rows: list[dict]) -> str:
    return "\n".join(json.dumps(r, sort_keys=True) for r in rows)
