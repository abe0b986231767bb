"""Bucket elimination with forward reconstruction, and BE recombination."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import (
    TOP,
    Assignment,
    MemoryRefusal,
    WcspError,
    WcspInstance,
    add_tables,
    eliminate,
    estimate_complexity,
    sum_functions,
    take,
    union_scope,
)

log = logging.getLogger(__name__)

DEFAULT_MEMORY_CAP = 1 << 28


@dataclass
class Bucket:
    variable: int
    functions: list = field(default_factory=list)

    def __post_init__(self):
        for f in self.functions:
            if self.variable not in f.scope:
                raise WcspError(f"{f} does not mention bucket variable {self.variable}")


@dataclass
class BeTrace:
    buckets: dict  # variable -> Bucket


def _table_entries(instance: WcspInstance, scope) -> int:
    sizes = instance.domain_sizes
    out = 1
    for v in scope:
        out *= sizes[v]
    return out


def eliminate_pass(instance: WcspInstance, memory_cap: int = DEFAULT_MEMORY_CAP):
    """Backward pass: returns (optimum, trace)."""
    est = estimate_complexity(instance)
    if est.space_entries > memory_cap:
        raise MemoryRefusal(est.space_entries, memory_cap, "bucket elimination")
    pending = list(instance.functions)
    buckets = {}
    for x in reversed(instance.ordering):
        members = [f for f in pending if x in f.scope]
        pending = [f for f in pending if x not in f.scope]
        buckets[x] = Bucket(x, members)
        if not members:
            continue
        entries = _table_entries(instance, union_scope(members))
        if entries > memory_cap:
            raise MemoryRefusal(entries, memory_cap, f"bucket of variable {x}")
        pending.append(eliminate(sum_functions(members, instance.ordering), x))
    optimum = 0
    for f in pending:
        optimum = min(optimum + int(f.table), TOP)
    return optimum, BeTrace(buckets)


def forward_pass(instance: WcspInstance, trace: BeTrace) -> Assignment:
    t: dict[int, int] = {}
    sizes = instance.domain_sizes
    for x in instance.ordering:
        scores = np.zeros(sizes[x], dtype=np.int64)
        for f in trace.buckets[x].functions:
            idx = tuple(slice(None) if v == x else t[v] for v in f.scope)
            scores = add_tables(scores, f.table[idx])
        t[x] = int(np.argmin(scores))
    return Assignment(tuple((x, t[x]) for x in instance.ordering))


def be_solve(instance: WcspInstance, memory_cap: int = DEFAULT_MEMORY_CAP
             ) -> tuple[int, Assignment]:
    """Exact optimum and one optimal assignment.

    Instances that know a cheaper exact elimination for their structure
    (``bucket_elimination`` method) are routed there.
    """
    special = getattr(instance, "bucket_elimination", None)
    if special is not None:
        return special(memory_cap)
    optimum, trace = eliminate_pass(instance, memory_cap)
    return optimum, forward_pass(instance, trace)


def restricted_domains(instance: WcspInstance, parents: Sequence) -> list[np.ndarray]:
    """Per-variable sorted set of the value indices the parents use."""
    if not parents:
        raise WcspError("recombination needs at least one parent")
    rows = np.array([_values(instance, p) for p in parents], dtype=np.int64)
    return [np.unique(rows[:, v]) for v in range(instance.n)]


def _values(instance, p):
    if isinstance(p, Assignment):
        return p.values(instance.n)
    return list(p)


def restrict_instance(instance: WcspInstance, keep: Sequence[np.ndarray]) -> WcspInstance:
    domains = [take(instance.domains[v], k) for v, k in enumerate(keep)]
    functions = [f.restrict([keep[v] for v in f.scope]) for f in instance.functions]
    return WcspInstance(domains, functions, instance.ordering)


def be_recombine(instance: WcspInstance, parents: Sequence, memory_cap: int = DEFAULT_MEMORY_CAP
                 ) -> tuple[int, Assignment]:
    """Best child built only from values the parents hold at each variable."""
    keep = restricted_domains(instance, parents)
    sub = restrict_instance(instance, keep)
    cost, t = be_solve(sub, memory_cap)
    return cost, Assignment(tuple((v, int(keep[v][a])) for v, a in t.bindings))
