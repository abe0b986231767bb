"""Mini-bucket lower bounds and the completion-cost heuristic built from them."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .bucket import DEFAULT_MEMORY_CAP, Bucket, _table_entries
from .core import (
    TOP,
    Assignment,
    CostFunction,
    MemoryRefusal,
    WcspError,
    WcspInstance,
    add,
    eliminate,
    sum_functions,
    union_scope,
)


@dataclass(frozen=True)
class MiniBucketPartition:
    z: int
    groups: tuple[tuple[CostFunction, ...], ...]


def mb_partition(bucket: Bucket, z: int) -> MiniBucketPartition:
    """Greedy first-fit by decreasing arity; ties keep bucket order."""
    widest = max((f.arity for f in bucket.functions), default=0)
    if z < widest:
        raise WcspError(f"z={z} is below the widest function arity {widest}")
    groups: list[list[CostFunction]] = []
    scopes: list[set[int]] = []
    for f in sorted(bucket.functions, key=lambda f: -f.arity):
        for g, s in zip(groups, scopes):
            if len(s | set(f.scope)) <= z:
                g.append(f)
                s.update(f.scope)
                break
        else:
            groups.append([f])
            scopes.append(set(f.scope))
    return MiniBucketPartition(z, tuple(tuple(g) for g in groups))


@dataclass(frozen=True)
class MbHeuristic:
    """Function sets remaining after eliminating everything past each prefix.

    ``levels[i]`` holds every function (original or generated) whose scope lies
    within the first ``i`` variables of ``order``; their sum at a prefix bounds
    the cost of its best total extension from below.  ``messages[i]`` is the
    generated part of ``levels[i]``.
    """

    order: tuple[int, ...]
    z: int
    levels: tuple[tuple[CostFunction, ...], ...]
    messages: tuple[tuple[CostFunction, ...], ...]

    @property
    def bound(self) -> int:
        total = 0
        for f in self.levels[0]:
            total = add(total, int(f.table))
        return total


def _mb_pass(instance: WcspInstance, z: int, order: Sequence[int], memory_cap: int):
    order = tuple(order)
    if sorted(order) != list(range(instance.n)):
        raise WcspError("instantiation order is not a permutation of the variables")
    originals = {id(f) for f in instance.functions}
    pending = list(instance.functions)
    levels = [None] * (instance.n + 1)
    levels[instance.n] = tuple(pending)
    for p in range(instance.n - 1, -1, -1):
        x = order[p]
        members = [f for f in pending if x in f.scope]
        pending = [f for f in pending if x not in f.scope]
        if members:
            part = mb_partition(Bucket(x, members), z)
            for group in part.groups:
                entries = _table_entries(instance, union_scope(group))
                if entries > memory_cap:
                    raise MemoryRefusal(entries, memory_cap, f"mini-bucket of variable {x}")
                pending.append(eliminate(sum_functions(group, order), x))
        levels[p] = tuple(pending)
    messages = tuple(tuple(f for f in lvl if id(f) not in originals) for lvl in levels)
    return MbHeuristic(order, z, tuple(levels), messages)


def mb_bound(instance: WcspInstance, z: int, memory_cap: int = DEFAULT_MEMORY_CAP) -> int:
    """Lower bound on the optimum from one mini-bucket elimination pass."""
    return _mb_pass(instance, z, instance.ordering, memory_cap).bound


def mb_preprocess(instance: WcspInstance, z: int, instantiation_order: Sequence[int] | None = None,
                  memory_cap: int = DEFAULT_MEMORY_CAP) -> MbHeuristic:
    if instantiation_order is None:
        instantiation_order = instance.ordering
    return _mb_pass(instance, z, instantiation_order, memory_cap)


def mb_estimate(h: MbHeuristic, prefix) -> int:
    """Lower bound on the best total cost of any extension of ``prefix``.

    ``prefix`` is an Assignment (or value sequence) over the first ``i``
    variables of the instantiation order, in that order.
    """
    if isinstance(prefix, Assignment):
        bindings = prefix.bindings
    else:
        bindings = tuple(zip(h.order, (int(v) for v in prefix)))
    i = len(bindings)
    if i > len(h.order) or tuple(v for v, _ in bindings) != h.order[:i]:
        raise WcspError("prefix does not follow the instantiation order")
    t = dict(bindings)
    total = 0
    for f in h.levels[i]:
        total = add(total, int(f.lookup(*(t[v] for v in f.scope))))
        if total >= TOP:
            return TOP
    return total


def level_table(h: MbHeuristic, i: int, scope: tuple[int, ...], sizes, messages_only=True
                ) -> np.ndarray:
    """Dense table over ``scope`` of the summed level-``i`` functions.

    Every selected function must have its scope inside ``scope``.
    """
    fs = h.messages[i] if messages_only else h.levels[i]
    out = np.zeros(tuple(sizes), dtype=np.int64)
    for f in fs:
        if not set(f.scope) <= set(scope):
            raise WcspError(f"level {i} function scope {f.scope} escapes {scope}")
        pos = [f.scope.index(v) for v in scope if v in f.scope]
        t = np.transpose(f.table, pos) if pos else f.table
        shape = [sizes[k] if v in f.scope else 1 for k, v in enumerate(scope)]
        out = np.minimum(out + t.reshape(shape), TOP)
    return out
