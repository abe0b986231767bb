"""Weighted CSP instances, saturating costs and the two function operators.

Costs are non-negative integers.  ``TOP`` is the absorbing "forbidden" cost:
any sum that reaches it stays there.  Tables are dense ``int64`` arrays laid
out in the order of the function's scope, values addressed by domain index.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

TOP = 1 << 40
COST_DTYPE = np.int64
BRUTE_FORCE_CAP = 1 << 24


class WcspError(ValueError):
    pass


class MemoryRefusal(RuntimeError):
    """Raised when a table would exceed the configured entry budget."""

    def __init__(self, entries: int, cap: int, what: str = "table"):
        super().__init__(f"{what} needs {entries} entries, cap is {cap}")
        self.entries = entries
        self.cap = cap


def add(a: int, b: int) -> int:
    s = a + b
    return TOP if s >= TOP else s


def add_tables(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.minimum(a + b, TOP)


def is_top(c) -> bool:
    return c >= TOP


def fmt_cost(c: int) -> str:
    return "inf" if c >= TOP else str(int(c))


def _as_table(values) -> np.ndarray:
    table = np.asarray(values, dtype=COST_DTYPE)
    if table.size and table.min() < 0:
        raise WcspError("costs must be non-negative")
    if table.size and table.max() > TOP:
        return np.minimum(table, TOP)
    return table  # shared, not copied: tables are treated as immutable


class CostFunction:
    """Extensional cost function over an ordered scope."""

    __slots__ = ("scope", "_table")

    def __init__(self, scope: Sequence[int], table):
        self.scope = tuple(int(v) for v in scope)
        if len(set(self.scope)) != len(self.scope):
            raise WcspError(f"repeated variable in scope {self.scope}")
        self._table = None if table is None else _as_table(table)
        if self._table is not None and self._table.ndim != len(self.scope):
            raise WcspError(
                f"table has {self._table.ndim} axes for scope of arity {len(self.scope)}"
            )

    @property
    def table(self) -> np.ndarray:
        return self._table

    @property
    def shape(self) -> tuple[int, ...]:
        return self._table.shape

    @property
    def arity(self) -> int:
        return len(self.scope)

    def lookup(self, *indices) -> np.ndarray:
        """Costs at the given per-scope-variable value index arrays."""
        if not self.scope:
            return self.table[()]
        return self.table[tuple(np.asarray(i) for i in indices)]

    def restrict(self, keep: Sequence[np.ndarray]) -> "CostFunction":
        """Sub-table keeping only the listed value indices along each axis."""
        if not self.scope:
            return self
        return CostFunction(self.scope, self.table[np.ix_(*keep)])

    def __repr__(self) -> str:
        return f"CostFunction(scope={self.scope}, shape={self.shape})"


def constant(c: int) -> CostFunction:
    return CostFunction((), np.array(c, dtype=COST_DTYPE))


@dataclass(frozen=True)
class Assignment:
    """Ordered (variable, value index) bindings."""

    bindings: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        seen = set()
        for var, _ in self.bindings:
            if var in seen:
                raise WcspError(f"variable {var} bound twice")
            seen.add(var)

    @classmethod
    def from_values(cls, values: Iterable[int], variables: Iterable[int] | None = None):
        values = [int(v) for v in values]
        if variables is None:
            variables = range(len(values))
        return cls(tuple(zip((int(v) for v in variables), values)))

    def as_dict(self) -> dict[int, int]:
        return dict(self.bindings)

    def values(self, n: int) -> list[int]:
        d = self.as_dict()
        missing = [v for v in range(n) if v not in d]
        if missing:
            raise WcspError(f"unbound variables {missing}")
        return [d[v] for v in range(n)]

    def extend(self, var: int, value: int) -> "Assignment":
        return Assignment(self.bindings + ((var, value),))

    def __len__(self) -> int:
        return len(self.bindings)


@dataclass
class WcspInstance:
    domains: list
    functions: list = field(default_factory=list)
    ordering: tuple[int, ...] | None = None

    def __post_init__(self):
        self.domains = [d if isinstance(d, range) else np.asarray(d) for d in self.domains]
        n = len(self.domains)
        if any(len(d) == 0 for d in self.domains):
            raise WcspError("empty domain")
        if self.ordering is None:
            self.ordering = tuple(range(n))
        self.ordering = tuple(int(v) for v in self.ordering)
        if sorted(self.ordering) != list(range(n)):
            raise WcspError("ordering is not a permutation of the variables")
        sizes = self.domain_sizes
        for f in self.functions:
            for v in f.scope:
                if not 0 <= v < n:
                    raise WcspError(f"scope {f.scope} references undeclared variable {v}")
            if tuple(sizes[v] for v in f.scope) != tuple(f.shape):
                raise WcspError(f"table shape {f.shape} does not match domains of {f.scope}")

    @property
    def n(self) -> int:
        return len(self.domains)

    @property
    def domain_sizes(self) -> tuple[int, ...]:
        return tuple(len(d) for d in self.domains)

    def position(self) -> dict[int, int]:
        return {v: p for p, v in enumerate(self.ordering)}


def take(domain, idx):
    """``domain[idx]`` for arrays and for lazily stored ``range`` domains."""
    if isinstance(domain, range):
        return domain.start + np.asarray(idx, dtype=np.int64) * domain.step
    return np.asarray(domain)[idx]


def _values_of(instance: WcspInstance, t) -> list[int]:
    if isinstance(t, Assignment):
        return t.values(instance.n)
    values = [int(v) for v in t]
    if len(values) != instance.n:
        raise WcspError(f"expected {instance.n} values, got {len(values)}")
    return values


def evaluate(instance: WcspInstance, t) -> int:
    values = _values_of(instance, t)
    for v, x in enumerate(values):
        if not 0 <= x < instance.domain_sizes[v]:
            raise WcspError(f"value index {x} out of range for variable {v}")
    total = 0
    for f in instance.functions:
        total = add(total, int(f.lookup(*(values[v] for v in f.scope))))
        if total >= TOP:
            return TOP
    return total


def _broadcast(f: CostFunction, scope: tuple[int, ...]) -> np.ndarray:
    """View of f's table with one axis per variable of ``scope``."""
    pos = [f.scope.index(v) for v in scope if v in f.scope]
    t = np.transpose(f.table, pos) if pos else f.table
    shape = []
    it = iter(t.shape)
    for v in scope:
        shape.append(next(it) if v in f.scope else 1)
    return t.reshape(shape)


def union_scope(functions: Iterable[CostFunction], ordering: Sequence[int] | None = None):
    vars_ = set()
    for f in functions:
        vars_.update(f.scope)
    if ordering is None:
        return tuple(sorted(vars_))
    return tuple(v for v in ordering if v in vars_)


def sum_functions(functions: Sequence[CostFunction], ordering: Sequence[int] | None = None
                  ) -> CostFunction:
    """Saturating sum of several functions over the union of their scopes."""
    scope = union_scope(functions, ordering)
    out = None
    for f in functions:
        part = _broadcast(f, scope)
        out = part if out is None else add_tables(out, part)
    if out is None:
        return constant(0)
    shape = np.broadcast_shapes(*(_broadcast(f, scope).shape for f in functions))
    return CostFunction(scope, np.broadcast_to(out, shape).copy())


def sum(f: CostFunction, g: CostFunction, ordering: Sequence[int] | None = None) -> CostFunction:
    return sum_functions([f, g], ordering)


def eliminate(f: CostFunction, x: int) -> CostFunction:
    if x not in f.scope:
        raise WcspError(f"variable {x} not in scope {f.scope}")
    axis = f.scope.index(x)
    scope = f.scope[:axis] + f.scope[axis + 1:]
    return CostFunction(scope, f.table.min(axis=axis))


def brute_force_opt(instance: WcspInstance, cap: int = BRUTE_FORCE_CAP) -> tuple[int, Assignment]:
    """Exhaustive optimum over the full joint table (no elimination).

    Ties go to the first assignment in lexicographic order of value indices.
    """
    sizes = instance.domain_sizes
    total = int(np.prod(sizes, dtype=object)) if sizes else 1
    if total > cap:
        raise MemoryRefusal(total, cap, "exhaustive enumeration")
    scope = tuple(range(instance.n))
    joint = np.zeros(sizes, dtype=COST_DTYPE)
    for f in instance.functions:
        joint = add_tables(joint, _broadcast(f, scope))
    flat = int(np.argmin(joint))
    best = int(joint.reshape(-1)[flat])
    values = np.unravel_index(flat, sizes) if sizes else ()
    return best, Assignment.from_values(values)


@dataclass(frozen=True)
class ComplexityEstimate:
    induced_width: int
    time_ops: int
    space_entries: int
    d: int


def estimate_complexity(instance: WcspInstance, ordering: Sequence[int] | None = None
                        ) -> ComplexityEstimate:
    """Symbolic bucket pass over scopes only (evaluation cost Q taken as 1)."""
    ordering = tuple(instance.ordering if ordering is None else ordering)
    if sorted(ordering) != list(range(instance.n)):
        raise WcspError("ordering is not a permutation of the variables")
    scopes = [frozenset(f.scope) for f in instance.functions]
    width = 0
    for x in reversed(ordering):
        bucket = [s for s in scopes if x in s]
        if not bucket:
            continue
        scopes = [s for s in scopes if x not in s]
        recorded = frozenset().union(*bucket) - {x}
        width = max(width, len(recorded))
        scopes.append(recorded)
    d = max(instance.domain_sizes, default=1)
    n = instance.n
    return ComplexityEstimate(width, n * d ** (width + 1), n * d ** width, d)


def enumerate_assignments(instance: WcspInstance):
    """Every total assignment in lexicographic order (tests and tiny oracles)."""
    return itertools.product(*(range(s) for s in instance.domain_sizes))
