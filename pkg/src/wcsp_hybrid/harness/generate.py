"""Seeded random WCSPs for tests and benchmarks."""

from __future__ import annotations

import numpy as np

from ..core import TOP, CostFunction, WcspInstance


def gen_random_wcsp(nvars: int, domain_size: int, nfuncs: int, max_arity: int,
                    top_density: float = 0.0, seed: int = 0) -> WcspInstance:
    """Costs uniform in 0..9; each entry independently TOP with ``top_density``."""
    if min(nvars, domain_size, max_arity) < 1 or nfuncs < 0:
        raise ValueError("sizes must be positive")
    if not 0 <= top_density <= 1:
        raise ValueError("top_density must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    functions = []
    for _ in range(nfuncs):
        arity = int(rng.integers(1, min(max_arity, nvars) + 1))
        scope = np.sort(rng.choice(nvars, size=arity, replace=False))
        shape = (domain_size,) * arity
        table = rng.integers(0, 10, size=shape)
        table = np.where(rng.random(shape) < top_density, TOP, table)
        functions.append(CostFunction(scope.tolist(), table))
    return WcspInstance([np.arange(domain_size)] * nvars, functions)
