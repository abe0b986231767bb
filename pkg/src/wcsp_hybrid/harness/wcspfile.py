"""Plain-text WCSP instances.

Layout (whitespace separated, ``#`` starts a comment)::

    nvars
    d_0 d_1 ... d_{nvars-1}
    arity default        # one block per function, until end of file
    v_1 ... v_arity      # scope (omitted when arity is 0)
    ntuples
    a_1 ... a_arity cost # ntuples lines, value indices then cost

Costs are non-negative integers or ``inf``; unlisted tuples cost ``default``.
"""

from __future__ import annotations

import numpy as np

from ..core import TOP, CostFunction, WcspError, WcspInstance, fmt_cost


class ParseError(WcspError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].strip()
        if body:
            yield no, body.split()


def _int(tok: str, no: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(no, f"expected integer {what}, got {tok!r}") from None


def _cost(tok: str, no: int) -> int:
    if tok.lower() == "inf":
        return TOP
    c = _int(tok, no, "cost")
    if c < 0:
        raise ParseError(no, "negative cost")
    return min(c, TOP)


def parse_wcsp(text: str) -> WcspInstance:
    it = _lines(text)

    def take(what):
        try:
            return next(it)
        except StopIteration:
            raise ParseError(-1, f"unexpected end of file, expected {what}") from None

    no, toks = take("variable count")
    if len(toks) != 1:
        raise ParseError(no, "header must hold the variable count only")
    nvars = _int(toks[0], no, "variable count")
    if nvars < 0:
        raise ParseError(no, "negative variable count")
    no, toks = take("domain sizes")
    if len(toks) != nvars:
        raise ParseError(no, f"expected {nvars} domain sizes, got {len(toks)}")
    sizes = [_int(t, no, "domain size") for t in toks]
    if any(s < 1 for s in sizes):
        raise ParseError(no, "domain sizes must be positive")
    functions = []
    for no, toks in it:
        if len(toks) != 2:
            raise ParseError(no, "function header must be 'arity default'")
        arity = _int(toks[0], no, "arity")
        default = _cost(toks[1], no)
        scope: list[int] = []
        if arity:
            sno, stoks = take("scope")
            if len(stoks) != arity:
                raise ParseError(sno, f"scope lists {len(stoks)} variables, arity is {arity}")
            scope = [_int(t, sno, "variable") for t in stoks]
            for v in scope:
                if not 0 <= v < nvars:
                    raise ParseError(sno, f"variable {v} out of range")
            if len(set(scope)) != arity:
                raise ParseError(sno, "repeated variable in scope")
        tno, ttoks = take("tuple count")
        if len(ttoks) != 1:
            raise ParseError(tno, "tuple count line must hold one integer")
        ntuples = _int(ttoks[0], tno, "tuple count")
        shape = tuple(sizes[v] for v in scope)
        table = np.full(shape, default, dtype=np.int64)
        for _ in range(ntuples):
            lno, ltoks = take("tuple")
            if len(ltoks) != arity + 1:
                raise ParseError(lno, f"tuple has {len(ltoks) - 1} values, arity is {arity}")
            idx = tuple(_int(t, lno, "value") for t in ltoks[:-1])
            for v, a in zip(scope, idx):
                if not 0 <= a < sizes[v]:
                    raise ParseError(lno, f"value {a} out of range for variable {v}")
            table[idx] = _cost(ltoks[-1], lno)
        functions.append(CostFunction(scope, table))
    return WcspInstance([np.arange(s) for s in sizes], functions)


def serialize_wcsp(instance: WcspInstance) -> str:
    out = [str(instance.n), " ".join(str(s) for s in instance.domain_sizes)]
    for f in instance.functions:
        table = np.asarray(f.table)
        vals, counts = np.unique(table, return_counts=True)
        default = int(vals[np.argmax(counts)])
        out.append(f"{f.arity} {fmt_cost(default)}")
        if f.arity:
            out.append(" ".join(str(v) for v in f.scope))
        listed = np.argwhere(table != default)
        out.append(str(len(listed)))
        for idx in listed:
            cost = int(table[tuple(idx)])
            out.append(" ".join([*(str(int(a)) for a in idx), fmt_cost(cost)]))
    return "\n".join(out) + "\n"


def read_wcsp(path) -> WcspInstance:
    with open(path) as fh:
        return parse_wcsp(fh.read())


def write_wcsp(path, instance: WcspInstance) -> None:
    with open(path, "w") as fh:
        fh.write(serialize_wcsp(instance))
