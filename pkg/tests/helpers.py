"""Independent oracles shared by the test modules."""
from __future__ import annotations

import functools
import itertools
import random


def brute_force_sat(num_vars: int, clauses) -> bool:
    """Truth-table check using bitmasks: one pass over all 2^n assignments."""
    n = num_vars
    if any(len(c) == 0 for c in clauses):
        return False
    # a clause is falsified by an assignment iff every literal is false
    masks = []
    for c in clauses:
        pos = neg = 0
        for lit in c:
            if lit > 0:
                pos |= 1 << (lit - 1)
            else:
                neg |= 1 << (-lit - 1)
        if pos & neg:
            continue
        masks.append((pos, neg))
    for a in range(1 << n):
        if all((a & pos) or (~a & neg) for pos, neg in masks):
            return True
    return False


def random_3sat(rng: random.Random, n: int = 20, m: int = 85) -> list[list[int]]:
    out = []
    for _ in range(m):
        vs = rng.sample(range(1, n + 1), 3)
        out.append([v if rng.random() < 0.5 else -v for v in vs])
    return out


def pigeonhole(holes: int) -> tuple[int, list[list[int]]]:
    """PHP(holes+1, holes): unsatisfiable."""
    pigeons = holes + 1
    var = lambda p, h: p * holes + h + 1
    cls = [[var(p, h) for h in range(holes)] for p in range(pigeons)]
    for h in range(holes):
        for p, q in itertools.combinations(range(pigeons), 2):
            cls.append([-var(p, h), -var(q, h)])
    return pigeons * holes, cls


def satisfies(model, clauses) -> bool:
    return all(any(model[abs(l) - 1] == (l > 0) for l in c) for c in clauses)


class FakeView:
    """Minimal assignment view over a dict var -> bool."""

    def __init__(self, values: dict[int, bool]):
        self.values = dict(values)

    def value_of(self, var):
        return self.values.get(var)

    def lit_value(self, lit):
        v = self.values.get(abs(lit))
        if v is None:
            return None
        return v if lit > 0 else not v


def clause_holds(clause, values) -> bool:
    return any(values[abs(l)] == (l > 0) for l in clause)


@functools.lru_cache(maxsize=None)
def _column(i: int, size: int) -> int:
    """Bit ``a`` is set iff variable ``i`` (0-based) is true in assignment ``a``."""
    length = 2 << i
    col = ((1 << (1 << i)) - 1) << (1 << i)
    while length < size:
        col |= col << length
        length <<= 1
    return col


def truth_table_sat(num_vars: int, clauses, low: int = 20) -> bool:
    """Exhaustive check with one big-integer truth table per variable.

    The lowest ``low`` variables are evaluated in parallel as 2^low-bit
    integers; higher variables are enumerated one assignment at a time.
    """
    k = min(num_vars, low)
    size = 1 << k
    full = (1 << size) - 1
    cols = [_column(i, size) for i in range(k)]
    neg = [full ^ c for c in cols]
    for high in range(1 << (num_vars - k)):
        acc = full
        for c in clauses:
            cl = 0
            for lit in c:
                v = abs(lit) - 1
                if v >= k:
                    if (high >> (v - k) & 1) == (lit > 0):
                        break
                    continue
                cl |= cols[v] if lit > 0 else neg[v]
            else:
                acc &= cl
                if not acc:
                    break
        if acc:
            return True
    return False
