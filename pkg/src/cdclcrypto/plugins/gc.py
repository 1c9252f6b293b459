"""Generalized-condition propagation and conflict detection.

Each bitwise gate instance of a two-copy (x, x') circuit is watched at the
level of conditions: the current condition of every input is read off the
assigned literals among ``x``, ``x'`` and ``d = x xor x'``, the rule table
gives the output condition, and any Boolean fact that condition fixes on the
output triple is asserted with a reason clause.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from ..programmatic import AssignmentView, Extension
from .conditions import D_MASK, X_MASK, XP_MASK
from .rules import OPS, RuleTable, build_rule_table
from .tracking import DirtyTracker

FULL = 0xF


@dataclass(frozen=True)
class BitTriple:
    """Literals for one bit in both copies plus its difference (may be None)."""
    x: int
    xp: int
    d: int | None = None

    def lits(self) -> tuple[int, ...]:
        return (self.x, self.xp) if self.d is None else (self.x, self.xp, self.d)


@dataclass(frozen=True)
class GcGate:
    op: str
    inputs: tuple[BitTriple, ...]
    output: BitTriple


class FlatTables:
    """Rule tables flattened to lists indexed by ``sum(mask_i << 4*i)``."""

    def __init__(self, tables: dict[str, RuleTable] | None = None):
        tables = tables or {op: build_rule_table(op) for op in OPS}
        self.flat: dict[str, list[int]] = {}
        for op, t in tables.items():
            if t.mode != "generalized_16":
                raise ValueError("condition plugins need generalized_16 tables")
            flat = [FULL] * (16 ** t.arity)
            for key, out in t.table.items():
                flat[sum(m << (4 * i) for i, m in enumerate(key))] = out
            self.flat[op] = flat

    def image(self, op: str, masks: Sequence[int]) -> int:
        idx = 0
        for i, m in enumerate(masks):
            idx |= m << (4 * i)
        return self.flat[op][idx]


_FACTS = (("x", X_MASK), ("xp", XP_MASK), ("d", D_MASK))


def _read(view: AssignmentView, t: BitTriple, constants: frozenset[int]):
    """Current mask of a triple and the assigned non-constant literals behind it."""
    m = FULL
    used: list[tuple[int, int]] = []  # (true literal, mask it contributes)
    for lit, table in ((t.x, X_MASK), (t.xp, XP_MASK), (t.d, D_MASK)):
        if lit is None:
            continue
        v = view.lit_value(lit)
        if v is None:
            continue
        bit = int(v)  # value of the component (literal sign already applied)
        m &= table[bit]
        if abs(lit) not in constants:
            used.append((lit if v else -lit, table[bit]))
    return m, used


def _minimize(tables: FlatTables, op: str, used: list[list[tuple[int, int]]],
              const_masks: list[int], ok) -> list[int]:
    """Greedily drop input literals while ``ok(output_mask)`` still holds."""
    keep = [list(u) for u in used]
    for i in range(len(keep)):
        j = 0
        while j < len(keep[i]):
            trial = keep[i][:j] + keep[i][j + 1:]
            masks = [_mask(const_masks[k], trial if k == i else keep[k]) for k in range(len(keep))]
            if ok(tables.image(op, masks)):
                keep[i] = trial
            else:
                j += 1
    return [lit for group in keep for lit, _ in group]


def _mask(base: int, used: list[tuple[int, int]]) -> int:
    m = base
    for _, mm in used:
        m &= mm
    return m


def _gate_state(view, gate, constants):
    masks, used, consts = [], [], []
    for t in gate.inputs:
        m, u = _read(view, t, constants)
        masks.append(m)
        used.append(u)
        consts.append(_const_mask(view, t, constants))
    return masks, used, consts


def _const_mask(view, t: BitTriple, constants) -> int:
    """Mask contributed by literals that are fixed constants (never in clauses)."""
    m = FULL
    for lit, table in ((t.x, X_MASK), (t.xp, XP_MASK), (t.d, D_MASK)):
        if lit is None or abs(lit) not in constants:
            continue
        v = view.lit_value(lit)
        if v is None:
            continue
        m &= table[int(v)]
    return m


def gc_propagate(view: AssignmentView, gates: Iterable[GcGate], tables: FlatTables,
                 constants: frozenset[int] = frozenset()) -> list[list[int]]:
    out: list[list[int]] = []
    for g in gates:
        masks, used, consts = _gate_state(view, g, constants)
        implied = tables.image(g.op, masks)
        if implied == FULL or implied == 0:
            continue
        o = g.output
        for lit, (name, table) in zip((o.x, o.xp, o.d), _FACTS):
            if lit is None or abs(lit) in constants:
                continue
            for bit in (0, 1):
                if implied & ~table[bit] & FULL:
                    continue
                # fact: this output component equals `bit`
                head = lit if bit else -lit
                if view.lit_value(head) is not None:
                    continue
                m = table[bit]
                ante = _minimize(tables, g.op, used, consts, lambda r, m=m: r and not r & ~m & FULL)
                out.append([-a for a in ante] + [head])
    return out


def gc_check(view: AssignmentView, gates: Iterable[GcGate], tables: FlatTables,
             constants: frozenset[int] = frozenset()) -> list[list[int]]:
    out: list[list[int]] = []
    for g in gates:
        masks, used, consts = _gate_state(view, g, constants)
        implied = tables.image(g.op, masks)
        if implied == FULL:
            continue
        have, oused = _read(view, g.output, constants)
        if implied & have:
            continue
        ante = _minimize(tables, g.op, used, consts, lambda r, h=have: not r & h)
        out.append([-a for a in ante] + [-lit for lit, _ in oused])
    return out


class GcPlugin(Extension):
    """Both condition hooks over a fixed list of gate instances."""

    name = "gc"

    def __init__(self, gates: Sequence[GcGate], tables: FlatTables | None = None,
                 constants: Iterable[int] = (), name: str | None = None):
        super().__init__(name)
        self.gates = list(gates)
        self.tables = tables or FlatTables()
        self.constants = frozenset(abs(c) for c in constants)
        lits = [[l for t in (*g.inputs, g.output) for l in t.lits()] for g in self.gates]
        self._prop = DirtyTracker(lits, self.constants)
        self._check = DirtyTracker(lits, self.constants)

    def on_propagate(self, view: AssignmentView) -> list[list[int]]:
        dirty = self._prop.dirty(view)
        gates = self.gates
        return gc_propagate(view, (gates[i] for i in dirty), self.tables, self.constants)

    def on_check(self, view: AssignmentView) -> list[list[int]]:
        dirty = self._check.dirty(view)
        gates = self.gates
        return gc_check(view, (gates[i] for i in dirty), self.tables, self.constants)
