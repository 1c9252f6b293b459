"""LSB-first forward propagation for multi-operand modular additions.

The CNF adder cannot always compute an output bit from its operands by unit
propagation alone. This extension watches each addition and, whenever the
operand bits of positions ``0..j`` are all assigned, asserts output bit ``j``
with a reason clause built from exactly those operand literals.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from ..encoder.builder import AdderRecord, WordVar
from ..programmatic import AssignmentView, Extension
from .tracking import DirtyTracker


@dataclass(frozen=True)
class AdderGroup:
    operands: tuple[tuple[int, ...], ...]  # LSB-first literals per operand
    output: tuple[int, ...]

    def __post_init__(self):
        widths = {len(o) for o in self.operands} | {len(self.output)}
        if len(widths) != 1:
            raise ValueError("adder group widths differ")

    @property
    def width(self) -> int:
        return len(self.output)

    @classmethod
    def from_record(cls, rec: AdderRecord) -> "AdderGroup":
        return cls(tuple(w.bits for w in rec.operands), rec.output.bits)

    @classmethod
    def of(cls, operands: Sequence[WordVar | Sequence[int]], output: WordVar | Sequence[int]) -> "AdderGroup":
        def bits(w):
            return tuple(w.bits) if isinstance(w, WordVar) else tuple(w)
        return cls(tuple(bits(o) for o in operands), bits(output))


def adder_propagate(view: AssignmentView, groups: Iterable[AdderGroup],
                    constants: frozenset[int] = frozenset(),
                    solve_operand: bool = False) -> list[list[int]]:
    """Reason clauses for every output bit fixed by a fully assigned operand prefix.

    ``constants`` lists variables known true/false at the top level; their
    literals are left out of antecedents. If an already assigned output bit
    disagrees with the prefix sum, the (fully falsified) clause is returned too
    and the solver treats it as a conflict.

    With ``solve_operand`` a column whose carry-in is known, whose output bit
    is assigned and which has exactly one free operand bit also yields that
    operand bit, and the scan continues past it.
    """
    out: list[list[int]] = []
    value = view.lit_value
    for g in groups:
        carry = 0
        ante: list[int] = []
        for j in range(g.width):
            s = carry
            free = None
            nfree = 0
            col: list[int] = []
            for op in g.operands:
                lit = op[j]
                v = value(lit)
                if v is None:
                    nfree += 1
                    free = lit
                    if nfree > 1 or not solve_operand:
                        break
                    continue
                if v:
                    s += 1
                if abs(lit) not in constants:
                    col.append(-lit if v else lit)
            z = g.output[j]
            zv = value(z)
            if nfree == 0:
                bit = s & 1
                carry = s >> 1
                ante.extend(col)
                if zv is None or zv != bool(bit):
                    if abs(z) in constants:
                        continue
                    out.append(ante + [z if bit else -z])
                continue
            if nfree > 1 or zv is None or not solve_operand:
                break
            # the one free operand bit is fixed by the output bit
            bit = (s + int(zv)) & 1
            carry = (s + bit) >> 1
            ante.extend(col)
            if abs(z) not in constants:
                ante.append(-z if zv else z)
            if abs(free) not in constants:
                out.append(ante + [free if bit else -free])
    return out


class AdderPlugin(Extension):
    """Incremental wrapper around :func:`adder_propagate`.

    Only groups touching a literal assigned or unassigned since the previous
    call are rescanned.
    """

    name = "adder"

    def __init__(self, groups: Sequence[AdderGroup], constants: Iterable[int] = (),
                 name: str | None = None, solve_operand: bool = False):
        super().__init__(name)
        self.solve_operand = solve_operand
        self.groups = list(groups)
        self.constants = frozenset(abs(c) for c in constants)
        self._tracker = DirtyTracker(
            ([b for lits in (*g.operands, g.output) for b in lits] for g in self.groups),
            self.constants)

    @classmethod
    def from_records(cls, records: Iterable[AdderRecord], true_var: int | None = None,
                     solve_operand: bool = False) -> "AdderPlugin":
        return cls([AdderGroup.from_record(r) for r in records],
                   () if true_var is None else (true_var,), solve_operand=solve_operand)

    def on_propagate(self, view: AssignmentView) -> list[list[int]]:
        dirty = self._tracker.dirty(view)
        if not dirty:
            return []
        groups = self.groups
        return adder_propagate(view, (groups[i] for i in dirty), self.constants, self.solve_operand)
