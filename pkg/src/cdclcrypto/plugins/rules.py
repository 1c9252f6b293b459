"""Propagation tables for bitwise operations over generalized conditions.

Each table entry maps a tuple of input conditions to the set image of the
operation: every way of picking an allowed pair per input is evaluated on both
executions, and the resulting output pairs form the output condition.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Iterable

from .conditions import ALPHABET, CHAR_TO_MASK, MASK_TO_CHAR, PAIRS

OPS: dict[str, tuple[int, Callable[..., int]]] = {
    "IF": (3, lambda x, y, z: (x & y) | ((1 - x) & z)),
    "MAJ": (3, lambda x, y, z: (x & y) | (x & z) | (y & z)),
    "XOR2": (2, lambda x, y: x ^ y),
    "XOR3": (3, lambda x, y, z: x ^ y ^ z),
}

MODES = {
    "xor_diff_1bit": "?-x",
    "generalized_16": ALPHABET,
}


def set_image(op: str, masks: tuple[int, ...]) -> int:
    """Output mask of ``op`` applied to input condition masks."""
    _, f = OPS[op]
    choices = [[p for i, p in enumerate(PAIRS) if m >> i & 1] for m in masks]
    out = 0
    for combo in product(*choices):
        y = f(*(p[0] for p in combo))
        yp = f(*(p[1] for p in combo))
        out |= 1 << (y + 2 * yp)
    return out


@dataclass
class RuleTable:
    op: str
    arity: int
    mode: str
    table: dict[tuple[int, ...], int] = field(default_factory=dict)

    def lookup(self, masks: tuple[int, ...]) -> int:
        return self.table[masks]

    def informative(self) -> dict[tuple[int, ...], int]:
        """Entries whose output says more than ``?``."""
        return {k: v for k, v in self.table.items() if v != 0xF}

    def dumps(self) -> str:
        lines = [f"# rules op={self.op} arity={self.arity} mode={self.mode}"]
        for k in sorted(self.table):
            ins = "".join(MASK_TO_CHAR[m] for m in k)
            lines.append(f"{self.op} {self.arity} {ins} {MASK_TO_CHAR[self.table[k]]}")
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "RuleTable":
        op = mode = None
        arity = None
        table: dict[tuple[int, ...], int] = {}
        for n, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                for tok in line[1:].split():
                    if tok.startswith("mode="):
                        mode = tok[5:]
                continue
            parts = line.split()
            if len(parts) != 4:
                raise ValueError(f"line {n}: expected 'op arity inputs output'")
            o, a, ins, outc = parts
            a = int(a)
            if op is None:
                op, arity = o, a
            elif (o, a) != (op, arity):
                raise ValueError(f"line {n}: mixed operations in one table")
            if len(ins) != a or any(c not in CHAR_TO_MASK for c in ins + outc) or len(outc) != 1:
                raise ValueError(f"line {n}: bad conditions {ins!r} {outc!r}")
            key = tuple(CHAR_TO_MASK[c] for c in ins)
            if key in table:
                raise ValueError(f"line {n}: duplicate entry {ins}")
            table[key] = CHAR_TO_MASK[outc]
        if op is None:
            raise ValueError("empty rule table")
        if op not in OPS or OPS[op][0] != arity:
            raise ValueError(f"unknown operation {op}/{arity}")
        return cls(op, arity, mode or "generalized_16", table)


def build_rule_table(op: str, mode: str = "generalized_16") -> RuleTable:
    if op not in OPS:
        raise ValueError(f"unknown operation {op!r}; expected one of {sorted(OPS)}")
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {sorted(MODES)}")
    arity, _ = OPS[op]
    masks = [CHAR_TO_MASK[c] for c in MODES[mode]]
    table = {k: set_image(op, k) for k in product(masks, repeat=arity)}
    return RuleTable(op, arity, mode, table)


def render(key: Iterable[int], out: int) -> str:
    return "".join(MASK_TO_CHAR[m] for m in key) + " -> " + MASK_TO_CHAR[out]


CENSUS_CONVENTIONS = {
    "all_inputs": "every input tuple whose output is not '?'",
    "no_contradiction": "input tuples without '#' whose output is not '?'",
    "no_contradiction_no_free": "input tuples without '#' or '?' whose output is not '?'",
}


def census(table: RuleTable) -> dict[str, int]:
    """Count informative entries under several counting conventions."""
    full, empty = 0xF, 0x0
    rows = [(k, v) for k, v in table.table.items() if v != full]
    return {
        "all_inputs": len(rows),
        "no_contradiction": sum(1 for k, _ in rows if empty not in k),
        "no_contradiction_no_free": sum(1 for k, _ in rows if empty not in k and full not in k),
    }
