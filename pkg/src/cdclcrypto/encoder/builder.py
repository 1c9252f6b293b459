"""Bit-vector circuit builder with Tseitin translation to CNF.

A bit is a signed DIMACS literal. Constants are the literals of a single
reserved variable that is fixed true by a unit clause; it is allocated the
first time a constant is needed, so an empty builder exports ``p cnf 0 0``.
Gates fold constants and trivial operand patterns instead of allocating.

Words (:class:`WordVar`) are LSB first: ``word.bits[0]`` is the bit of
weight 1.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence, Union

from ..solver.dimacs import format_dimacs
from .varmap import VarMap


class BuilderError(ValueError):
    pass


@dataclass(frozen=True)
class WordVar:
    bits: tuple[int, ...]

    @property
    def width(self) -> int:
        return len(self.bits)

    def __len__(self) -> int:
        return len(self.bits)

    def __getitem__(self, i):
        return self.bits[i]

    def __iter__(self):
        return iter(self.bits)


@dataclass
class AdderRecord:
    """One multi-operand addition, kept for the adder propagation plugin."""
    operands: tuple[WordVar, ...]
    output: WordVar


Operand = Union[WordVar, int]


class CnfBuilder:
    ADDER_STYLES = ("compact", "tseitin")

    def __init__(self, adder_style: str = "compact") -> None:
        if adder_style not in self.ADDER_STYLES:
            raise BuilderError(f"unknown adder style {adder_style!r}")
        self.adder_style = adder_style
        self.num_vars = 0
        self.clauses: list[list[int]] = []
        self.varmap = VarMap()
        self.adders: list[AdderRecord] = []
        self._true: int | None = None

    # -------------------------------------------------------------- basics

    def new_var(self) -> int:
        self.num_vars += 1
        return self.num_vars

    def new_word(self, width: int = 32, name: str | None = None) -> WordVar:
        w = WordVar(tuple(self.new_var() for _ in range(width)))
        if name is not None:
            self.name(name, w)
        return w

    def add(self, clause: Iterable[int]) -> None:
        self.clauses.append(list(clause))

    @property
    def true(self) -> int:
        if self._true is None:
            self._true = self.new_var()
            self.add([self._true])
        return self._true

    @property
    def false(self) -> int:
        return -self.true

    def is_const(self, lit: int) -> bool:
        return self._true is not None and abs(lit) == self._true

    def const_value(self, lit: int) -> bool | None:
        if self._true is None or abs(lit) != self._true:
            return None
        return lit > 0

    def constant(self, value: int, width: int = 32) -> WordVar:
        if not 0 <= value < (1 << width):
            raise BuilderError(f"constant {value:#x} does not fit in {width} bits")
        t = self.true
        return WordVar(tuple(t if (value >> i) & 1 else -t for i in range(width)))

    def word(self, x: Operand, width: int = 32) -> WordVar:
        return x if isinstance(x, WordVar) else self.constant(x, width)

    def name(self, name: str, word: WordVar | Sequence[int]) -> None:
        bits = word.bits if isinstance(word, WordVar) else tuple(word)
        self.varmap.register(name, bits)

    def fix(self, word: WordVar, value: int) -> None:
        """Pin a word to a constant with unit clauses."""
        for i, b in enumerate(word.bits):
            self.add([b if (value >> i) & 1 else -b])

    def equal(self, a: WordVar, b: WordVar) -> None:
        self._same_width(a, b)
        for x, y in zip(a.bits, b.bits):
            if x == y:
                continue
            self.add([-x, y])
            self.add([x, -y])

    # ------------------------------------------------------- bit-level gates

    def bit_not(self, a: int) -> int:
        return -a

    def bit_and(self, a: int, b: int) -> int:
        ca, cb = self.const_value(a), self.const_value(b)
        if ca is False or cb is False or a == -b:
            return self.false
        if ca is True:
            return b
        if cb is True or a == b:
            return a
        o = self.new_var()
        self.add([-o, a])
        self.add([-o, b])
        self.add([o, -a, -b])
        return o

    def bit_or(self, a: int, b: int) -> int:
        return -self.bit_and(-a, -b)

    def bit_xor(self, a: int, b: int) -> int:
        ca, cb = self.const_value(a), self.const_value(b)
        if ca is not None:
            return -b if ca else b
        if cb is not None:
            return -a if cb else a
        if a == b:
            return self.false
        if a == -b:
            return self.true
        o = self.new_var()
        self.add([-o, a, b])
        self.add([-o, -a, -b])
        self.add([o, -a, b])
        self.add([o, a, -b])
        return o

    def bit_xor3(self, a: int, b: int, c: int) -> int:
        lits = [a, b, c]
        flip = False
        rest = []
        for x in lits:
            cv = self.const_value(x)
            if cv is None:
                rest.append(x)
            elif cv:
                flip = not flip
        # cancel equal / opposite pairs
        reduced: list[int] = []
        for x in rest:
            if x in reduced:
                reduced.remove(x)
            elif -x in reduced:
                reduced.remove(-x)
                flip = not flip
            else:
                reduced.append(x)
        if not reduced:
            return self.true if flip else self.false
        if len(reduced) == 1:
            return -reduced[0] if flip else reduced[0]
        if len(reduced) == 2:
            o = self.bit_xor(reduced[0], reduced[1])
            return -o if flip else o
        a, b, c = reduced
        o = self.new_var()
        for sa in (1, -1):
            for sb in (1, -1):
                for sc in (1, -1):
                    # forbid assignments with the wrong parity
                    neg = (sa < 0) + (sb < 0) + (sc < 0)
                    self.add([sa * a, sb * b, sc * c, o if neg % 2 else -o])
        return -o if flip else o

    def bit_if(self, x: int, y: int, z: int) -> int:
        cx = self.const_value(x)
        if cx is not None:
            return y if cx else z
        if y == z:
            return y
        if x == y:
            return self.bit_or(x, z)
        if x == -y:
            return self.bit_and(-x, z)
        if x == z:
            return self.bit_and(x, y)
        if x == -z:
            return self.bit_or(-x, y)
        cy, cz = self.const_value(y), self.const_value(z)
        if cy is not None or cz is not None:
            # IF(x, y, z) = (x & y) | (~x & z) with one constant branch
            return self.bit_or(self.bit_and(x, y), self.bit_and(-x, z))
        o = self.new_var()
        self.add([-x, -y, o])
        self.add([-x, y, -o])
        self.add([x, -z, o])
        self.add([x, z, -o])
        self.add([-y, -z, o])
        self.add([y, z, -o])
        return o

    def bit_maj(self, a: int, b: int, c: int) -> int:
        for p, q, r in ((a, b, c), (b, c, a), (c, a, b)):
            cp = self.const_value(p)
            if cp is True:
                return self.bit_or(q, r)
            if cp is False:
                return self.bit_and(q, r)
            if p == q:
                return p
            if p == -q:
                return r
        o = self.new_var()
        for x, y in ((a, b), (a, c), (b, c)):
            self.add([-x, -y, o])
            self.add([x, y, -o])
        return o

    # ------------------------------------------------------------ word gates

    def _same_width(self, *words: WordVar) -> int:
        widths = {w.width for w in words}
        if len(widths) != 1:
            raise BuilderError(f"operand widths differ: {sorted(widths)}")
        return widths.pop()

    def gate(self, kind: str, *operands: Operand) -> WordVar:
        kind = kind.upper()
        arity = {"NOT": (1,), "AND": (2,), "OR": (2,), "XOR": (2, 3), "IF": (3,), "MAJ": (3,)}
        if kind not in arity:
            raise BuilderError(f"unknown gate {kind!r}")
        if len(operands) not in arity[kind]:
            raise BuilderError(f"{kind} takes {arity[kind]} operands, got {len(operands)}")
        width = next((o.width for o in operands if isinstance(o, WordVar)), 32)
        words = [self.word(o, width) for o in operands]
        self._same_width(*words)
        cols = zip(*(w.bits for w in words))
        if kind == "NOT":
            return WordVar(tuple(-a for (a,) in cols))
        fn = {"AND": self.bit_and, "OR": self.bit_or, "IF": self.bit_if, "MAJ": self.bit_maj,
              "XOR": self.bit_xor if len(words) == 2 else self.bit_xor3}[kind]
        return WordVar(tuple(fn(*col) for col in cols))

    def xor(self, *ops: Operand) -> WordVar:
        if len(ops) == 1:
            return self.word(ops[0])
        acc = self.gate("XOR", *ops[:3]) if len(ops) >= 3 else self.gate("XOR", *ops)
        rest = ops[3:] if len(ops) >= 3 else ()
        while rest:
            chunk = rest[:2]
            acc = self.gate("XOR", acc, *chunk)
            rest = rest[2:]
        return acc

    def rotr(self, w: WordVar, k: int) -> WordVar:
        if not 0 <= k < w.width:
            raise BuilderError(f"rotation {k} out of range for width {w.width}")
        return WordVar(w.bits[k:] + w.bits[:k])

    def rotl(self, w: WordVar, k: int) -> WordVar:
        if not 0 <= k < w.width:
            raise BuilderError(f"rotation {k} out of range for width {w.width}")
        return self.rotr(w, (w.width - k) % w.width)

    def shr(self, w: WordVar, k: int) -> WordVar:
        if not 0 <= k < w.width:
            raise BuilderError(f"shift {k} out of range for width {w.width}")
        if k == 0:
            return w
        return WordVar(w.bits[k:] + (self.false,) * k)

    # --------------------------------------------------------------- adders

    def add_multi(self, *operands: Operand, name: str | None = None) -> WordVar:
        """Modular sum of 2..7 words.

        Operands are compressed with carry-save full adders (Tseitin XOR3 and
        MAJ gates) down to two words, which are then summed by a ripple
        adder whose columns relate inputs and (sum, carry) jointly. That last
        stage is compact and correct but unit propagation cannot compute a
        column's outputs from its inputs alone; it needs a case split.
        """
        if not 2 <= len(operands) <= 7:
            raise BuilderError(f"add_multi takes 2..7 operands, got {len(operands)}")
        width = next((o.width for o in operands if isinstance(o, WordVar)), 32)
        ops = [self.word(o, width) for o in operands]
        self._same_width(*ops)
        record_ops = tuple(ops)

        # fold constant operands into one
        const = 0
        var_ops = []
        for w in ops:
            vals = [self.const_value(b) for b in w.bits]
            if all(v is not None for v in vals):
                const += sum(1 << i for i, v in enumerate(vals) if v)
            else:
                var_ops.append(w)
        const %= 1 << width
        if const or not var_ops:
            var_ops.append(self.constant(const, width))

        while len(var_ops) > 2:
            a, b, c = var_ops[:3]
            s = tuple(self.bit_xor3(x, y, z) for x, y, z in zip(a.bits, b.bits, c.bits))
            cy = tuple(self.bit_maj(x, y, z) for x, y, z in zip(a.bits[:-1], b.bits[:-1], c.bits[:-1]))
            var_ops = var_ops[3:] + [WordVar(s), WordVar((self.false,) + cy)]

        if len(var_ops) == 1:
            out = var_ops[0]
        else:
            out = self._ripple(var_ops[0], var_ops[1])
        self.adders.append(AdderRecord(record_ops, out))
        if name is not None:
            self.name(name, out)
        return out

    def _ripple(self, x: WordVar, y: WordVar) -> WordVar:
        carry = self.false
        out = []
        last = len(x.bits) - 1
        for j, (a, b) in enumerate(zip(x.bits, y.bits)):
            if self.adder_style == "tseitin":
                out.append(self.bit_xor3(a, b, carry))
                if j < last:
                    carry = self.bit_maj(a, b, carry)
                continue
            z, carry = self._column([a, b, carry])
            out.append(z)
        return WordVar(tuple(out))

    def _column(self, inputs: list[int]) -> tuple[int, int]:
        """One full-adder column ``sum(inputs) = z + 2 * carry``.

        Every clause mentions both outputs (``z`` and ``carry``), so fixing
        the inputs leaves two-literal residues and nothing is propagated.
        """
        k0 = 0
        lits = []
        for x in inputs:
            cv = self.const_value(x)
            if cv is None:
                lits.append(x)
            elif cv:
                k0 += 1
        n = len(lits)
        if n == 0:
            return (self.true if k0 & 1 else self.false,
                    self.true if k0 >= 2 else self.false)
        if n == 1 and k0 == 0:
            return lits[0], self.false
        if n == 1 and k0 == 2:
            return lits[0], self.true
        if n == 1 and k0 == 1:
            return -lits[0], lits[0]
        z = self.new_var()
        c = self.new_var()
        for zv in (0, 1):
            for cv in (0, 1):
                # clause literals excluding this (z, c) output pattern
                block = [-z if zv else z, -c if cv else c]
                k = zv + 2 * cv - k0
                if k < 0 or k > n:
                    self.add(block)
                    continue
                if k + 1 <= n:
                    for sub in combinations(lits, k + 1):
                        self.add([-x for x in sub] + block)
                if k - 1 >= 0:
                    for sub in combinations(lits, n - k + 1):
                        self.add(list(sub) + block)
        return z, c

    # --------------------------------------------------------------- export

    def export(self, comments: Iterable[str] = ()) -> tuple[str, str]:
        return format_dimacs(self.num_vars, self.clauses, comments), self.varmap.dumps()
