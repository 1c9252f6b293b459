"""Generalized conditions on a pair of bits ``(x, x')``.

A condition is a set of allowed pairs, stored as a 4-bit mask. Bit ``x + 2*x'``
of the mask is set when the pair ``(x, x')`` is allowed.
"""
from __future__ import annotations

from dataclasses import dataclass

PAIRS = ((0, 0), (1, 0), (0, 1), (1, 1))

CHAR_TO_MASK = {
    "?": 0xF, "-": 0x9, "x": 0x6, "0": 0x1, "u": 0x2, "n": 0x4, "1": 0x8, "#": 0x0,
    "3": 0x3, "5": 0x5, "7": 0x7, "A": 0xA, "B": 0xB, "C": 0xC, "D": 0xD, "E": 0xE,
}
MASK_TO_CHAR = {m: c for c, m in CHAR_TO_MASK.items()}
ALPHABET = "".join(CHAR_TO_MASK)


@dataclass(frozen=True, order=True)
class Condition:
    mask: int

    def __post_init__(self):
        if not 0 <= self.mask <= 0xF:
            raise ValueError(f"condition mask out of range: {self.mask}")

    @classmethod
    def parse(cls, ch: str) -> "Condition":
        try:
            return cls(CHAR_TO_MASK[ch])
        except KeyError:
            raise ValueError(f"unknown condition character {ch!r}") from None

    @classmethod
    def of_pairs(cls, pairs) -> "Condition":
        m = 0
        for x, xp in pairs:
            m |= 1 << (x + 2 * xp)
        return cls(m)

    @property
    def char(self) -> str:
        return MASK_TO_CHAR[self.mask]

    def pairs(self) -> list[tuple[int, int]]:
        return [p for i, p in enumerate(PAIRS) if self.mask >> i & 1]

    def allows(self, x: int, xp: int) -> bool:
        return bool(self.mask >> (x + 2 * xp) & 1)

    def meet(self, other: "Condition") -> "Condition":
        return Condition(self.mask & other.mask)

    @property
    def empty(self) -> bool:
        return self.mask == 0

    def __str__(self) -> str:
        return self.char


# masks of the primitive facts an assignment can contribute
X_MASK = {0: 0x5, 1: 0xA}   # x fixed: pairs with that first component
XP_MASK = {0: 0x3, 1: 0xC}  # x' fixed
D_MASK = {0: 0x9, 1: 0x6}   # difference bit fixed


def from_values(x: bool | None, xp: bool | None, d: bool | None) -> int:
    """Mask implied by whichever of ``x``, ``x'`` and ``d`` are known."""
    m = 0xF
    if x is not None:
        m &= X_MASK[int(x)]
    if xp is not None:
        m &= XP_MASK[int(xp)]
    if d is not None:
        m &= D_MASK[int(d)]
    return m


def forced_facts(mask: int) -> dict[str, int]:
    """Boolean facts (on ``x``, ``x'``, ``d``) shared by every pair in ``mask``.

    An empty mask forces nothing here; callers treat it as a contradiction.
    """
    out: dict[str, int] = {}
    if not mask:
        return out
    for name, table in (("x", X_MASK), ("xp", XP_MASK), ("d", D_MASK)):
        for v in (0, 1):
            if mask & ~table[v] & 0xF == 0:
                out[name] = v
    return out
