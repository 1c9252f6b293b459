"""Conflict analysis by native re-hashing of a fully assigned secret."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from ..encoder import reference as ref
from ..programmatic import AssignmentView, Extension


@dataclass
class MessageSpec:
    """Which variables hold the secret and what they must hash to.

    Two shapes are supported:

    * a whole block: ``words`` maps schedule indices 0..15 to bit lists and
      ``state`` is empty; the digest is the compression of that block;
    * a round suffix: ``state`` holds the register words at step ``start`` and
      ``words`` the schedule words the suffix consumes; ``fixed_words`` supplies
      schedule words that are known constants. The digest is the chaining value
      plus the state after step ``rounds - 1``.
    """
    function: str
    rounds: int
    digest: tuple[int, ...]
    iv: tuple[int, ...] | None = None
    start: int = 0
    state: list[tuple[int, ...]] = field(default_factory=list)
    words: dict[int, tuple[int, ...]] = field(default_factory=dict)
    fixed_words: dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.function not in ref.MAX_ROUNDS:
            raise ValueError(f"unknown function {self.function!r}")
        if len(self.digest) != ref.DIGEST_WORDS[self.function]:
            raise ValueError("digest length does not match the function")
        if self.iv is None:
            self.iv = ref.SHA256_IV if self.function == "sha256" else ref.SHA1_IV
        self.iv = tuple(self.iv)
        if self.state and len(self.state) != ref.DIGEST_WORDS[self.function]:
            raise ValueError("state must hold one word per register")
        if not self.state and sorted(self.words) != list(range(16)):
            raise ValueError("a block secret needs schedule words 0..15")

    def bits(self) -> list[int]:
        out = [b for w in self.state for b in w]
        for t in sorted(self.words):
            out.extend(self.words[t])
        return out

    def evaluate(self, state: Sequence[int], words: dict[int, int]) -> tuple[int, ...]:
        """Digest for given secret values (``state`` empty for a block secret)."""
        fn = self.function
        if not state:
            block = [words[t] for t in range(16)]
            return ref.compress(fn, block, self.iv, self.rounds)
        sched = dict(self.fixed_words)
        sched.update(words)
        step = ref.sha256_rounds if fn == "sha256" else ref.sha1_rounds
        st = step(state, sched, self.start, self.rounds)
        return tuple((a + b) & ref.M32 for a, b in zip(self.iv, st))


def _word(view: AssignmentView, bits: Sequence[int], lits: list[int]) -> int | None:
    v = 0
    for i, b in enumerate(bits):
        x = view.lit_value(b)
        if x is None:
            return None
        if x:
            v |= 1 << i
        lits.append(b if x else -b)
    return v


def secret_values(view: AssignmentView, spec: MessageSpec):
    """Current (state, words, literals) or None if any secret bit is free."""
    lits: list[int] = []
    state = []
    for w in spec.state:
        x = _word(view, w, lits)
        if x is None:
            return None
        state.append(x)
    words = {}
    for t in sorted(spec.words):
        x = _word(view, spec.words[t], lits)
        if x is None:
            return None
        words[t] = x
    return state, words, lits


def hash_check(view: AssignmentView, spec: MessageSpec) -> list[list[int]]:
    got = secret_values(view, spec)
    if got is None:
        return []
    state, words, lits = got
    if spec.evaluate(state, words) == tuple(spec.digest):
        return []
    return [[-l for l in lits]]


class HashCheckPlugin(Extension):
    name = "hashcheck"

    def __init__(self, spec: MessageSpec, name: str | None = None):
        super().__init__(name)
        self.spec = spec

    def on_check(self, view: AssignmentView) -> list[list[int]]:
        return hash_check(view, self.spec)
