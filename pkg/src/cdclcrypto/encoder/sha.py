"""SHA-1 and SHA-256 compression functions as CNF circuits.

Round semantics match :mod:`.reference`: ``rounds`` steps, schedule words
only up to ``W[rounds-1]``, then the feed-forward. The encoders return a
:class:`Trace` that keeps every word a downstream tool may need (schedule,
per-step A/E, bitwise-operation instances, digest).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .builder import CnfBuilder, Operand, WordVar
from .reference import MAX_ROUNDS, SHA1_IV, SHA1_K, SHA256_IV, SHA256_K


@dataclass
class BitOp:
    """A bitwise operation on words: ``output = op(*inputs)`` per bit position."""
    op: str  # IF, MAJ, XOR2 or XOR3
    inputs: tuple[WordVar, ...]
    output: WordVar
    label: str


@dataclass
class Trace:
    function: str
    rounds: int
    start: int = 0
    W: dict[int, WordVar] = field(default_factory=dict)
    A: dict[int, WordVar] = field(default_factory=dict)  # A[t]: new A produced by step t
    E: dict[int, WordVar] = field(default_factory=dict)  # E[t]: new E (SHA-256) produced by step t
    ops: list[BitOp] = field(default_factory=list)
    state: tuple[WordVar, ...] = ()  # state after the last step, before feed-forward
    digest: tuple[WordVar, ...] = ()


def _check(fn: str, rounds: int) -> None:
    if not 1 <= rounds <= MAX_ROUNDS[fn]:
        raise ValueError(f"{fn} rounds must be in 1..{MAX_ROUNDS[fn]}, got {rounds}")


def _xor3(b: CnfBuilder, trace: Trace | None, x: WordVar, y: WordVar, z: WordVar, label: str) -> WordVar:
    out = b.gate("XOR", x, y, z)
    if trace is not None:
        trace.ops.append(BitOp("XOR3", (x, y, z), out, label))
    return out


def _op(b: CnfBuilder, trace: Trace | None, kind: str, ins: tuple[WordVar, ...], label: str) -> WordVar:
    out = b.gate(kind, *ins)
    if trace is not None:
        trace.ops.append(BitOp(kind, ins, out, label))
    return out


# ---------------------------------------------------------------- SHA-256

def sha256_schedule(b: CnfBuilder, words: dict[int, WordVar], rounds: int,
                    trace: Trace | None = None) -> None:
    for t in range(16, rounds):
        if t in words:
            continue
        w2, w15 = words[t - 2], words[t - 15]
        s1 = _xor3(b, trace, b.rotr(w2, 17), b.rotr(w2, 19), b.shr(w2, 10), f"s1[{t}]")
        s0 = _xor3(b, trace, b.rotr(w15, 7), b.rotr(w15, 18), b.shr(w15, 3), f"s0[{t}]")
        words[t] = b.add_multi(s1, words[t - 7], s0, words[t - 16])


def sha256_steps(b: CnfBuilder, state: Sequence[Operand], words: dict[int, WordVar],
                 start: int, stop: int, trace: Trace | None = None) -> tuple[WordVar, ...]:
    """Encode steps ``start .. stop-1`` from ``state`` (A..H)."""
    st = [b.word(x) for x in state]
    for t in range(start, stop):
        a, bb, c, d, e, f, g, h = st
        S1 = _xor3(b, trace, b.rotr(e, 6), b.rotr(e, 11), b.rotr(e, 25), f"S1[{t}]")
        chv = _op(b, trace, "IF", (e, f, g), f"Ch[{t}]")
        t1 = b.add_multi(h, S1, chv, SHA256_K[t], words[t])
        S0 = _xor3(b, trace, b.rotr(a, 2), b.rotr(a, 13), b.rotr(a, 22), f"S0[{t}]")
        mj = _op(b, trace, "MAJ", (a, bb, c), f"Maj[{t}]")
        na = b.add_multi(t1, S0, mj)
        ne = b.add_multi(d, t1)
        if trace is not None:
            trace.A[t] = na
            trace.E[t] = ne
        st = [na, a, bb, c, ne, e, f, g]
    return tuple(st)


def encode_sha256(b: CnfBuilder, message: Sequence[Operand], iv: Sequence[Operand] | None = None,
                  rounds: int = 64, feed_forward: bool = True) -> Trace:
    _check("sha256", rounds)
    if len(message) != 16:
        raise ValueError("SHA-256 block is 16 words")
    ivw = [b.word(x) for x in (iv if iv is not None else SHA256_IV)]
    if len(ivw) != 8:
        raise ValueError("SHA-256 chaining value is 8 words")
    trace = Trace("sha256", rounds)
    words = {t: b.word(m) for t, m in enumerate(message)}
    sha256_schedule(b, words, rounds, trace)
    trace.W = {t: words[t] for t in range(max(16, rounds)) if t in words}
    trace.state = sha256_steps(b, ivw, words, 0, rounds, trace)
    if feed_forward:
        trace.digest = tuple(b.add_multi(x, y) for x, y in zip(ivw, trace.state))
    else:
        trace.digest = trace.state
    return trace


# ------------------------------------------------------------------ SHA-1

def sha1_schedule(b: CnfBuilder, words: dict[int, WordVar], rounds: int,
                  trace: Trace | None = None) -> None:
    for t in range(16, rounds):
        if t in words:
            continue
        x = b.xor(words[t - 3], words[t - 8], words[t - 14], words[t - 16])
        words[t] = b.rotl(x, 1)


def sha1_steps(b: CnfBuilder, state: Sequence[Operand], words: dict[int, WordVar],
               start: int, stop: int, trace: Trace | None = None) -> tuple[WordVar, ...]:
    st = [b.word(x) for x in state]
    for t in range(start, stop):
        a, bb, c, d, e = st
        if t < 20:
            f = _op(b, trace, "IF", (bb, c, d), f"f[{t}]")
        elif 40 <= t < 60:
            f = _op(b, trace, "MAJ", (bb, c, d), f"f[{t}]")
        else:
            f = _xor3(b, trace, bb, c, d, f"f[{t}]")
        na = b.add_multi(b.rotl(a, 5), f, e, SHA1_K[t // 20], words[t])
        if trace is not None:
            trace.A[t] = na
        st = [na, a, b.rotl(bb, 30), c, d]
    return tuple(st)


def encode_sha1(b: CnfBuilder, message: Sequence[Operand], iv: Sequence[Operand] | None = None,
                rounds: int = 80, feed_forward: bool = True) -> Trace:
    _check("sha1", rounds)
    if len(message) != 16:
        raise ValueError("SHA-1 block is 16 words")
    ivw = [b.word(x) for x in (iv if iv is not None else SHA1_IV)]
    if len(ivw) != 5:
        raise ValueError("SHA-1 chaining value is 5 words")
    trace = Trace("sha1", rounds)
    words = {t: b.word(m) for t, m in enumerate(message)}
    sha1_schedule(b, words, rounds, trace)
    trace.W = dict(words)
    trace.state = sha1_steps(b, ivw, words, 0, rounds, trace)
    if feed_forward:
        trace.digest = tuple(b.add_multi(x, y) for x, y in zip(ivw, trace.state))
    else:
        trace.digest = trace.state
    return trace


def encode(fn: str, b: CnfBuilder, message: Sequence[Operand], iv: Sequence[Operand] | None = None,
           rounds: int | None = None) -> Trace:
    if fn == "sha256":
        return encode_sha256(b, message, iv, rounds or 64)
    if fn == "sha1":
        return encode_sha1(b, message, iv, rounds or 80)
    raise ValueError(f"unknown function {fn!r}")
