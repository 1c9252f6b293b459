"""Differential collision search on round-reduced SHA-256.

Two copies of the compression function run on message blocks ``m`` and
``m'``. Every tracked bit pair ``(x, x')`` gets a difference variable
``d = x xor x'``, and a differential path restricts the pairs bit by bit with
generalized conditions.

Path files hold one line per constrained word::

    # comment
    rounds 18
    3 W --------x-----------------------

The fields are the step index, the word (``W`` for the schedule word used in
that step, ``A`` / ``E`` for the register values the step produces) and 32
condition characters, most significant bit first. Internally conditions are
stored least significant bit first. Words that are not listed are all ``?``.
"""
from __future__ import annotations

import json
import logging
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from . import __version__
from .encoder import reference as ref
from .encoder.builder import CnfBuilder, WordVar
from .encoder.sha import Trace, encode_sha256
from .encoder.varmap import VarMap
from .plugins.adder import AdderGroup, AdderPlugin
from .plugins.conditions import CHAR_TO_MASK, MASK_TO_CHAR, PAIRS, forced_facts
from .plugins.gc import BitTriple, GcGate, GcPlugin

log = logging.getLogger(__name__)

WORDS = ("W", "A", "E")
FULL = 0xF


class PathError(ValueError):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


class CollisionWarning(UserWarning):
    pass


@dataclass
class DifferentialPath:
    conditions: dict[tuple[int, str], tuple[int, ...]] = field(default_factory=dict)  # LSB-first masks
    rounds: int | None = None
    provenance: list[str] = field(default_factory=list)

    def get(self, t: int, word: str) -> tuple[int, ...]:
        return self.conditions.get((t, word), (FULL,) * 32)

    def set(self, t: int, word: str, display: str) -> None:
        """Set a word from its most-significant-first display string."""
        self.conditions[(t, word)] = _masks(display)

    def display(self, t: int, word: str) -> str:
        return "".join(MASK_TO_CHAR[m] for m in reversed(self.get(t, word)))

    def dumps(self) -> str:
        lines = [f"# {p}" for p in self.provenance]
        if self.rounds is not None:
            lines.append(f"rounds {self.rounds}")
        for (t, w) in sorted(self.conditions, key=lambda k: (k[0], WORDS.index(k[1]))):
            lines.append(f"{t} {w} {self.display(t, w)}")
        return "\n".join(lines) + "\n"


def _masks(display: str) -> tuple[int, ...]:
    if len(display) != 32:
        raise ValueError(f"expected 32 condition characters, got {len(display)}")
    bad = [c for c in display if c not in CHAR_TO_MASK]
    if bad:
        raise ValueError(f"bad condition character {bad[0]!r}")
    if "#" in display:
        raise ValueError("condition '#' makes the path infeasible")
    return tuple(CHAR_TO_MASK[c] for c in reversed(display))


def parse_path(text: str) -> DifferentialPath:
    path = DifferentialPath()
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            path.provenance.append(line[1:].strip())
            continue
        parts = line.split()
        if parts[0] == "rounds":
            if len(parts) != 2 or not parts[1].isdigit():
                raise PathError(n, "expected 'rounds N'")
            if path.rounds is not None:
                raise PathError(n, "duplicate rounds line")
            path.rounds = int(parts[1])
            continue
        if len(parts) != 3:
            raise PathError(n, "expected 'round word conditions'")
        t, word, conds = parts
        if not t.isdigit():
            raise PathError(n, f"bad round index {t!r}")
        if word not in WORDS:
            raise PathError(n, f"unknown word {word!r}; expected one of {', '.join(WORDS)}")
        key = (int(t), word)
        if key in path.conditions:
            raise PathError(n, f"duplicate entry for round {t} word {word}")
        try:
            path.conditions[key] = _masks(conds)
        except ValueError as e:
            raise PathError(n, str(e)) from None
    return path


def load_path(path: str | Path) -> DifferentialPath:
    return parse_path(Path(path).read_text())


@dataclass
class CollisionInstance:
    rounds: int
    num_vars: int
    clauses: list[list[int]]
    varmap: VarMap
    message: tuple[list[WordVar], list[WordVar]]
    digest: tuple[tuple[WordVar, ...], tuple[WordVar, ...]]
    gates: list[GcGate]
    adders: list[AdderGroup]
    true_var: int | None
    d_vars: dict[tuple[int, int], int]
    path: DifferentialPath
    warnings: list[str] = field(default_factory=list)

    @property
    def tracked_bits(self) -> int:
        return len(self.d_vars)

    def plugins(self, names: Iterable[str]) -> list:
        consts = () if self.true_var is None else (self.true_var,)
        out = []
        for n in names:
            if n == "gc":
                out.append(GcPlugin(self.gates, constants=consts))
            elif n == "adder":
                out.append(AdderPlugin(self.adders, consts))
            else:
                raise ValueError(f"unknown collision plugin {n!r}")
        return out

    def metadata(self) -> dict:
        return {
            "generator": f"cdclcrypto {__version__}",
            "kind": "collision",
            "function": "sha256",
            "rounds": self.rounds,
            "tracked_bits": self.tracked_bits,
            "true_var": self.true_var,
            "warnings": self.warnings,
            "path": self.path.dumps(),
            "adders": [[list(map(list, g.operands)), list(g.output)] for g in self.adders],
            "gates": [[g.op, [list(t.lits()) for t in g.inputs], list(g.output.lits())] for g in self.gates],
        }

    def save(self, stem: str | Path) -> tuple[Path, Path, Path]:
        from .solver.dimacs import format_dimacs
        stem = Path(stem)
        paths = (stem.with_suffix(".cnf"), stem.with_suffix(".varmap"), stem.with_suffix(".json"))
        paths[0].write_text(format_dimacs(self.num_vars, self.clauses,
                                          [f"collision sha256 rounds={self.rounds}"]))
        paths[1].write_text(self.varmap.dumps())
        paths[2].write_text(json.dumps(self.metadata(), indent=1, sort_keys=True) + "\n")
        return paths


class _Diffs:
    """Difference variables, one per distinct (x, x') literal pair."""

    def __init__(self, b: CnfBuilder):
        self.b = b
        self.cache: dict[tuple[int, int], int] = {}

    def __call__(self, x: int, xp: int) -> int:
        b = self.b
        cx, cxp = b.const_value(x), b.const_value(xp)
        if x == xp:
            return b.false
        if x == -xp:
            return b.true
        if cx is not None and cxp is not None:
            return b.true if cx != cxp else b.false
        if cx is None and cxp is None:
            # xor is invariant under flipping both inputs and flips with one
            flip = (x < 0) != (xp < 0)
            key = (abs(x), abs(xp))
        else:
            flip, key = False, (x, xp)
        d = self.cache.get(key)
        if d is None:
            d = b.bit_xor(*key)
            self.cache[key] = d
        return -d if flip else d


def _constrain(b: CnfBuilder, x: int, xp: int, d: int, mask: int) -> None:
    if mask == FULL:
        return
    facts = forced_facts(mask)
    for name, v in facts.items():
        lit = {"x": x, "xp": xp, "d": d}[name]
        b.add([lit if v else -lit])
    for i, (a, ap) in enumerate(PAIRS):
        if not mask >> i & 1:
            b.add([-x if a else x, -xp if ap else xp])


def build_collision_instance(path: DifferentialPath, rounds: int,
                             adder_style: str = "compact") -> CollisionInstance:
    if not 1 <= rounds <= 64:
        raise ValueError("rounds must be in 1..64")
    if path.rounds is not None and path.rounds < rounds:
        raise ValueError(f"path covers {path.rounds} rounds, {rounds} requested")
    beyond = sorted({t for (t, w) in path.conditions if w != "W" and t >= rounds})
    if beyond:
        log.debug("ignoring path entries for steps %s beyond %d rounds", beyond, rounds)
    b = CnfBuilder(adder_style)
    m1 = [b.new_word() for _ in range(16)]
    m2 = [b.new_word() for _ in range(16)]
    tr1 = encode_sha256(b, m1, rounds=rounds)
    tr2 = encode_sha256(b, m2, rounds=rounds)
    diffs = _Diffs(b)

    def triple(x: int, xp: int) -> BitTriple:
        return BitTriple(x, xp, diffs(x, xp))

    tracked: list[tuple[str, WordVar, WordVar]] = []
    for t in sorted(tr1.W):
        tracked.append((f"W[{t}]", tr1.W[t], tr2.W[t]))
    for t in sorted(tr1.A):
        tracked.append((f"A[{t}]", tr1.A[t], tr2.A[t]))
        tracked.append((f"E[{t}]", tr1.E[t], tr2.E[t]))
    for i, (w1, w2) in enumerate(zip(tr1.digest, tr2.digest)):
        tracked.append((f"digest[{i}]", w1, w2))
    for name, w1, w2 in tracked:
        dw = [diffs(x, xp) for x, xp in zip(w1.bits, w2.bits)]
        b.name(name, w1)
        b.name(name.replace("[", "'[", 1), w2)
        b.name("d" + name, dw)

    gates: list[GcGate] = []
    for o1, o2 in zip(tr1.ops, tr2.ops):
        for j in range(32):
            ins = tuple(triple(a.bits[j], ap.bits[j]) for a, ap in zip(o1.inputs, o2.inputs))
            gates.append(GcGate(o1.op, ins, triple(o1.output.bits[j], o2.output.bits[j])))

    # path conditions
    words = {"W": (tr1.W, tr2.W), "A": (tr1.A, tr2.A), "E": (tr1.E, tr2.E)}
    for (t, w), masks in sorted(path.conditions.items()):
        src1, src2 = words[w]
        if t not in src1:
            continue
        for x, xp, m in zip(src1[t].bits, src2[t].bits, masks):
            _constrain(b, x, xp, diffs(x, xp), m)

    # the messages differ somewhere, the digests nowhere
    msg_d = [diffs(x, xp) for w1, w2 in zip(m1, m2) for x, xp in zip(w1.bits, w2.bits)]
    notes: list[str] = []
    if all(all(m in (0x9, 0x1, 0x8) for m in path.get(t, "W")) for t in range(16)):
        msg = "path fixes every message bit difference to 0; the instance is UNSAT by construction"
        warnings.warn(msg, CollisionWarning, stacklevel=2)
        log.warning(msg)
        notes.append(msg)
    b.add(msg_d)
    for w1, w2 in zip(tr1.digest, tr2.digest):
        b.equal(w1, w2)

    b.varmap.meta.update({"function": "sha256", "rounds": str(rounds), "kind": "collision",
                          "generator": f"cdclcrypto-{__version__}"})
    adders = [AdderGroup.from_record(r) for r in b.adders]
    return CollisionInstance(rounds, b.num_vars, b.clauses, b.varmap, (m1, m2),
                             (tr1.digest, tr2.digest), gates, adders, b._true,
                             dict(diffs.cache), path, notes)


@dataclass
class Collision:
    m: list[int]
    mp: list[int]
    digest: tuple[int, ...]
    digest_p: tuple[int, ...]
    verified: bool

    def report(self, rounds: int) -> str:
        return "\n".join([
            f"rounds   {rounds}",
            f"m        {''.join(f'{w:08x}' for w in self.m)}",
            f"m'       {''.join(f'{w:08x}' for w in self.mp)}",
            f"digest   {ref.digest_hex(self.digest)}",
            f"digest'  {ref.digest_hex(self.digest_p)}",
            f"verified {'yes' if self.verified else 'NO'}",
        ])


def verify_pair(m: Sequence[int], mp: Sequence[int], rounds: int) -> tuple[bool, tuple, tuple]:
    h = ref.sha256_compress(m, rounds=rounds)
    hp = ref.sha256_compress(mp, rounds=rounds)
    return (list(m) != list(mp) and h == hp), h, hp


def extract_and_verify(inst: CollisionInstance, model_value, rounds: int | None = None) -> Collision:
    """Decode both blocks from a model and check them with the native hash.

    ``model_value(lit)`` returns the truth value of a literal.
    """
    rounds = inst.rounds if rounds is None else rounds
    word = lambda w: sum(1 << i for i, b in enumerate(w.bits) if model_value(b))
    m = [word(w) for w in inst.message[0]]
    mp = [word(w) for w in inst.message[1]]
    ok, h, hp = verify_pair(m, mp, rounds)
    if list(m) != list(mp) and h != hp:
        log.error("model gives different digests under the reference hash; encoder bug")
    return Collision(m, mp, h, hp, ok)
