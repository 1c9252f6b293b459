"""Preimage instances: find a block hashing to a given digest.

The target digest comes from a seeded random block. The last ``free_bits``
bits of that block in big-endian serialization order (so the low bits of
``W[15]`` first) are left unknown; everything else is fixed as unit clauses. With ``free_bits=0``
the instance is a plain evaluation of the hash and has exactly one model.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from . import __version__
from .encoder import reference as ref
from .encoder.builder import CnfBuilder, WordVar
from .encoder.sha import encode
from .encoder.varmap import VarMap
from .plugins.adder import AdderGroup, AdderPlugin
from .plugins.hashcheck import HashCheckPlugin, MessageSpec
from .solver.dimacs import format_dimacs


@dataclass
class PreimageInstance:
    function: str
    rounds: int
    num_vars: int
    clauses: list[list[int]]
    varmap: VarMap
    message: list[WordVar]
    digest: tuple[int, ...]
    block: list[int]
    free_bits: int
    adders: list[AdderGroup]
    true_var: int | None
    seed: int | None = None
    meta: dict = field(default_factory=dict)

    def message_spec(self) -> MessageSpec:
        return MessageSpec(self.function, self.rounds, self.digest,
                           words={t: w.bits for t, w in enumerate(self.message)})

    def plugins(self, names: Iterable[str]) -> list:
        consts = () if self.true_var is None else (self.true_var,)
        out = []
        for n in names:
            if n == "adder":
                out.append(AdderPlugin(self.adders, consts))
            elif n == "hashcheck":
                out.append(HashCheckPlugin(self.message_spec()))
            else:
                raise ValueError(f"unknown preimage plugin {n!r}")
        return out

    def decode(self, model_value) -> list[int]:
        return [sum(1 << i for i, b in enumerate(w.bits) if model_value(b)) for w in self.message]

    def metadata(self) -> dict:
        return {
            "generator": f"cdclcrypto {__version__}",
            "kind": "preimage",
            "function": self.function,
            "rounds": self.rounds,
            "seed": self.seed,
            "free_bits": self.free_bits,
            "digest": ref.digest_hex(self.digest),
            "true_var": self.true_var,
            "adders": [[list(map(list, g.operands)), list(g.output)] for g in self.adders],
        }

    def save(self, stem: str | Path) -> tuple[Path, Path, Path]:
        stem = Path(stem)
        paths = (stem.with_suffix(".cnf"), stem.with_suffix(".varmap"), stem.with_suffix(".json"))
        comments = [f"preimage {self.function} rounds={self.rounds} free_bits={self.free_bits} "
                    f"seed={self.seed}"]
        paths[0].write_text(format_dimacs(self.num_vars, self.clauses, comments))
        paths[1].write_text(self.varmap.dumps())
        paths[2].write_text(json.dumps(self.metadata(), indent=1, sort_keys=True) + "\n")
        return paths


def build_preimage_instance(function: str = "sha256", rounds: int | None = None,
                            seed: int = 0, free_bits: int = 0,
                            adder_style: str = "compact") -> PreimageInstance:
    if function not in ref.MAX_ROUNDS:
        raise ValueError(f"unknown function {function!r}")
    rounds = ref.MAX_ROUNDS[function] if rounds is None else rounds
    if not 0 <= free_bits <= 512:
        raise ValueError("free_bits must be in 0..512")
    rng = random.Random(seed)
    block = [rng.getrandbits(32) for _ in range(16)]
    digest = ref.compress(function, block, None, rounds)
    b = CnfBuilder(adder_style)
    msg = [b.new_word(name=f"W[{t}]") for t in range(16)]
    trace = encode(function, b, msg, rounds=rounds)
    for i, w in enumerate(trace.digest):
        b.name(f"digest[{i}]", w)
        b.fix(w, digest[i])
    # pos is the bit's index in the big-endian block; the tail stays free
    fixed = 512 - free_bits
    for t, w in enumerate(msg):
        for i, lit in enumerate(w.bits):
            pos = 32 * t + (31 - i)
            if pos < fixed:
                b.add([lit if block[t] >> i & 1 else -lit])
    b.varmap.meta.update({"function": function, "rounds": str(rounds), "kind": "preimage",
                          "generator": f"cdclcrypto-{__version__}"})
    adders = [AdderGroup.from_record(r) for r in b.adders]
    return PreimageInstance(function, rounds, b.num_vars, b.clauses, b.varmap, msg,
                            tuple(digest), block, free_bits, adders, b._true, seed)
