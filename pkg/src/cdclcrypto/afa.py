"""Algebraic fault attacks on the last rounds of SHA-1 / SHA-256.

A fault XORs an unknown value into one register (or schedule word) at the
input of step ``round``. Only the steps from there to the end are encoded:
one copy for the correct digest and one per faulty digest, all sharing the
unknown state at the fault frontier. Everything before the frontier is left
out of the instance.

At the frontier the register added to the schedule word in the first step
(H for SHA-256, E for SHA-1) only ever appears summed with that word, so the
two are merged into a single unknown and the word itself is fixed to zero.
The merge is skipped when the fault lands on either of them.
"""
from __future__ import annotations

import json
import logging
import random
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

from . import __version__
from .encoder import reference as ref
from .encoder.builder import CnfBuilder, WordVar
from .encoder.sha import sha1_steps, sha256_steps
from .encoder.varmap import VarMap
from .plugins.adder import AdderGroup, AdderPlugin
from .plugins.hashcheck import HashCheckPlugin, MessageSpec
from .solver import Solver, SolverConfig, Status
from .solver.dimacs import format_dimacs, parse_dimacs

log = logging.getLogger(__name__)

REGISTERS = {"sha256": "ABCDEFGH", "sha1": "ABCDE"}
MERGED = {"sha256": "H", "sha1": "E"}
DEFAULT_TARGET = {"sha256": "E", "sha1": "A"}
SUFFIX = 8

CONFIRMED = "confirmed"
ADMISSIBLE = "admissible"
REJECTED = "rejected"
UNSOLVED = "unsolved"


@dataclass
class FaultSpec:
    function: str = "sha256"
    rounds: int | None = None  # total steps; default is the full function
    round: int | None = None   # injection step; default rounds - 8
    target: str | None = None  # register letter or "W" (schedule word W[round])
    width: int = 32
    count: int = 16

    def __post_init__(self):
        fn = self.function
        if fn not in ref.MAX_ROUNDS:
            raise ValueError(f"unknown function {fn!r}")
        if self.rounds is None:
            self.rounds = ref.MAX_ROUNDS[fn]
        if not 1 <= self.rounds <= ref.MAX_ROUNDS[fn]:
            raise ValueError(f"rounds must be in 1..{ref.MAX_ROUNDS[fn]}")
        if self.round is None:
            self.round = max(0, self.rounds - SUFFIX)
        if not 0 <= self.round < self.rounds:
            raise ValueError("fault round must be below the round count")
        if self.target is None:
            self.target = DEFAULT_TARGET[fn]
        if self.target != "W" and self.target not in REGISTERS[fn]:
            raise ValueError(f"unknown fault target {self.target!r} for {fn}")
        if not 1 <= self.width <= 32:
            raise ValueError("fault width must be in 1..32")
        if self.count < 0:
            raise ValueError("fault count must be non-negative")

    @property
    def merged(self) -> bool:
        """Whether the frontier register and first schedule word are merged."""
        return self.target not in ("W", MERGED[self.function])

    @property
    def secret_words(self) -> list[int]:
        first = self.round + 1 if self.merged else self.round
        return list(range(first, self.rounds))


@dataclass
class Secret:
    """Unknowns at the fault frontier."""
    state: tuple[int, ...]
    words: dict[int, int]

    def as_json(self):
        return {"state": [f"{x:08x}" for x in self.state],
                "words": {str(t): f"{w:08x}" for t, w in sorted(self.words.items())}}


@dataclass
class FaultRun:
    message: list[int]
    correct: tuple[int, ...]
    faulty: list[tuple[int, ...]]
    secret: Secret
    deltas: list[int]


def _steps(fn):
    return ref.sha256_rounds if fn == "sha256" else ref.sha1_rounds


def _frontier(spec: FaultSpec, message: Sequence[int]) -> tuple[list[int], list[int]]:
    fn = spec.function
    iv = ref.SHA256_IV if fn == "sha256" else ref.SHA1_IV
    sched = (ref.sha256_schedule if fn == "sha256" else ref.sha1_schedule)(message, spec.rounds)
    state = list(_steps(fn)(iv, sched, 0, spec.round))
    return state, sched


def suffix_digest(spec: FaultSpec, state: Sequence[int], words: dict[int, int],
                  delta: int = 0) -> tuple[int, ...]:
    """Digest from frontier unknowns (in merged form) with an optional fault."""
    fn = spec.function
    iv = ref.SHA256_IV if fn == "sha256" else ref.SHA1_IV
    st = list(state)
    sched = dict(words)
    if spec.merged:
        sched[spec.round] = 0
    if spec.target == "W":
        sched[spec.round] ^= delta
    else:
        i = REGISTERS[fn].index(spec.target)
        st[i] ^= delta
    out = _steps(fn)(st, sched, spec.round, spec.rounds)
    return tuple((a + b) & ref.M32 for a, b in zip(iv, out))


def simulate_faults(message: Sequence[int] | None, spec: FaultSpec, seed: int,
                    zero_delta: bool = False) -> FaultRun:
    """Correct digest, faulty digests and the ground-truth frontier secret.

    Fault values are uniform over the non-zero ``width``-bit values (a zero
    fault carries no information). ``zero_delta`` forces all of them to 0.
    """
    rng = random.Random(seed)
    if message is None:
        message = [rng.getrandbits(32) for _ in range(16)]
    message = list(message)
    if len(message) != 16:
        raise ValueError("message block is 16 words")
    state, sched = _frontier(spec, message)
    merged_i = REGISTERS[spec.function].index(MERGED[spec.function])
    if spec.merged:
        state[merged_i] = (state[merged_i] + sched[spec.round]) & ref.M32
    words = {t: sched[t] for t in spec.secret_words}
    secret = Secret(tuple(state), words)
    deltas = [0 if zero_delta else rng.randrange(1, 1 << spec.width) for _ in range(spec.count)]
    correct = suffix_digest(spec, state, words)
    assert correct == ref.compress(spec.function, message, None, spec.rounds)
    faulty = [suffix_digest(spec, state, words, d) for d in deltas]
    return FaultRun(message, correct, faulty, secret, deltas)


@dataclass
class AfaInstance:
    spec: FaultSpec
    num_vars: int
    clauses: list[list[int]]
    varmap: VarMap
    correct: tuple[int, ...]
    faulty: list[tuple[int, ...]]
    adders: list[AdderGroup]
    true_var: int | None
    seed: int | None = None
    meta: dict = field(default_factory=dict)

    # -- named pieces
    def state_bits(self) -> list[tuple[int, ...]]:
        return [self.varmap[f"S[{r}]"] for r in REGISTERS[self.spec.function]]

    def word_bits(self) -> dict[int, tuple[int, ...]]:
        return {t: self.varmap[f"W[{t}]"] for t in self.spec.secret_words}

    def delta_bits(self, i: int) -> tuple[int, ...]:
        return self.varmap[f"delta[{i}]"]

    def message_spec(self) -> MessageSpec:
        iv = ref.SHA256_IV if self.spec.function == "sha256" else ref.SHA1_IV
        return MessageSpec(self.spec.function, self.spec.rounds, tuple(self.correct), iv,
                           start=self.spec.round, state=self.state_bits(), words=self.word_bits(),
                           fixed_words={self.spec.round: 0} if self.spec.merged else {})

    def metadata(self) -> dict:
        return {
            "generator": f"cdclcrypto {__version__}",
            "kind": "afa",
            "function": self.spec.function,
            "rounds": self.spec.rounds,
            "spec": asdict(self.spec),
            "seed": self.seed,
            "correct": ref.digest_hex(self.correct),
            "faulty": [ref.digest_hex(d) for d in self.faulty],
            "true_var": self.true_var,
            "adders": [[list(map(list, g.operands)), list(g.output)] for g in self.adders],
            **self.meta,
        }

    def save(self, stem: str | Path) -> tuple[Path, Path, Path]:
        stem = Path(stem)
        paths = (stem.with_suffix(".cnf"), stem.with_suffix(".varmap"), stem.with_suffix(".json"))
        comments = [f"afa {self.spec.function} rounds={self.spec.rounds} round={self.spec.round} "
                    f"target={self.spec.target} faults={self.spec.count} seed={self.seed}"]
        paths[0].write_text(format_dimacs(self.num_vars, self.clauses, comments))
        paths[1].write_text(self.varmap.dumps())
        paths[2].write_text(json.dumps(self.metadata(), indent=1, sort_keys=True) + "\n")
        return paths

    @classmethod
    def load(cls, stem: str | Path) -> "AfaInstance":
        stem = Path(stem)
        cnf = parse_dimacs(stem.with_suffix(".cnf").read_text())
        vm = VarMap.loads(stem.with_suffix(".varmap").read_text())
        meta = json.loads(stem.with_suffix(".json").read_text())
        spec = FaultSpec(**meta["spec"])
        unhex = lambda h: tuple(int(h[i:i + 8], 16) for i in range(0, len(h), 8))
        adders = [AdderGroup(tuple(map(tuple, ops)), tuple(out)) for ops, out in meta["adders"]]
        return cls(spec, cnf.num_vars, cnf.clauses, vm, unhex(meta["correct"]),
                   [unhex(h) for h in meta["faulty"]], adders, meta["true_var"], meta["seed"])


def _fix_output(b: CnfBuilder, state: Sequence[WordVar], digest: Sequence[int], iv: Sequence[int]) -> None:
    # the chaining value is public, so the feed-forward is undone natively
    for w, d, h in zip(state, digest, iv):
        b.fix(w, (d - h) & ref.M32)


def build_afa_instance(spec: FaultSpec, correct: Sequence[int], faulty: Sequence[Sequence[int]],
                       seed: int | None = None, adder_style: str = "compact") -> AfaInstance:
    fn = spec.function
    if len(faulty) != spec.count:
        raise ValueError(f"spec expects {spec.count} faulty digests, got {len(faulty)}")
    for d in (correct, *faulty):
        if len(d) != ref.DIGEST_WORDS[fn]:
            raise ValueError("digest length does not match the function")
    iv = ref.SHA256_IV if fn == "sha256" else ref.SHA1_IV
    steps = sha256_steps if fn == "sha256" else sha1_steps
    b = CnfBuilder(adder_style)
    regs = REGISTERS[fn]
    state = [b.new_word(name=f"S[{r}]") for r in regs]
    words: dict[int, WordVar] = {t: b.new_word(name=f"W[{t}]") for t in spec.secret_words}
    if spec.merged:
        words[spec.round] = b.constant(0)

    out = steps(b, state, words, spec.round, spec.rounds)
    _fix_output(b, out, correct, iv)
    for i, dig in enumerate(faulty):
        delta = b.new_word(spec.width, name=f"delta[{i}]")
        dw = WordVar(delta.bits + (b.false,) * (32 - spec.width))
        st = list(state)
        wd = dict(words)
        if spec.target == "W":
            wd[spec.round] = b.xor(wd[spec.round], dw)
        else:
            k = regs.index(spec.target)
            st[k] = b.xor(st[k], dw)
        _fix_output(b, steps(b, st, wd, spec.round, spec.rounds), dig, iv)

    b.varmap.meta.update({"function": fn, "rounds": str(spec.rounds), "kind": "afa",
                          "generator": f"cdclcrypto-{__version__}"})
    adders = [AdderGroup.from_record(r) for r in b.adders]
    return AfaInstance(spec, b.num_vars, b.clauses, b.varmap, tuple(correct),
                       [tuple(d) for d in faulty], adders, b._true, seed)


@dataclass
class AttackResult:
    status: Status
    verdict: str
    secret: Secret | None
    deltas: list[int] | None
    stats: dict
    wall_seconds: float
    plugins: tuple[str, ...]


def _word(model_value, bits: Sequence[int]) -> int:
    return sum(1 << i for i, b in enumerate(bits) if model_value(b))


def admissible(inst: AfaInstance, secret: Secret, deltas: Sequence[int]) -> bool:
    """Whether ``secret`` with these faults reproduces every observed digest."""
    if suffix_digest(inst.spec, secret.state, secret.words) != tuple(inst.correct):
        return False
    return all(suffix_digest(inst.spec, secret.state, secret.words, d) == tuple(f)
               for d, f in zip(deltas, inst.faulty))


def make_solver(inst: AfaInstance, plugins: Sequence[str] = ("adder", "hashcheck"),
                config: SolverConfig | None = None) -> Solver:
    s = Solver(inst.num_vars, inst.clauses, config, varmap=inst.varmap)
    for p in plugins:
        if p == "adder":
            s.register_extension(AdderPlugin(inst.adders, () if inst.true_var is None else (inst.true_var,),
                                             solve_operand=True))
        elif p == "hashcheck":
            s.register_extension(HashCheckPlugin(inst.message_spec()))
        else:
            raise ValueError(f"unknown AFA plugin {p!r}")
    return s


def run_attack(inst: AfaInstance, plugins: Sequence[str] = ("adder", "hashcheck"),
               max_conflicts: int | None = None, time_limit: float | None = None,
               ground_truth: Secret | None = None, check_unique: bool = False,
               seed: int = 0) -> AttackResult:
    """Solve an AFA instance and classify the recovered secret.

    A solution is CONFIRMED when it reproduces every digest and either equals
    ``ground_truth`` or, with ``check_unique``, a second solve shows no other
    frontier secret fits. Otherwise it is ADMISSIBLE.
    """
    plugins = tuple(plugins)
    cfg = SolverConfig(max_conflicts=max_conflicts, time_limit=time_limit, seed=seed)
    t0 = time.perf_counter()
    s = make_solver(inst, plugins, cfg)
    res = s.solve()
    stats = res.stats.as_dict()
    if res.status is not Status.SAT:
        verdict = UNSOLVED
        return AttackResult(res.status, verdict, None, None, stats, time.perf_counter() - t0, plugins)
    val = res.lit_true
    secret = Secret(tuple(_word(val, w) for w in inst.state_bits()),
                    {t: _word(val, w) for t, w in inst.word_bits().items()})
    deltas = [_word(val, inst.delta_bits(i)) for i in range(inst.spec.count)]
    if not admissible(inst, secret, deltas):
        log.error("model does not reproduce the digests; encoder bug")
        verdict = REJECTED
    elif ground_truth is not None:
        verdict = CONFIRMED if (secret.state == tuple(ground_truth.state)
                                and secret.words == dict(ground_truth.words)) else ADMISSIBLE
    elif check_unique:
        lits = [b if val(b) else -b for w in (*inst.state_bits(), *inst.word_bits().values()) for b in w]
        other = make_solver(inst, plugins, cfg)
        other.add_clause([-l for l in lits])
        verdict = CONFIRMED if other.solve().status is Status.UNSAT else ADMISSIBLE
    else:
        verdict = ADMISSIBLE
    return AttackResult(res.status, verdict, secret, deltas, stats, time.perf_counter() - t0, plugins)


CSV_FIELDS = ("instance", "plugins", "result", "verdict", "conflicts", "decisions",
              "propagations", "reason_clauses_added", "programmatic_conflicts", "wall_ms")


def csv_row(name: str, r: AttackResult) -> dict:
    return {
        "instance": name,
        "plugins": "+".join(r.plugins) or "none",
        "result": r.status.name,
        "verdict": r.verdict,
        "conflicts": r.stats["conflicts"],
        "decisions": r.stats["decisions"],
        "propagations": r.stats["propagations"],
        "reason_clauses_added": r.stats["reason_clauses_added"],
        "programmatic_conflicts": r.stats["programmatic_conflicts"],
        "wall_ms": round(r.wall_seconds * 1000),
    }
