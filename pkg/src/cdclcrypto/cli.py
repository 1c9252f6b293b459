"""Command-line entry point: ``cdclcrypto <command> ...``.

Exit codes: 10 SAT / success, 20 UNSAT, 30 budget exhausted, 1 for contract
violations, builder errors and failed verification, 2 for usage errors.

The default budget comes from ``CDCLCRYPTO_BUDGET``, e.g.
``conflicts=100000,seconds=600``; explicit flags override it. When both
limits are set the first one exhausted stops the search.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Sequence

from . import __version__
from .afa import (CSV_FIELDS as AFA_CSV_FIELDS, FaultSpec, AfaInstance,
                  build_afa_instance, csv_row, run_attack, simulate_faults)
from .diffpath import PathError, build_collision_instance, extract_and_verify, load_path
from .encoder import reference as ref
from .encoder.builder import BuilderError, CnfBuilder
from .encoder.varmap import VarMap
from .plugins.adder import AdderGroup, AdderPlugin
from .plugins.gc import BitTriple, GcGate, GcPlugin
from .plugins.hashcheck import HashCheckPlugin, MessageSpec
from .plugins.rules import MODES, OPS, build_rule_table, census
from .preimage import build_preimage_instance
from .programmatic import ContractViolation
from .solver import Solver
from .solver.core import SolverConfig, Status
from .solver.dimacs import DimacsError, parse_dimacs

log = logging.getLogger("cdclcrypto")

BUDGET_ENV = "CDCLCRYPTO_BUDGET"
CSV_VERSION = 1
EXIT_ERROR = 1
PLUGINS_BY_KIND = {
    "preimage": ("adder", "hashcheck"),
    "afa": ("adder", "hashcheck"),
    "collision": ("adder", "gc"),
    "cnf": (),
}
STAT_KEYS = ("conflicts", "decisions", "propagations", "restarts", "learnt_clauses",
             "deleted_clauses", "reductions", "reason_clauses_added", "programmatic_conflicts")
BENCH_FIELDS = ("schema", "instance", "config", "result", "solved", "wall_seconds", *STAT_KEYS)


class CliError(Exception):
    """Reported on stderr with exit code 1."""


@dataclass
class Budget:
    conflicts: int | None = None
    seconds: float | None = None

    @classmethod
    def parse(cls, text: str | None) -> "Budget":
        out = cls()
        if not text:
            return out
        for part in text.split(","):
            key, _, val = part.partition("=")
            key = key.strip()
            try:
                if key == "conflicts":
                    out.conflicts = int(val)
                elif key == "seconds":
                    out.seconds = float(val)
                else:
                    raise ValueError
            except ValueError:
                raise CliError(f"bad budget item {part!r}; expected conflicts=N or seconds=S") from None
        return out


@dataclass
class RunConfig:
    """Everything a command needs, resolved from flags and the environment."""
    command: str
    function: str = "sha256"
    rounds: int | None = None
    seed: int = 0
    plugin_sets: list[tuple[str, ...]] = field(default_factory=list)
    budget: Budget = field(default_factory=Budget)
    csv: Path | None = None

    def solver_config(self) -> SolverConfig:
        return SolverConfig(max_conflicts=self.budget.conflicts, time_limit=self.budget.seconds,
                            seed=self.seed)


def _plugin_set(text: str) -> tuple[str, ...]:
    if text.strip() in ("", "none"):
        return ()
    return tuple(p.strip() for p in text.split(",") if p.strip())


def _resolve(args: argparse.Namespace) -> RunConfig:
    budget = Budget.parse(os.environ.get(BUDGET_ENV))
    if getattr(args, "max_conflicts", None) is not None:
        budget.conflicts = args.max_conflicts
    if getattr(args, "time_limit", None) is not None:
        budget.seconds = args.time_limit
    fn = getattr(args, "fn", "sha256")
    rounds = getattr(args, "rounds", None)
    if rounds is not None and not 1 <= rounds <= ref.MAX_ROUNDS[fn]:
        raise CliError(f"--rounds must be in 1..{ref.MAX_ROUNDS[fn]} for {fn}")
    sets = [_plugin_set(p) for p in (getattr(args, "plugins", None) or [])]
    csv_path = getattr(args, "csv", None)
    return RunConfig(args.command, fn, rounds, getattr(args, "seed", 0), sets, budget,
                     Path(csv_path) if csv_path else None)


def _write_csv(path: Path, fields: Sequence[str], rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(fields), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)


def _config_echo(args: argparse.Namespace) -> dict:
    # output locations are left out so the same instance is byte-identical anywhere
    skip = {"func", "out", "verbose"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _with_config(paths, args) -> None:
    meta_path = paths[2]
    meta = json.loads(meta_path.read_text())
    meta["config"] = _config_echo(args)
    meta_path.write_text(json.dumps(meta, indent=1, sort_keys=True) + "\n")


# ---------------------------------------------------------------- encode

def _builtin_paths() -> dict[str, Path]:
    root = resources.files("cdclcrypto") / "data" / "paths"
    return {p.name[:-4]: Path(str(p)) for p in root.iterdir() if p.name.endswith(".txt")}


def _load_path_arg(arg: str):
    builtin = _builtin_paths()
    p = Path(arg)
    if not p.exists() and arg in builtin:
        p = builtin[arg]
    if not p.exists():
        raise CliError(f"no path file {arg!r} (built-in paths: {', '.join(sorted(builtin))})")
    return load_path(p)


def _fault_spec(args, rounds: int | None) -> FaultSpec:
    return FaultSpec(function=args.fn, rounds=rounds, round=args.fault_round,
                     target=args.target, width=args.width, count=args.faults)


def cmd_encode(args) -> int:
    cfg = _resolve(args)
    kind = args.kind
    if kind == "preimage":
        inst = build_preimage_instance(cfg.function, cfg.rounds, cfg.seed, args.free_bits, args.adder_style)
        default = f"preimage-{cfg.function}-r{inst.rounds}-s{cfg.seed}"
    elif kind == "afa":
        spec = _fault_spec(args, cfg.rounds)
        run = simulate_faults(None, spec, cfg.seed)
        inst = build_afa_instance(spec, run.correct, run.faulty, cfg.seed, args.adder_style)
        default = f"afa-{cfg.function}-r{spec.rounds}-n{spec.count}-s{cfg.seed}"
    else:
        if cfg.function != "sha256":
            raise CliError("collision instances are SHA-256 only")
        if not args.path:
            raise CliError("--kind collision needs --path")
        path = _load_path_arg(args.path)
        rounds = cfg.rounds or path.rounds
        if rounds is None:
            raise CliError("give --rounds or a path with a 'rounds' line")
        inst = build_collision_instance(path, rounds, args.adder_style)
        default = f"collision-r{rounds}"
    stem = Path(args.out) if args.out else Path(default)
    stem.parent.mkdir(parents=True, exist_ok=True)
    paths = inst.save(stem)
    _with_config(paths, args)
    for p in paths:
        print(p)
    return 0


# ---------------------------------------------------------------- solve

def _stem(path: str) -> Path:
    p = Path(path)
    return p.with_suffix("") if p.suffix in (".cnf", ".json", ".varmap") else p


def _load_plugins(stem: Path, names: Sequence[str]) -> list:
    """Rebuild plugins for an instance from its JSON/VarMap sidecars."""
    if not names:
        return []
    meta_path = stem.with_suffix(".json")
    if not meta_path.exists():
        raise CliError(f"plugins {','.join(names)} need instance metadata {meta_path}")
    meta = json.loads(meta_path.read_text())
    kind = meta.get("kind")
    allowed = PLUGINS_BY_KIND.get(kind, ())
    for n in names:
        if n not in allowed:
            raise CliError(f"plugin {n!r} does not apply to {kind} instances "
                           f"(available: {', '.join(allowed) or 'none'})")
    consts = () if meta.get("true_var") is None else (meta["true_var"],)
    out = []
    for n in names:
        if n == "adder":
            groups = [AdderGroup(tuple(map(tuple, ops)), tuple(o)) for ops, o in meta["adders"]]
            out.append(AdderPlugin(groups, consts, solve_operand=(kind == "afa")))
        elif n == "gc":
            trip = lambda l: BitTriple(*l)
            gates = [GcGate(op, tuple(trip(t) for t in ins), trip(o)) for op, ins, o in meta["gates"]]
            out.append(GcPlugin(gates, constants=consts))
        elif n == "hashcheck":
            if kind == "afa":
                out.append(HashCheckPlugin(AfaInstance.load(stem).message_spec()))
            else:
                vm = VarMap.loads(stem.with_suffix(".varmap").read_text())
                h = meta["digest"]
                digest = tuple(int(h[i:i + 8], 16) for i in range(0, len(h), 8))
                spec = MessageSpec(meta["function"], meta["rounds"], digest,
                                   words={t: vm[f"W[{t}]"] for t in range(16)})
                out.append(HashCheckPlugin(spec))
    return out


def _solve_file(path: str, plugins: Sequence[str], config: SolverConfig):
    stem = _stem(path)
    cnf_path = stem.with_suffix(".cnf") if not Path(path).exists() else Path(path)
    try:
        cnf = parse_dimacs(cnf_path.read_text())
    except DimacsError as e:
        raise CliError(f"{cnf_path}: {e}") from None
    s = Solver(cnf.num_vars, cnf.clauses, config)
    for ext in _load_plugins(stem, plugins):
        s.register_extension(ext)
    return s.solve()


def _bench_row(name: str, plugins: Sequence[str], res) -> dict:
    st = res.stats.as_dict()
    row = {"schema": CSV_VERSION, "instance": name, "config": "+".join(plugins) or "none",
           "result": res.status.name, "solved": int(res.status is not Status.INDETERMINATE),
           "wall_seconds": round(st["wall_seconds"], 3)}
    row.update({k: st[k] for k in STAT_KEYS})
    return row


def cmd_solve(args) -> int:
    cfg = _resolve(args)
    plugins = cfg.plugin_sets[0] if cfg.plugin_sets else ()
    res = _solve_file(args.instance, plugins, cfg.solver_config())
    print(f"s {res.status.name}")
    if res.sat and args.model:
        lits = res.literals()
        print("v " + " ".join(map(str, lits)) + " 0")
    if args.stats:
        print(res.stats.format())
    if cfg.csv:
        _write_csv(cfg.csv, BENCH_FIELDS, [_bench_row(Path(args.instance).name, plugins, res)])
    return res.status.exit_code


# ---------------------------------------------------------------- attacks

def cmd_afa(args) -> int:
    cfg = _resolve(args)
    sets = cfg.plugin_sets or [("adder", "hashcheck")]
    spec = _fault_spec(args, cfg.rounds)
    run = simulate_faults(None, spec, cfg.seed)
    inst = build_afa_instance(spec, run.correct, run.faulty, cfg.seed, args.adder_style)
    name = f"afa-{spec.function}-r{spec.rounds}-f{spec.round}{spec.target}-n{spec.count}-s{cfg.seed}"
    print(f"instance {name}: {inst.num_vars} vars, {len(inst.clauses)} clauses")
    print(f"secret   {json.dumps(run.secret.as_json(), sort_keys=True)}")
    rows, verdicts, codes = [], set(), []
    for plugins in sets:
        r = run_attack(inst, plugins, cfg.budget.conflicts, cfg.budget.seconds,
                       ground_truth=run.secret, seed=cfg.seed)
        rows.append(csv_row(name, r))
        verdicts.add(r.status)
        print(f"[{'+'.join(plugins) or 'none'}] {r.status.name} {r.verdict} "
              f"conflicts={r.stats['conflicts']} wall={r.wall_seconds:.2f}s")
        if r.verdict == "rejected":
            codes.append(EXIT_ERROR)
        else:
            codes.append(r.status.exit_code)
    if cfg.csv:
        _write_csv(cfg.csv, AFA_CSV_FIELDS, rows)
    decided = verdicts - {Status.INDETERMINATE}
    if len(decided) > 1:
        log.error("plugin configurations disagree on the verdict")
        return EXIT_ERROR
    return EXIT_ERROR if EXIT_ERROR in codes else codes[-1]


def cmd_collide(args) -> int:
    cfg = _resolve(args)
    path = _load_path_arg(args.path)
    rounds = cfg.rounds or path.rounds
    if rounds is None:
        raise CliError("give --rounds or a path with a 'rounds' line")
    inst = build_collision_instance(path, rounds, args.adder_style)
    sets = cfg.plugin_sets or [("gc",)]
    print(f"instance collision-r{rounds}: {inst.num_vars} vars, {len(inst.clauses)} clauses, "
          f"{inst.tracked_bits} difference variables")
    rows, code = [], 0
    for plugins in sets:
        s = Solver(inst.num_vars, inst.clauses, cfg.solver_config())
        for ext in inst.plugins(plugins):
            s.register_extension(ext)
        res = s.solve()
        rows.append(_bench_row(f"collision-r{rounds}", plugins, res))
        label = "+".join(plugins) or "none"
        print(f"[{label}] {res.status.name} conflicts={res.stats.conflicts} "
              f"wall={res.stats.wall_seconds:.2f}s")
        this = res.status.exit_code
        if res.sat:
            col = extract_and_verify(inst, res.lit_true, rounds)
            print(col.report(rounds))
            if not col.verified:
                this = EXIT_ERROR
        code = EXIT_ERROR if EXIT_ERROR in (code, this) else this
    if cfg.csv:
        _write_csv(cfg.csv, BENCH_FIELDS, rows)
    return code


# ---------------------------------------------------------------- rules / bench

def cmd_rules(args) -> int:
    ops = [args.op] if args.op else list(OPS)
    chunks = []
    for op in ops:
        table = build_rule_table(op, args.mode)
        chunks.append(table.dumps())
        if args.census:
            for conv, n in census(table).items():
                print(f"{op} {conv} {n}", file=sys.stderr)
    text = "".join(chunks)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_bench(args) -> int:
    cfg = _resolve(args)
    sets = cfg.plugin_sets or [()]
    files = sorted(Path(args.directory).glob("*.cnf"))
    if not files:
        raise CliError(f"no .cnf files in {args.directory}")
    rows = []
    for f in files:
        for plugins in sets:
            try:
                res = _solve_file(str(f), plugins, cfg.solver_config())
                rows.append(_bench_row(f.name, plugins, res))
            except (CliError, ContractViolation, DimacsError, ValueError) as e:
                log.error("%s [%s]: %s", f.name, "+".join(plugins) or "none", e)
                row = {k: "" for k in BENCH_FIELDS}
                row.update(schema=CSV_VERSION, instance=f.name, config="+".join(plugins) or "none",
                           result="ERROR", solved=0)
                rows.append(row)
    out = cfg.csv or Path("bench.csv")
    _write_csv(out, BENCH_FIELDS, rows)
    print(f"{len(rows)} rows -> {out}")
    return 0


# ---------------------------------------------------------------- parser

def _budget_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--max-conflicts", type=int, help=f"conflict budget (default from ${BUDGET_ENV})")
    p.add_argument("--time-limit", type=float, help="wall-clock budget in seconds")
    p.add_argument("--seed", type=int, default=0, help="seed for every random choice (default 0)")
    p.add_argument("--csv", help="write statistics rows to this CSV file")


def _plugin_flag(p: argparse.ArgumentParser, example: str) -> None:
    p.add_argument("--plugins", action="append",
                   help=f"comma list or 'none'; repeat to compare configurations (e.g. {example})")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cdclcrypto", description="CDCL solving with cryptographic plugins")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", help="write an instance (.cnf, .varmap, .json)")
    p.add_argument("--kind", choices=("preimage", "afa", "collision"), required=True)
    p.add_argument("--fn", choices=("sha256", "sha1"), default="sha256")
    p.add_argument("--rounds", type=int, help="compression rounds (default: full, or the path's)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--free-bits", type=int, default=0, help="preimage: unknown message bits (default 0)")
    p.add_argument("--faults", type=int, default=16, help="afa: number of faulty digests (default 16)")
    p.add_argument("--fault-round", type=int, help="afa: faulted step (default rounds-8)")
    p.add_argument("--target", help="afa: faulted register or W (default E for sha256, A for sha1)")
    p.add_argument("--width", type=int, default=32, help="afa: fault width in bits (default 32)")
    p.add_argument("--path", help="collision: path file or built-in path name")
    p.add_argument("--adder-style", choices=CnfBuilder.ADDER_STYLES, default="compact")
    p.add_argument("-o", "--out", help="output stem (default derived from the options)")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("solve", help="solve a DIMACS instance")
    p.add_argument("instance", help=".cnf file or instance stem")
    _plugin_flag(p, "adder,hashcheck")
    p.add_argument("--model", action="store_true", help="print the model on SAT")
    p.add_argument("--stats", action="store_true", help="print solver statistics")
    _budget_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("afa", help="simulate faults and recover the secret state")
    p.add_argument("--fn", choices=("sha256", "sha1"), default="sha256")
    p.add_argument("--rounds", type=int)
    p.add_argument("--faults", type=int, default=16)
    p.add_argument("--fault-round", type=int)
    p.add_argument("--target")
    p.add_argument("--width", type=int, default=32)
    p.add_argument("--adder-style", choices=CnfBuilder.ADDER_STYLES, default="compact")
    _plugin_flag(p, "--plugins none --plugins adder,hashcheck")
    _budget_flags(p)
    p.set_defaults(func=cmd_afa)

    p = sub.add_parser("collide", help="search a collision that follows a differential path")
    p.add_argument("--path", required=True, help="path file or built-in path name")
    p.add_argument("--rounds", type=int)
    p.add_argument("--adder-style", choices=CnfBuilder.ADDER_STYLES, default="compact")
    _plugin_flag(p, "--plugins none --plugins gc")
    _budget_flags(p)
    p.set_defaults(func=cmd_collide, fn="sha256")

    p = sub.add_parser("rules", help="print rule tables for the bitwise functions")
    p.add_argument("--op", choices=list(OPS))
    p.add_argument("--mode", choices=list(MODES), default="generalized_16")
    p.add_argument("--census", action="store_true", help="report rule counts on stderr")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_rules)

    p = sub.add_parser("bench", help="solve every .cnf in a directory under each configuration")
    p.add_argument("directory")
    _plugin_flag(p, "--plugins none --plugins adder")
    _budget_flags(p)
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ContractViolation as e:
        print(f"error: extension contract violated: {e}", file=sys.stderr)
    except (CliError, BuilderError, PathError, DimacsError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
