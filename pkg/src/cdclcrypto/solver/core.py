"""CDCL solver with two watched literals, 1UIP learning and extension hooks.

Internal literal encoding: variable ``v`` (0-based) has positive literal
``2 * v`` and negative literal ``2 * v + 1``. DIMACS variable ``d`` maps to
``v = d - 1``. All public methods speak DIMACS.
"""
from __future__ import annotations

import enum
import gc
import heapq
import logging
import random
import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from ..programmatic import AssignmentView, ContractViolation, Extension, UsageError

log = logging.getLogger(__name__)

ORIGINAL, LEARNT, REASON, PCONFLICT = 0, 1, 2, 3


class Status(enum.Enum):
    SAT = "SAT"
    UNSAT = "UNSAT"
    INDETERMINATE = "INDETERMINATE"

    @property
    def exit_code(self) -> int:
        return {Status.SAT: 10, Status.UNSAT: 20, Status.INDETERMINATE: 30}[self]


class ModelError(AssertionError):
    """A SAT model failed verification. Always a solver bug."""


class Clause(list):
    """A clause of internal literal codes plus database metadata."""

    __slots__ = ("kind", "lbd", "activity", "deleted")

    def __init__(self, lits: Iterable[int], kind: int = ORIGINAL, lbd: int = 0):
        super().__init__(lits)
        self.kind = kind
        self.lbd = lbd
        self.activity = 0.0
        self.deleted = False

    __hash__ = object.__hash__

    def __eq__(self, other):
        return self is other

    def __ne__(self, other):
        return self is not other


def to_code(lit: int) -> int:
    return 2 * (lit - 1) if lit > 0 else 2 * (-lit - 1) + 1


def to_dimacs(code: int) -> int:
    v = (code >> 1) + 1
    return -v if code & 1 else v


def luby(i: int) -> int:
    """i-th element (0-based) of the Luby sequence 1 1 2 1 1 2 4 ..."""
    size, seq = 1, 0
    while size < i + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != i:
        size = (size - 1) >> 1
        seq -= 1
        i = i % size
    return 1 << seq


@dataclass
class SolverConfig:
    var_decay: float = 0.95
    var_bump: float = 1.0
    rescale_limit: float = 1e100
    clause_decay: float = 0.999
    restarts: bool = True
    restart_base: int = 100
    reduce_db: bool = True
    reduce_first: int = 2000
    reduce_inc: int = 300
    minimize: bool = True
    # call extension hooks at every k-th propagation fixpoint; full assignments always
    hook_interval: int = 1
    max_conflicts: int | None = None
    time_limit: float | None = None
    random_var_freq: float = 0.0
    seed: int = 0


@dataclass
class Stats:
    conflicts: int = 0
    decisions: int = 0
    propagations: int = 0
    restarts: int = 0
    learnt_clauses: int = 0
    deleted_clauses: int = 0
    reductions: int = 0
    reason_clauses_added: int = 0
    programmatic_conflicts: int = 0
    extension_calls: dict[str, int] = field(default_factory=dict)
    wall_seconds: float = 0.0

    def as_dict(self) -> dict[str, float | int]:
        out: dict[str, float | int] = {
            "conflicts": self.conflicts,
            "decisions": self.decisions,
            "propagations": self.propagations,
            "restarts": self.restarts,
            "learnt_clauses": self.learnt_clauses,
            "deleted_clauses": self.deleted_clauses,
            "reductions": self.reductions,
            "reason_clauses_added": self.reason_clauses_added,
            "programmatic_conflicts": self.programmatic_conflicts,
        }
        for name, n in sorted(self.extension_calls.items()):
            out[f"extension_calls.{name}"] = n
        out["wall_seconds"] = round(self.wall_seconds, 6)
        return out

    def format(self) -> str:
        return "\n".join(f"{k}={v}" for k, v in self.as_dict().items())


@dataclass
class SolveResult:
    status: Status
    model: tuple[bool, ...] | None = None
    stats: Stats | None = None

    @property
    def sat(self) -> bool:
        return self.status is Status.SAT

    @property
    def unsat(self) -> bool:
        return self.status is Status.UNSAT

    def value(self, var: int) -> bool:
        if self.model is None:
            raise ValueError(f"no model ({self.status.value})")
        return self.model[var - 1]

    def lit_true(self, lit: int) -> bool:
        return self.value(abs(lit)) == (lit > 0)

    def literals(self) -> list[int]:
        if self.model is None:
            return []
        return [i + 1 if b else -(i + 1) for i, b in enumerate(self.model)]


class _Indeterminate(Exception):
    pass


class Solver:
    """Conflict-driven clause-learning SAT solver.

    >>> s = Solver(2, [[1, 2], [-1], [-2]])
    >>> s.solve().status
    <Status.UNSAT: 'UNSAT'>
    """

    def __init__(self, num_vars: int = 0, clauses: Iterable[Sequence[int]] = (),
                 config: SolverConfig | None = None, varmap=None):
        self.config = config or SolverConfig()
        self.stats = Stats()
        self.varmap = varmap
        self.num_vars = 0
        self._val: list[int] = []
        self._level: list[int] = []
        self._reason: list[Clause | None] = []
        self._activity: list[float] = []
        self._phase: list[bool] = []
        self._seen: list[bool] = []
        self._watches: list[list[Clause]] = []
        self._bins: list[list[tuple[int, Clause]]] = []
        self._trail: list[int] = []
        self._trail_lim: list[int] = []
        self._qhead = 0
        self._heap: list[tuple[float, int]] = []
        self._var_inc = self.config.var_bump
        self._cla_inc = 1.0
        self._learnts: list[Clause] = []
        self._original: list[list[int]] = []
        self._unsat = False
        self._exts: list[Extension] = []
        self._views: list[AssignmentView] = []
        self._ext_marks: list[int] = []
        self._fixpoints = 0
        self._started = False
        self._max_learnts = float(self.config.reduce_first)
        self._rng = random.Random(self.config.seed)
        self._deadline: float | None = None
        self._assumptions: list[int] = []
        self.new_vars(num_vars)
        self.add_clauses(clauses)

    # ------------------------------------------------------------------ setup

    def new_vars(self, n: int) -> None:
        for _ in range(n):
            v = self.num_vars
            self.num_vars += 1
            self._val += (0, 0)
            self._level.append(0)
            self._reason.append(None)
            self._activity.append(0.0)
            self._phase.append(False)
            self._seen.append(False)
            self._watches += ([], [])
            self._bins += ([], [])
            heapq.heappush(self._heap, (-0.0, v))

    def add_clause(self, lits: Sequence[int]) -> bool:
        """Add an original clause (DIMACS literals). Returns False once UNSAT."""
        if self._trail_lim:
            self._cancel_until(0)
        lits = list(lits)
        if 0 in lits:
            raise ValueError("0 is not a literal")
        top = max(lits, key=abs, default=0)
        if abs(top) > self.num_vars:
            self.new_vars(abs(top) - self.num_vars)
        self._original.append(lits)
        if self._unsat:
            return False
        codes: list[int] = []
        val = self._val
        for lit in lits:
            c = 2 * lit - 2 if lit > 0 else -2 * lit - 1
            vc = val[c]
            if vc == 1 or c ^ 1 in codes:
                return True  # satisfied at level 0 or tautology
            if vc == -1 or c in codes:
                continue
            codes.append(c)
        if not codes:
            self._unsat = True
            return False
        if len(codes) == 1:
            self._assign(codes[0], None)
            if self._propagate() is not None:
                self._unsat = True
                return False
            return True
        self._attach(Clause(codes, ORIGINAL))
        return True

    def add_clauses(self, clauses: Iterable[Sequence[int]]) -> bool:
        """Bulk :meth:`add_clause`; level-0 propagation runs once at the end."""
        enabled = gc.isenabled()
        gc.disable()  # collector passes dominate when loading many small lists
        try:
            return self._add_clauses(clauses)
        finally:
            if enabled:
                gc.enable()

    def _add_clauses(self, clauses: Iterable[Sequence[int]]) -> bool:
        if self._trail_lim:
            self._cancel_until(0)
        clauses = [list(cl) for cl in clauses]
        top = max((abs(l) for cl in clauses for l in cl), default=0)
        if top > self.num_vars:
            self.new_vars(top - self.num_vars)
        if any(0 in cl for cl in clauses):
            raise ValueError("0 is not a literal")
        self._original.extend(clauses)
        if self._unsat:
            return False
        val = self._val
        bins, watches = self._bins, self._watches
        for lits in clauses:
            codes: list[int] = []
            for lit in lits:
                c = 2 * lit - 2 if lit > 0 else -2 * lit - 1
                vc = val[c]
                if vc == 1 or c ^ 1 in codes:
                    break
                if vc == -1 or c in codes:
                    continue
                codes.append(c)
            else:
                n = len(codes)
                if n == 0:
                    self._unsat = True
                    return False
                if n == 1:
                    self._assign(codes[0], None)
                elif n == 2:
                    cl = Clause(codes, ORIGINAL)
                    bins[codes[0]].append((codes[1], cl))
                    bins[codes[1]].append((codes[0], cl))
                else:
                    cl = Clause(codes, ORIGINAL)
                    watches[codes[0]].append(cl)
                    watches[codes[1]].append(cl)
        if self._propagate() is not None:
            self._unsat = True
            return False
        return True

    def register_extension(self, ext: Extension) -> int:
        if self._started:
            raise UsageError("extensions must be registered before solve() is called")
        handle = len(self._exts)
        self._exts.append(ext)
        # one mark per hook so each sees its own stream of new literals
        self._views.append(AssignmentView(self, 2 * handle, self.varmap))
        self._views.append(AssignmentView(self, 2 * handle + 1, self.varmap))
        self._ext_marks += (0, 0)
        self.stats.extension_calls.setdefault(ext.name, 0)
        return handle

    @property
    def extensions(self) -> tuple[Extension, ...]:
        return tuple(self._exts)

    # --------------------------------------------------------------- trail

    def _assign(self, lit: int, reason: Clause | None) -> None:
        v = lit >> 1
        self._val[lit] = 1
        self._val[lit ^ 1] = -1
        self._level[v] = len(self._trail_lim)
        self._reason[v] = reason
        self._trail.append(lit)

    def _cancel_until(self, lvl: int) -> None:
        if len(self._trail_lim) <= lvl:
            return
        trail = self._trail
        val = self._val
        phase = self._phase
        reason = self._reason
        act = self._activity
        heap = self._heap
        push = heapq.heappush
        stop = self._trail_lim[lvl]
        for i in range(len(trail) - 1, stop - 1, -1):
            lit = trail[i]
            v = lit >> 1
            val[lit] = 0
            val[lit ^ 1] = 0
            phase[v] = not lit & 1
            reason[v] = None
            push(heap, (-act[v], v))
        del trail[stop:]
        del self._trail_lim[lvl:]
        self._qhead = stop
        marks = self._ext_marks
        for i, m in enumerate(marks):
            if m > stop:
                marks[i] = stop
        if len(heap) > 8 * self.num_vars + 64:
            self._rebuild_heap()

    def _rebuild_heap(self) -> None:
        val, act = self._val, self._activity
        self._heap = [(-act[v], v) for v in range(self.num_vars) if val[2 * v] == 0]
        heapq.heapify(self._heap)

    # --------------------------------------------------------- propagation

    def _propagate(self) -> Clause | None:
        """Two-watched-literal BCP to fixpoint. Returns a falsified clause or None."""
        trail = self._trail
        val = self._val
        watches = self._watches
        bins = self._bins
        level = self._level
        reason = self._reason
        dl = len(self._trail_lim)
        qhead = self._qhead
        confl = None
        while qhead < len(trail):
            fl = trail[qhead] ^ 1
            qhead += 1
            for other, c in bins[fl]:
                vo = val[other]
                if vo == 1:
                    continue
                if vo == -1:
                    confl = c
                    break
                val[other] = 1
                val[other ^ 1] = -1
                level[other >> 1] = dl
                reason[other >> 1] = c
                trail.append(other)
            if confl is not None:
                break
            ws = watches[fl]
            n = len(ws)
            i = j = 0
            while i < n:
                c = ws[i]
                i += 1
                first = c[0]
                if first == fl:
                    first = c[1]
                    c[0] = first
                    c[1] = fl
                if val[first] == 1:
                    ws[j] = c
                    j += 1
                    continue
                for k in range(2, len(c)):
                    lk = c[k]
                    if val[lk] != -1:
                        c[1] = lk
                        c[k] = fl
                        watches[lk].append(c)
                        break
                else:
                    ws[j] = c
                    j += 1
                    if val[first] == -1:
                        confl = c
                        while i < n:
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                    else:
                        val[first] = 1
                        val[first ^ 1] = -1
                        level[first >> 1] = dl
                        reason[first >> 1] = c
                        trail.append(first)
            del ws[j:]
            if confl is not None:
                break
        self.stats.propagations += qhead - self._qhead
        self._qhead = qhead if confl is None else len(trail)
        return confl

    def _attach(self, c: Clause) -> None:
        """Watch a clause of length >= 2 on its first two literals."""
        if len(c) == 2:
            self._bins[c[0]].append((c[1], c))
            self._bins[c[1]].append((c[0], c))
        else:
            self._watches[c[0]].append(c)
            self._watches[c[1]].append(c)

    def _order_for_watch(self, c: Clause) -> None:
        """Move the two best watch candidates to the front.

        Non-false literals first, then false literals by decreasing level, so
        the watch invariant survives any later backjump.
        """
        val, level = self._val, self._level
        c.sort(key=lambda l: (val[l] == -1, -level[l >> 1] if val[l] == -1 else 0))

    # ----------------------------------------------------- hooks interleave

    def _propagate_all(self) -> Clause | None:
        """Unit propagation interleaved with programmatic propagation/checks."""
        exts = self._exts
        while True:
            confl = self._propagate()
            if confl is not None or not exts:
                return confl
            self._fixpoints += 1
            full = len(self._trail) == self.num_vars
            if not full and self._fixpoints % self.config.hook_interval:
                return None
            calls = self.stats.extension_calls
            added = False
            for i, ext in enumerate(exts):
                calls[ext.name] += 1
                out = ext.on_propagate(self._views[2 * i])
                self._ext_marks[2 * i] = len(self._trail)
                out = [list(cl) for cl in out] if out else []
                if out:
                    confl = self._add_reasons(ext, out)
                    if confl is not None:
                        return confl
                    added = True
                    break
            if added:
                continue
            for i, ext in enumerate(exts):
                out = ext.on_check(self._views[2 * i + 1])
                self._ext_marks[2 * i + 1] = len(self._trail)
                out = [list(cl) for cl in out] if out else []
                if out:
                    return self._add_conflicts(ext, out)
            return None

    def _codes(self, ext: Extension, lits: Sequence[int]) -> list[int]:
        n = self.num_vars
        try:
            out = [2 * l - 2 if 0 < l <= n else -2 * l - 1 if -n <= l < 0 else -1 for l in lits]
        except TypeError:
            raise ContractViolation(ext.name, "clause literals must be integers", lits) from None
        if -1 in out:
            bad = next(l for l in lits if l == 0 or abs(l) > n)
            raise ContractViolation(ext.name, f"unknown literal {bad}", lits)
        uniq = set(out)
        if len(uniq) != len(out):
            out = list(dict.fromkeys(out))
        for c in out:
            if c ^ 1 in uniq:
                raise ContractViolation(ext.name, "clause contains a literal and its negation", lits)
        return out

    def _add_reasons(self, ext: Extension, clauses: list[list[int]]) -> Clause | None:
        val, level = self._val, self._level
        staged: list[tuple[Clause, int]] = []
        conflicts: list[Clause] = []
        for lits in clauses:
            codes = self._codes(ext, lits)
            free = [c for c in codes if val[c] == 0]
            if any(val[c] == 1 for c in codes) or len(free) > 1:
                raise ContractViolation(
                    ext.name, "reason clause must have all literals false but one unassigned", lits)
            cl = Clause(codes, REASON)
            if free:
                cl.remove(free[0])
                cl.insert(0, free[0])
                m = max((level[c >> 1] for c in cl[1:]), default=0)
                staged.append((cl, m))
            else:
                conflicts.append(cl)
        self.stats.reason_clauses_added += len(clauses)
        if conflicts:
            for cl, _ in staged:
                self._store(cl)
            for cl in conflicts:
                self._store(cl)
            return conflicts[0]
        target = min(m for _, m in staged)
        self._cancel_until(target)
        for cl, _ in staged:
            self._store(cl)
            free = [c for c in cl if val[c] != -1]
            if not free:
                return cl
            if len(free) == 1 and val[free[0]] == 0:
                self._assign(free[0], cl)
        return None

    def _add_conflicts(self, ext: Extension, clauses: list[list[int]]) -> Clause:
        val = self._val
        stored = []
        for lits in clauses:
            codes = self._codes(ext, lits)
            if any(val[c] != -1 for c in codes):
                raise ContractViolation(ext.name, "conflict clause is not falsified", lits)
            cl = Clause(codes, PCONFLICT)
            self._store(cl)
            stored.append(cl)
        self.stats.programmatic_conflicts += len(stored)
        return stored[0]

    def _store(self, cl: Clause) -> None:
        """Add an extension clause to the database with safe watches."""
        if len(cl) == 0:
            return
        if len(cl) == 1:
            # unit facts hold at level 0; nothing to watch
            return
        if cl.kind == REASON and self._val[cl[0]] == 0:
            head = cl[0]
            rest = Clause(cl[1:])
            self._order_for_watch(rest)
            cl[1:] = rest
            cl[0] = head
        else:
            self._order_for_watch(cl)
        cl.lbd = len({self._level[c >> 1] for c in cl})
        if len(cl) > 2:
            self._learnts.append(cl)
        self._attach(cl)

    # ------------------------------------------------------------ analysis

    def _analyze(self, confl: Sequence[int]) -> tuple[list[int], int]:
        seen = self._seen
        level = self._level
        reason = self._reason
        trail = self._trail
        dl = len(self._trail_lim)
        learnt: list[int] = [0]
        toclear: list[int] = []
        path_c = 0
        p = -1
        index = len(trail) - 1
        c = confl
        while True:
            if isinstance(c, Clause) and c.kind != ORIGINAL:
                self._bump_clause(c)
            for q in c:
                if q == p:
                    continue
                v = q >> 1
                if not seen[v] and level[v] > 0:
                    self._bump_var(v)
                    seen[v] = True
                    toclear.append(q)
                    if level[v] >= dl:
                        path_c += 1
                    else:
                        learnt.append(q)
            while not seen[trail[index] >> 1]:
                index -= 1
            p = trail[index]
            index -= 1
            c = reason[p >> 1]
            seen[p >> 1] = False
            path_c -= 1
            if path_c <= 0:
                break
        learnt[0] = p ^ 1

        if self.config.minimize and len(learnt) > 1:
            abstract = 0
            for q in learnt[1:]:
                abstract |= 1 << (level[q >> 1] & 31)
            kept = [learnt[0]]
            for q in learnt[1:]:
                if reason[q >> 1] is None or not self._redundant(q, abstract, toclear):
                    kept.append(q)
            learnt = kept
        for q in toclear:
            seen[q >> 1] = False

        if len(learnt) == 1:
            return learnt, 0
        best = 1
        for k in range(2, len(learnt)):
            if level[learnt[k] >> 1] > level[learnt[best] >> 1]:
                best = k
        learnt[1], learnt[best] = learnt[best], learnt[1]
        return learnt, level[learnt[1] >> 1]

    def _redundant(self, p: int, abstract: int, toclear: list[int]) -> bool:
        seen, level, reason = self._seen, self._level, self._reason
        stack = [p]
        top = len(toclear)
        while stack:
            q = stack.pop()
            qv = q >> 1
            for l in reason[qv]:
                v = l >> 1
                if v == qv or seen[v] or level[v] == 0:
                    continue
                if reason[v] is not None and (1 << (level[v] & 31)) & abstract:
                    seen[v] = True
                    stack.append(l)
                    toclear.append(l)
                else:
                    for l2 in toclear[top:]:
                        seen[l2 >> 1] = False
                    del toclear[top:]
                    return False
        return True

    def _bump_var(self, v: int) -> None:
        act = self._activity
        act[v] += self._var_inc
        if act[v] > self.config.rescale_limit:
            for i in range(self.num_vars):
                act[i] *= 1e-100
            self._var_inc *= 1e-100
            self._rebuild_heap()
        elif self._val[2 * v] == 0:
            heapq.heappush(self._heap, (-act[v], v))

    def _bump_clause(self, c: Clause) -> None:
        c.activity += self._cla_inc
        if c.activity > 1e20:
            for cl in self._learnts:
                cl.activity *= 1e-20
            self._cla_inc *= 1e-20

    def _learn(self, learnt: list[int]) -> None:
        self.stats.learnt_clauses += 1
        if len(learnt) == 1:
            self._assign(learnt[0], None)
            return
        level = self._level
        cl = Clause(learnt, LEARNT, len({level[q >> 1] for q in learnt}))
        if len(cl) > 2:
            self._learnts.append(cl)
            self._bump_clause(cl)
        self._attach(cl)
        self._assign(learnt[0], cl)

    # ------------------------------------------------------------ decisions

    def _pick_branch(self) -> int | None:
        val = self._val
        if self.config.random_var_freq and self._rng.random() < self.config.random_var_freq:
            free = [v for v in range(self.num_vars) if val[2 * v] == 0]
            if free:
                v = self._rng.choice(free)
                return 2 * v + (0 if self._phase[v] else 1)
        heap = self._heap
        act = self._activity
        pop = heapq.heappop
        while heap:
            a, v = pop(heap)
            if val[2 * v] == 0 and -a == act[v]:
                return 2 * v + (0 if self._phase[v] else 1)
        # stale heap: fall back to a rebuild once
        self._rebuild_heap()
        if self._heap:
            a, v = pop(self._heap)
            return 2 * v + (0 if self._phase[v] else 1)
        return None

    # ----------------------------------------------------- clause deletion

    def _locked(self, c: Clause) -> bool:
        return self._reason[c[0] >> 1] is c and self._val[c[0]] == 1

    def reduce_clause_db(self) -> int:
        """Delete the worse half of the deletable learnt/reason clauses."""
        live = [c for c in self._learnts if not c.deleted]
        deletable = [c for c in live if len(c) > 2 and c.lbd > 2 and not self._locked(c)]
        deletable.sort(key=lambda c: (-c.lbd, c.activity))
        doomed = deletable[: len(deletable) // 2]
        for c in doomed:
            c.deleted = True
        if doomed:
            for ws in self._watches:
                if ws:
                    ws[:] = [c for c in ws if not c.deleted]
        self._learnts = [c for c in live if not c.deleted]
        self.stats.deleted_clauses += len(doomed)
        self.stats.reductions += 1
        return len(doomed)

    def forget_reason_clauses(self) -> int:
        """Drop every stored extension reason clause (length > 2).

        They are implied by the extensions, so this never changes a verdict;
        it keeps repeated :meth:`solve` calls under different assumptions from
        dragging along clauses that only mattered for earlier calls.
        """
        doomed = [c for c in self._learnts if c.kind == REASON and not c.deleted and not self._locked(c)]
        for c in doomed:
            c.deleted = True
        if doomed:
            for ws in self._watches:
                if ws:
                    ws[:] = [c for c in ws if not c.deleted]
        self._learnts = [c for c in self._learnts if not c.deleted]
        self.stats.deleted_clauses += len(doomed)
        return len(doomed)

    # ---------------------------------------------------------------- solve

    def solve(self, assumptions: Sequence[int] = ()) -> SolveResult:
        """Search for a model.

        ``assumptions`` are DIMACS literals held true for this call only; they
        are all placed on decision level 1. UNSAT then means UNSAT under the
        assumptions, and the clause database stays usable for later calls.
        """
        self._started = True
        self._assumptions = [to_code(l) for l in assumptions]
        t0 = time.perf_counter()
        limit = self.config.time_limit
        self._deadline = t0 + limit if limit is not None else None
        try:
            status = self._solve()
        finally:
            self.stats.wall_seconds += time.perf_counter() - t0
        model = None
        if status is Status.SAT:
            model = tuple(self._val[2 * v] == 1 for v in range(self.num_vars))
            self._verify(model)
        self._cancel_until(0)
        return SolveResult(status, model, self.stats)

    def _solve(self) -> Status:
        if self._unsat:
            return Status.UNSAT
        self._cancel_until(0)
        cfg = self.config
        i = 0
        while True:
            budget = luby(i) * cfg.restart_base if cfg.restarts else None
            try:
                status = self._search(budget)
            except _Indeterminate:
                return Status.INDETERMINATE
            if status is not None:
                return status
            i += 1
            self.stats.restarts += 1

    def _search(self, budget: int | None) -> Status | None:
        stats = self.stats
        cfg = self.config
        local = 0
        steps = 0
        while True:
            confl = self._propagate_all()
            if confl is not None:
                stats.conflicts += 1
                local += 1
                lvl = max((self._level[c >> 1] for c in confl), default=0)
                if lvl == 0:
                    self._unsat = True
                    return Status.UNSAT
                if lvl == 1 and self._assumptions:
                    self._cancel_until(0)
                    return Status.UNSAT
                self._cancel_until(lvl)
                learnt, bj = self._analyze(confl)
                self._cancel_until(bj)
                self._learn(learnt)
                self._var_inc /= cfg.var_decay
                self._cla_inc /= cfg.clause_decay
                if cfg.max_conflicts is not None and stats.conflicts >= cfg.max_conflicts:
                    raise _Indeterminate
                if self._deadline is not None and time.perf_counter() > self._deadline:
                    raise _Indeterminate
                continue

            if budget is not None and local >= budget:
                self._cancel_until(0)
                return None
            if cfg.reduce_db and len(self._learnts) >= self._max_learnts:
                self.reduce_clause_db()
                self._max_learnts += cfg.reduce_inc
            if self._assumptions and not self._trail_lim:
                if not self._enqueue_assumptions():
                    return Status.UNSAT
                continue
            steps += 1
            if self._deadline is not None and not steps & 255 \
                    and time.perf_counter() > self._deadline:
                raise _Indeterminate
            lit = self._pick_branch()
            if lit is None:
                return Status.SAT
            stats.decisions += 1
            self._trail_lim.append(len(self._trail))
            self._assign(lit, None)

    def _enqueue_assumptions(self) -> bool:
        val = self._val
        if any(val[c] == -1 for c in self._assumptions):
            return False
        self._trail_lim.append(len(self._trail))
        for c in self._assumptions:
            if val[c] == 0:
                self._assign(c, None)
        return True

    def _verify(self, model: tuple[bool, ...]) -> None:
        true_lits = {v + 1 if b else -(v + 1) for v, b in enumerate(model)}
        disjoint = true_lits.isdisjoint
        for cl in self._original:
            if disjoint(cl):
                raise ModelError(f"model falsifies input clause {cl}")

    # ------------------------------------------------- step-wise public API

    def value(self, var: int) -> bool | None:
        v = self._val[2 * (var - 1)]
        return None if v == 0 else v > 0

    def level(self, var: int) -> int | None:
        if self._val[2 * (var - 1)] == 0:
            return None
        return self._level[var - 1]

    def reason(self, var: int) -> list[int] | None:
        r = self._reason[var - 1]
        return None if r is None else [to_dimacs(c) for c in r]

    @property
    def decision_level(self) -> int:
        return len(self._trail_lim)

    def trail(self) -> list[tuple[int, int, list[int] | None]]:
        """(literal, level, reason) triples in assignment order."""
        out = []
        for c in self._trail:
            v = c >> 1
            r = self._reason[v]
            out.append((to_dimacs(c), self._level[v],
                        None if r is None else [to_dimacs(x) for x in r]))
        return out

    def assume(self, lit: int) -> None:
        """Open a new decision level and assign ``lit`` as its decision."""
        if self._val[to_code(lit)] != 0:
            raise UsageError(f"literal {lit} already assigned")
        self._trail_lim.append(len(self._trail))
        self._assign(to_code(lit), None)

    def decide(self) -> int | None:
        """Pick and assign the next branching literal (VSIDS + phase saving)."""
        lit = self._pick_branch()
        if lit is None:
            return None
        self.stats.decisions += 1
        self._trail_lim.append(len(self._trail))
        self._assign(lit, None)
        return to_dimacs(lit)

    def propagate_units(self) -> list[int] | None:
        c = self._propagate()
        return None if c is None else [to_dimacs(x) for x in c]

    def propagation_loop(self) -> list[int] | None:
        c = self._propagate_all()
        return None if c is None else [to_dimacs(x) for x in c]

    def analyze_conflict(self, conflict: Sequence[int]) -> tuple[list[int], int]:
        codes = [to_code(l) for l in conflict]
        learnt, bj = self._analyze(codes)
        return [to_dimacs(c) for c in learnt], bj

    def backjump(self, level: int) -> None:
        self._cancel_until(level)

    def bump(self, var: int) -> None:
        self._bump_var(var - 1)

    def learnt_clauses(self) -> list[list[int]]:
        return [[to_dimacs(c) for c in cl] for cl in self._learnts if not cl.deleted]


def solve(num_vars: int, clauses: Iterable[Sequence[int]],
          extensions: Iterable[Extension] = (), config: SolverConfig | None = None,
          varmap=None) -> SolveResult:
    s = Solver(num_vars, clauses, config, varmap)
    for ext in extensions:
        s.register_extension(ext)
    return s.solve()
