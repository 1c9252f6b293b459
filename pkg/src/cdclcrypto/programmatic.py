"""Programmatic propagation and conflict-analysis hooks.

An :class:`Extension` is a pair of callbacks the solver invokes at every
unit-propagation fixpoint:

* ``on_propagate(view)`` returns *reason clauses*. Each is a list of DIMACS
  literals in which exactly one literal is unassigned and every other literal
  is false, i.e. the clause encodes ``alpha -> L``. A clause whose literals are
  all false is accepted and treated as a conflict.
* ``on_check(view)`` is called once propagation (unit plus programmatic)
  reaches a fixpoint. It returns *conflict clauses*, each falsified by the
  current assignment.

Clauses use external (1-based, signed) variable numbering.
"""
from __future__ import annotations

from typing import TYPE_CHECKING, Callable, Iterable, Sequence

if TYPE_CHECKING:
    from .solver.core import Solver


class UsageError(RuntimeError):
    """Solver API used out of order."""


class ContractViolation(RuntimeError):
    """An extension returned a clause that breaks the hook contract."""

    def __init__(self, extension: str, message: str, clause: Sequence[int] = ()):
        self.extension = extension
        self.clause = list(clause)
        super().__init__(f"extension {extension!r}: {message}: {self.clause}")


ClauseList = list[list[int]]


class Extension:
    """Base class for solver extensions.

    Subclass and override the hooks, or pass plain callables.
    """

    name = "extension"

    def __init__(self, name: str | None = None,
                 on_propagate: Callable[["AssignmentView"], Iterable[Sequence[int]]] | None = None,
                 on_check: Callable[["AssignmentView"], Iterable[Sequence[int]]] | None = None):
        if name is not None:
            self.name = name
        if on_propagate is not None:
            self.on_propagate = on_propagate  # type: ignore[method-assign]
        if on_check is not None:
            self.on_check = on_check  # type: ignore[method-assign]

    def on_propagate(self, view: "AssignmentView") -> Iterable[Sequence[int]]:
        return ()

    def on_check(self, view: "AssignmentView") -> Iterable[Sequence[int]]:
        return ()

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name!r}>"


class AssignmentView:
    """Read-only window onto the solver trail for one extension."""

    __slots__ = ("_solver", "_handle", "varmap")

    def __init__(self, solver: "Solver", handle: int, varmap=None):
        self._solver = solver
        self._handle = handle
        self.varmap = varmap

    def value_of(self, var: int) -> bool | None:
        v = self._solver._val[2 * (var - 1)]
        if v == 0:
            return None
        return v > 0

    def lit_value(self, lit: int) -> bool | None:
        """Value of a signed DIMACS literal."""
        code = 2 * (lit - 1) if lit > 0 else 2 * (-lit - 1) + 1
        v = self._solver._val[code]
        if v == 0:
            return None
        return v > 0

    def level_of(self, var: int) -> int | None:
        s = self._solver
        if s._val[2 * (var - 1)] == 0:
            return None
        return s._level[var - 1]

    @property
    def decision_level(self) -> int:
        return len(self._solver._trail_lim)

    @property
    def num_vars(self) -> int:
        return self._solver.num_vars

    @property
    def num_assigned(self) -> int:
        return len(self._solver._trail)

    def trail(self) -> list[int]:
        """Assigned literals in assignment order (DIMACS form)."""
        return [(c >> 1) + 1 if not c & 1 else -((c >> 1) + 1) for c in self._solver._trail]

    def new_literals(self) -> list[int]:
        """Literals assigned since this extension's previous hook call.

        After a backjump this restarts from the lowest trail position reached
        since then, so every currently-assigned literal is reported at least
        once after it was (re)assigned.
        """
        s = self._solver
        start = s._ext_marks[self._handle]
        return [(c >> 1) + 1 if not c & 1 else -((c >> 1) + 1) for c in s._trail[start:]]
