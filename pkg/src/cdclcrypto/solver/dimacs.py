"""DIMACS CNF reading and writing.

Variables are 1-based signed integers on the outside, exactly as in the
file. The solver maps variable ``v`` to internal index ``v - 1``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, TextIO


class DimacsError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass
class CNF:
    num_vars: int = 0
    clauses: list[list[int]] = field(default_factory=list)
    comments: list[str] = field(default_factory=list)

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)


def parse_dimacs(source: str | TextIO | Iterable[str]) -> CNF:
    if isinstance(source, str):
        lines = source.splitlines()
    else:
        lines = source

    cnf = CNF()
    header: tuple[int, int] | None = None
    current: list[int] = []
    current_start = 0
    lineno = 0
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("c"):
            cnf.comments.append(line[1:].strip())
            continue
        if line.startswith("%"):
            # SATLIB end marker
            break
        if line.startswith("p"):
            if header is not None:
                raise DimacsError("duplicate problem line", lineno)
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise DimacsError(f"malformed header {line!r}", lineno)
            try:
                nv, nc = int(parts[2]), int(parts[3])
            except ValueError:
                raise DimacsError(f"malformed header {line!r}", lineno) from None
            if nv < 0 or nc < 0:
                raise DimacsError("negative counts in header", lineno)
            header = (nv, nc)
            cnf.num_vars = nv
            continue
        if header is None:
            raise DimacsError("clause before problem line", lineno)
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise DimacsError(f"bad literal {tok!r}", lineno) from None
            if lit == 0:
                cnf.clauses.append(current)
                current = []
                continue
            if abs(lit) > header[0]:
                raise DimacsError(
                    f"literal {lit} exceeds declared {header[0]} variable(s)", lineno)
            if not current:
                current_start = lineno
            current.append(lit)

    if header is None:
        raise DimacsError("missing problem line", lineno or None)
    if current:
        raise DimacsError("clause missing terminating 0", current_start)
    if len(cnf.clauses) != header[1]:
        raise DimacsError(
            f"header declares {header[1]} clauses, found {len(cnf.clauses)}", lineno)
    return cnf


def format_dimacs(num_vars: int, clauses: Iterable[Iterable[int]],
                  comments: Iterable[str] = ()) -> str:
    clauses = list(clauses)
    out = [f"c {c}" for c in comments]
    out.append(f"p cnf {num_vars} {len(clauses)}")
    out.extend(" ".join(map(str, cl)) + " 0" if cl else "0" for cl in clauses)
    return "\n".join(out) + "\n"
