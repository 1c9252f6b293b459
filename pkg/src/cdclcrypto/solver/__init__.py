from .core import (Clause, ModelError, SolveResult, Solver, SolverConfig, Stats, Status,
                   luby, solve)
from .dimacs import CNF, DimacsError, format_dimacs, parse_dimacs

__all__ = [
    "CNF", "Clause", "DimacsError", "ModelError", "SolveResult", "Solver", "SolverConfig",
    "Stats", "Status", "format_dimacs", "luby", "parse_dimacs", "solve",
]
