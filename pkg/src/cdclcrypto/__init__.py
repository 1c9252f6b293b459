"""CDCL SAT solver with programmatic hooks, plus SHA cryptanalysis tooling."""

__version__ = "0.1.0"
