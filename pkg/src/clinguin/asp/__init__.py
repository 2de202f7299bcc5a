"""Bundled fallback ASP solver.

Grounds and solves the language subset used by the shipped encodings:
normal rules, integrity constraints, choice rules with optional condition
literals, comparison builtins, ``#external`` / ``#defined`` directives and
``@``-function calls in rule heads.  Speaks a clingo-style JSON output
format so the solver bridge can drive it exactly like an external solver.
"""

from .api import SolverInputError, run_solver
