"""Programmatic entry point shared by the CLI and the in-process bridge."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..terms import render_term
from .ground import GroundingError, ground_program
from .solve import consequences, enumerate_models
from .syntax import ProgramSyntaxError, parse_program

SOLVER_NAME = "miniasp"
SOLVER_VERSION = "1.0.0"


class SolverInputError(ValueError):
    """Syntax or grounding failure; message carries location details."""


@dataclass
class SolverResult:
    payload: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)
    exit_code: int = 0


def run_solver(
    program_text: str,
    max_models: int = 1,
    enum_mode: str = "auto",
    functions: dict | None = None,
    ground_only: bool = False,
) -> SolverResult:
    """Ground and solve; mirrors the external solver's JSON output contract.

    ``max_models`` 0 means all models; ``enum_mode`` is one of ``auto``
    (model enumeration), ``cautious`` or ``brave``.
    """
    try:
        program = parse_program(program_text)
        ground = ground_program(program, functions)
    except (ProgramSyntaxError, GroundingError) as exc:
        raise SolverInputError(str(exc)) from exc

    result = SolverResult(warnings=list(ground.warnings))
    if ground_only:
        result.payload = {"Solver": f"{SOLVER_NAME} version {SOLVER_VERSION}", "Result": "GROUNDED"}
        return result

    if enum_mode in ("cautious", "brave"):
        conseq = consequences(ground, enum_mode)
        if conseq is None:
            witnesses = []
            status = "UNSATISFIABLE"
            number = 0
        else:
            witnesses = [{"Value": [render_term(a) for a in conseq]}]
            status = "SATISFIABLE"
            number = 1
        exhausted = True
    else:
        models, exhausted = enumerate_models(ground, max_models)
        witnesses = [{"Value": [render_term(a) for a in m]} for m in models]
        status = "SATISFIABLE" if models else "UNSATISFIABLE"
        number = len(models)

    result.payload = {
        "Solver": f"{SOLVER_NAME} version {SOLVER_VERSION}",
        "Result": status,
        "Call": [{"Witnesses": witnesses}],
        "Models": {"Number": number, "More": "no" if exhausted else "yes"},
    }
    if status == "UNSATISFIABLE":
        result.exit_code = 20
    else:
        result.exit_code = 30 if exhausted else 10
    return result
