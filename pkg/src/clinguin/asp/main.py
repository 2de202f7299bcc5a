"""Command-line front of the bundled solver.

Accepts a clingo-compatible calling convention for the subset the bridge
uses: program files (or stdin), a positional model count, ``--enum-mode``,
``--outf=2``, ``--mode=gringo`` and ``--version``.
"""

from __future__ import annotations

import json
import sys

from .api import SOLVER_NAME, SOLVER_VERSION, SolverInputError, run_solver


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    files: list[str] = []
    max_models = 1
    enum_mode = "auto"
    ground_only = False
    for arg in argv:
        if arg == "--version":
            print(f"{SOLVER_NAME} version {SOLVER_VERSION}")
            return 0
        if arg.startswith("--enum-mode"):
            enum_mode = arg.split("=", 1)[1] if "=" in arg else "auto"
        elif arg.startswith("--mode"):
            ground_only = arg.split("=", 1)[-1] == "gringo"
        elif arg.startswith("--outf") or arg.startswith("--warn") or arg.startswith("--seed"):
            pass  # JSON output is the only format; warnings always go to stderr
        elif arg.lstrip("-").isdigit() and not arg.startswith("--"):
            max_models = int(arg)
        elif arg.startswith("--"):
            print(f"{SOLVER_NAME}: unknown option {arg}", file=sys.stderr)
            return 65
        else:
            files.append(arg)

    chunks = []
    for path in files:
        if path == "-":
            chunks.append(sys.stdin.read())
        else:
            try:
                with open(path, encoding="utf-8") as fh:
                    chunks.append(fh.read())
            except OSError as exc:
                print(f"{SOLVER_NAME}: cannot read {path}: {exc}", file=sys.stderr)
                return 65
    if not files:
        chunks.append(sys.stdin.read())

    try:
        result = run_solver(
            "\n".join(chunks),
            max_models=max_models,
            enum_mode=enum_mode,
            ground_only=ground_only,
        )
    except SolverInputError as exc:
        print(f"{SOLVER_NAME}: error: {exc}", file=sys.stderr)
        return 65
    for warning in result.warnings:
        print(f"{SOLVER_NAME}: {warning}", file=sys.stderr)
    if not ground_only:
        json.dump(result.payload, sys.stdout, indent=1)
        print()
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
