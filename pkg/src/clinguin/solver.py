"""Bridge to an ASP solver for grounding and solving under assumptions.

Three modes: model enumeration, cautious consequences (intersection of all
stable models) and brave consequences (union).  The bridge drives either an
external clingo-compatible executable via its JSON output format, or the
bundled ``miniasp`` solver; the bundled solver runs in-process by default
to avoid interpreter start-up per call, but produces the same JSON payload
so both paths share one outcome parser.

Assumptions are encoded as integrity constraints (``:- not a.`` / ``:- a.``),
which no supported command line exposes natively; on unsatisfiability the
full assumption set is therefore reported as a sound, possibly non-minimal
core.  Minimization happens above the bridge.
"""

from __future__ import annotations

import json
import os
import re
import shutil
import subprocess
import sys
from dataclasses import dataclass, field

from .asp.api import SOLVER_NAME, SOLVER_VERSION, SolverInputError, run_solver
from .terms import parse_term, render_term

BUNDLED = "bundled"
SOLVER_ENV_VAR = "CLINGUIN_SOLVER"
DEFAULT_TIMEOUT = 30.0


class SolverError(Exception):
    pass


class SolverUnavailable(SolverError):
    pass


class GroundingError(SolverError):
    """The solver rejected the program; message carries its diagnostics."""


class ProtocolError(SolverError):
    """Solver output could not be interpreted."""


@dataclass
class ProgramBundle:
    """Ordered ASP source parts, each tagged with an origin label."""

    parts: list = field(default_factory=list)  # of (label, text)

    def __post_init__(self):
        labels = [label for label, _ in self.parts]
        if len(labels) != len(set(labels)):
            raise ValueError(f"duplicate origin labels in {labels}")

    @classmethod
    def from_files(cls, paths) -> "ProgramBundle":
        parts = []
        for path in paths:
            with open(path, encoding="utf-8") as fh:
                parts.append((str(path), fh.read()))
        return cls(parts)

    def extended(self, label: str, text: str) -> "ProgramBundle":
        return ProgramBundle(self.parts + [(label, text)])

    def render(self) -> tuple[str, list]:
        """Concatenated source plus (start_line, label) offsets for mapping
        solver line numbers back to origins."""
        chunks, offsets = [], []
        line = 1
        for label, text in self.parts:
            header = f"%%% {label}\n"
            chunks.append(header + text if text.endswith("\n") or not text else header + text + "\n")
            offsets.append((line, label))
            line += chunks[-1].count("\n")
        return "".join(chunks), offsets

    @property
    def text(self) -> str:
        return self.render()[0]


@dataclass(frozen=True)
class SolveMode:
    kind: str  # models | cautious | brave
    max_models: int = 0  # models mode only; 0 = all

    def __post_init__(self):
        if self.kind not in ("models", "cautious", "brave"):
            raise ValueError(f"unknown solve mode {self.kind!r}")
        if self.max_models < 0:
            raise ValueError("max_models must be >= 0")


MODELS_ONE = SolveMode("models", 1)
MODELS_ALL = SolveMode("models", 0)
CAUTIOUS = SolveMode("cautious")
BRAVE = SolveMode("brave")


@dataclass
class SolveRequest:
    program: ProgramBundle
    assumptions: list = field(default_factory=list)  # of (Term, bool)
    mode: SolveMode = MODELS_ONE

    def __post_init__(self):
        truths: dict = {}
        for atom, truth in self.assumptions:
            if truths.setdefault(atom, truth) != truth:
                raise ValueError(f"atom {render_term(atom)} assumed both true and false")


@dataclass
class SolveOutcome:
    status: str  # sat | unsat
    models: list = field(default_factory=list)  # of frozenset[Term]
    core: frozenset = frozenset()  # unsat only
    diagnostics: str = ""


class SolverBridge:
    """Stateless apart from configuration; safe for concurrent solve calls."""

    def __init__(self, executable: str | None = None, timeout: float = DEFAULT_TIMEOUT,
                 force_subprocess: bool = False):
        self.executable = executable or os.environ.get(SOLVER_ENV_VAR) or _default_executable()
        self.timeout = timeout
        self.force_subprocess = force_subprocess

    @property
    def is_bundled(self) -> bool:
        return self.executable == BUNDLED

    # -- public operations -------------------------------------------------

    def solve(self, req: SolveRequest) -> SolveOutcome:
        bundle = req.program
        if req.assumptions:
            constraints = []
            for atom, truth in req.assumptions:
                rendered = render_term(atom)
                constraints.append(f":- not {rendered}." if truth else f":- {rendered}.")
            bundle = bundle.extended("<assumptions>", "\n".join(constraints) + "\n")
        text, offsets = bundle.render()
        args = _mode_args(req.mode)
        payload, warnings = self._invoke(text, offsets, args)
        return self._parse_outcome(payload, warnings, req)

    def check_syntax(self, program: ProgramBundle) -> list:
        """Ground without solving; returns diagnostics with origin labels."""
        text, offsets = program.render()
        try:
            _, warnings = self._invoke(text, offsets, ["--mode=gringo"])
        except GroundingError as exc:
            return [str(exc)]
        return warnings

    def solver_info(self) -> str:
        if self.is_bundled and not self.force_subprocess:
            return f"{SOLVER_NAME} version {SOLVER_VERSION}"
        exe = self._resolve_command()
        try:
            proc = subprocess.run(
                exe + ["--version"], capture_output=True, text=True, timeout=self.timeout
            )
        except FileNotFoundError as exc:
            raise SolverUnavailable(str(exc)) from exc
        out = (proc.stdout or proc.stderr).strip()
        if not out:
            raise ProtocolError("solver printed no version text")
        return out.splitlines()[0]

    # -- plumbing ----------------------------------------------------------

    def _resolve_command(self) -> list:
        if self.is_bundled:
            return [sys.executable, "-m", "clinguin.asp.main"]
        path = shutil.which(self.executable)
        if path is None:
            raise SolverUnavailable(f"solver executable {self.executable!r} not found")
        return [path]

    def _invoke(self, text: str, offsets, args: list) -> tuple[dict | None, list]:
        if self.is_bundled and not self.force_subprocess:
            return self._invoke_in_process(text, offsets, args)
        return self._invoke_subprocess(text, offsets, args)

    def _invoke_in_process(self, text: str, offsets, args: list):
        kwargs = _args_to_kwargs(args)
        try:
            result = run_solver(text, **kwargs)
        except SolverInputError as exc:
            raise GroundingError(_map_origins(str(exc), offsets)) from exc
        warnings = [_map_origins(w, offsets) for w in result.warnings]
        return (None if kwargs.get("ground_only") else result.payload), warnings

    def _invoke_subprocess(self, text: str, offsets, args: list):
        cmd = self._resolve_command() + ["-"] + args + ["--outf=2"]
        try:
            proc = subprocess.run(
                cmd, input=text, capture_output=True, text=True, timeout=self.timeout
            )
        except FileNotFoundError as exc:
            raise SolverUnavailable(str(exc)) from exc
        except subprocess.TimeoutExpired as exc:
            raise SolverError(f"solver timed out after {self.timeout}s") from exc
        warnings = [_map_origins(l, offsets) for l in proc.stderr.splitlines() if l.strip()]
        if "--mode=gringo" in args:
            if proc.returncode not in (0, 10, 20, 30):
                raise GroundingError("\n".join(warnings) or f"solver exited with {proc.returncode}")
            return None, warnings
        try:
            payload = json.loads(proc.stdout)
        except json.JSONDecodeError as exc:
            if proc.returncode not in (0, 10, 20, 30):
                raise GroundingError("\n".join(warnings) or f"solver exited with {proc.returncode}")
            raise ProtocolError(f"unparseable solver output: {exc}") from exc
        return payload, warnings

    def _parse_outcome(self, payload: dict, warnings: list, req: SolveRequest) -> SolveOutcome:
        diagnostics = "\n".join(warnings)
        result = payload.get("Result")
        if result == "UNSATISFIABLE":
            core = frozenset(atom for atom, _ in req.assumptions)
            return SolveOutcome(status="unsat", core=core, diagnostics=diagnostics)
        if result != "SATISFIABLE":
            raise ProtocolError(f"unexpected solver result {result!r}")
        witnesses = []
        for call in payload.get("Call", []):
            witnesses.extend(call.get("Witnesses", []))
        if not witnesses:
            raise ProtocolError("satisfiable result without witnesses")
        if req.mode.kind in ("cautious", "brave"):
            # consecutive witnesses are refinements; the last one is final
            witnesses = witnesses[-1:]
        models = [
            frozenset(parse_term(value) for value in w.get("Value", [])) for w in witnesses
        ]
        return SolveOutcome(status="sat", models=models, diagnostics=diagnostics)


def _default_executable() -> str:
    return "clingo" if shutil.which("clingo") else BUNDLED


def _mode_args(mode: SolveMode) -> list:
    if mode.kind == "models":
        return [str(mode.max_models)]
    return ["0", f"--enum-mode={mode.kind}"]


def _args_to_kwargs(args: list) -> dict:
    kwargs: dict = {}
    for arg in args:
        if arg.startswith("--enum-mode="):
            kwargs["enum_mode"] = arg.split("=", 1)[1]
        elif arg == "--mode=gringo":
            kwargs["ground_only"] = True
        elif arg.isdigit():
            kwargs["max_models"] = int(arg)
    return kwargs


_LINE_PATTERNS = [re.compile(r"(?<![\d:])(\d+):(\d+):"), re.compile(r"line (\d+)")]


def _map_origins(message: str, offsets) -> str:
    """Rewrite absolute line numbers in solver diagnostics to label:line."""

    def origin(line: int) -> str | None:
        best = None
        for start, label in offsets:
            if start <= line:
                best = (start, label)
        if best is None:
            return None
        return f"{best[1]}:{line - best[0]}"

    def repl_colon(m):
        mapped = origin(int(m.group(1)))
        return m.group(0) if mapped is None else f"{mapped}:{m.group(2)}:"

    def repl_line(m):
        mapped = origin(int(m.group(1)))
        return m.group(0) if mapped is None else f"{mapped}"

    message = _LINE_PATTERNS[0].sub(repl_colon, message)
    return _LINE_PATTERNS[1].sub(repl_line, message)
