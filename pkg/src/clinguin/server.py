"""HTTP surface: GET /ui, POST /operation, GET /health.

A single global session serves all requests.  Mutations funnel through one
lock, so each POSTed operation tuple is applied without interleaving; the
UI JSON is cached per session revision, which keeps repeated GETs
byte-identical and free of solver calls.
"""

from __future__ import annotations

import logging
import threading
import time
from dataclasses import dataclass, field

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response

from . import domain as domain_mod
from .backends import get_backend
from .domain import DomainSession, snapshot_facts
from .solver import GroundingError, ProgramBundle, SolverBridge, SolverError, SolverUnavailable
from .terms import (
    Constant,
    Function,
    Number,
    QuotedString,
    Term,
    TermSyntaxError,
    TupleTerm,
    parse_term,
    render_term,
)
from .ui import assemble_tree, build_ui_atoms, serialize_tree

log = logging.getLogger(__name__)


@dataclass
class ServerConfig:
    domain_files: list
    ui_files: list
    backend: str = "ClingoBackend"
    backend_options: dict = field(default_factory=dict)
    host: str = "127.0.0.1"
    port: int = 8000
    solver: str | None = None
    log_level: str = "info"

    def __post_init__(self):
        if not self.domain_files or not self.ui_files:
            raise ValueError("at least one domain file and one ui file are required")


class OperationError(Exception):
    def __init__(self, code: str, detail: str, http_status: int = 400):
        super().__init__(detail)
        self.code = code
        self.detail = detail
        self.http_status = http_status


# ---------------------------------------------------------------------------
# Context placeholder resolution

CONTEXT_VALUE = "_context_value"


def resolve_context_placeholders(term: Term, context: dict) -> Term:
    """Replace residual _context_value(K[,T[,D]]) terms using the context.

    The client normally substitutes before posting; this is the defensive
    server-side pass for clients that do not.
    """
    if isinstance(term, Function):
        if term.name == CONTEXT_VALUE:
            return _lookup_context(term.args, context)
        return Function(term.name, tuple(resolve_context_placeholders(a, context) for a in term.args))
    if isinstance(term, TupleTerm):
        return TupleTerm(tuple(resolve_context_placeholders(a, context) for a in term.args))
    return term


def _lookup_context(args: tuple, context: dict) -> Term:
    if not 1 <= len(args) <= 3:
        raise OperationError("InvalidPlaceholder", "_context_value takes 1 to 3 arguments")
    key = args[0].name if isinstance(args[0], Constant) else (
        args[0].text if isinstance(args[0], QuotedString) else render_term(args[0])
    )
    type_name = "str"
    if len(args) >= 2:
        if not isinstance(args[1], Constant) or args[1].name not in ("str", "int", "const"):
            raise OperationError("InvalidPlaceholder", f"unknown context type {render_term(args[1])}")
        type_name = args[1].name
    if key not in context:
        if len(args) == 3:
            return args[2]
        raise OperationError("MissingContextKey", f"no context value for key {key!r}")
    raw = context[key]
    if type_name == "str":
        return QuotedString(raw)
    if type_name == "int":
        try:
            return Number(int(raw, 10))
        except ValueError:
            raise OperationError(
                "InvalidContextValue", f"context value {raw!r} for key {key!r} is not an integer"
            ) from None
    try:
        return parse_term(raw)
    except TermSyntaxError as exc:
        raise OperationError(
            "InvalidContextValue", f"context value {raw!r} for key {key!r} is not a term: {exc}"
        ) from None


# ---------------------------------------------------------------------------
# Operation dispatch


def _truth_arg(term: Term) -> bool:
    if isinstance(term, Constant) and term.name in ("true", "false"):
        return term.name == "true"
    raise OperationError("InvalidArgument", f"expected true or false, got {render_term(term)}")


def _external_value_arg(term: Term) -> str:
    if isinstance(term, Constant) and term.name in ("true", "false", "release"):
        return term.name
    raise OperationError("InvalidArgument", f"expected true/false/release, got {render_term(term)}")


def dispatch_operation(session: DomainSession, op: Term):
    """Execute one parsed operation term against the session."""
    if isinstance(op, Constant):
        name, args = op.name, ()
    elif isinstance(op, Function):
        name, args = op.name, op.args
    else:
        raise OperationError("SyntaxError", f"not an operation: {render_term(op)}")

    def arity(n):
        if len(args) != n:
            raise OperationError(
                "InvalidArgument", f"{name} expects {n} argument(s), got {len(args)}"
            )

    if name == "add_assumption":
        arity(2)
        session.add_assumption(args[0], _truth_arg(args[1]))
    elif name == "remove_assumption":
        arity(1)
        session.remove_assumption(args[0])
    elif name == "clear_assumptions":
        arity(0)
        session.clear_assumptions()
    elif name == "set_external":
        arity(2)
        session.set_external(args[0], _external_value_arg(args[1]))
    elif name == "add_atom":
        arity(1)
        session.add_atom(args[0])
    elif name == "remove_atom":
        arity(1)
        session.remove_atom(args[0])
    elif name == "next_solution":
        if len(args) > 1:
            raise OperationError("InvalidArgument", "next_solution takes at most one argument")
        session.next_solution()
    elif name == "restart":
        arity(0)
        session.restart()
    else:
        raise OperationError("UnknownOperation", f"unknown operation {name!r}")


OPERATION_NAMES = (
    "add_assumption",
    "remove_assumption",
    "clear_assumptions",
    "set_external",
    "add_atom",
    "remove_atom",
    "next_solution",
    "restart",
)


# ---------------------------------------------------------------------------
# Application


class UIServer:
    def __init__(self, config: ServerConfig):
        self.config = config
        self.bridge = SolverBridge(executable=config.solver)
        self.session = DomainSession(
            config.domain_files,
            backend=get_backend(config.backend),
            bridge=self.bridge,
            options=config.backend_options,
        )
        self.ui_files = ProgramBundle.from_files(config.ui_files)
        self.lock = threading.Lock()
        self._ui_cache: tuple | None = None  # (revision, json bytes)

    def ui_json(self) -> bytes:
        revision = self.session.revision
        if self._ui_cache is not None and self._ui_cache[0] == revision:
            return self._ui_cache[1]
        snapshot = self.session.compute_snapshot()
        atoms = build_ui_atoms(self.ui_files, snapshot_facts(snapshot), self.bridge)
        payload = serialize_tree(assemble_tree(atoms)).encode("utf-8")
        self._ui_cache = (revision, payload)
        return payload

    def apply_operations(self, operations: str, context: dict) -> None:
        try:
            parsed = parse_term(operations)
        except TermSyntaxError as exc:
            raise OperationError("SyntaxError", f"cannot parse operation: {exc}")
        ops = list(parsed.args) if isinstance(parsed, TupleTerm) else [parsed]
        for op in ops:  # a failure aborts the remainder of the tuple
            dispatch_operation(self.session, resolve_context_placeholders(op, context))


def create_app(config: ServerConfig) -> FastAPI:
    server = UIServer(config)
    app = FastAPI(title="clinguin server")
    app.state.server = server
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.middleware("http")
    async def access_log(request: Request, call_next):
        started = time.monotonic()
        response = await call_next(request)
        log.info(
            "%s %s revision=%d %.1fms",
            request.method,
            request.url.path,
            server.session.revision,
            (time.monotonic() - started) * 1000,
        )
        return response

    def error_response(status: int, code: str, detail: str) -> JSONResponse:
        return JSONResponse(status_code=status, content={"error": code, "detail": detail})

    @app.get("/ui")
    def get_ui():
        with server.lock:
            try:
                return Response(content=server.ui_json(), media_type="application/json")
            except GroundingError as exc:
                return error_response(500, "GroundingError", str(exc))
            except SolverError as exc:
                return error_response(500, "SolverError", str(exc))

    @app.post("/operation")
    async def post_operation(request: Request):
        try:
            body = await request.json()
        except Exception:
            return error_response(400, "SyntaxError", "request body is not JSON")
        operations = body.get("operation")
        if not isinstance(operations, str):
            return error_response(400, "SyntaxError", "missing 'operation' string")
        context = {
            entry.get("key"): entry.get("value")
            for entry in body.get("context", [])
            if isinstance(entry, dict)
        }
        with server.lock:
            try:
                server.apply_operations(operations, context)
                return Response(content=server.ui_json(), media_type="application/json")
            except OperationError as exc:
                return error_response(exc.http_status, exc.code, exc.detail)
            except domain_mod.ConflictingTruth as exc:
                return error_response(409, "ConflictingTruth", str(exc))
            except (domain_mod.UnknownExternal, domain_mod.NoSolution) as exc:
                return error_response(400, type(exc).__name__, str(exc))
            except GroundingError as exc:
                return error_response(500, "GroundingError", str(exc))
            except SolverError as exc:
                return error_response(500, "SolverError", str(exc))

    @app.get("/health")
    def get_health():
        try:
            info = server.bridge.solver_info()
        except SolverUnavailable as exc:
            return error_response(503, "SolverUnavailable", str(exc))
        return {"status": "ok", "solver": info, "revision": server.session.revision}

    return app
