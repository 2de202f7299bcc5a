"""Command line entry point: ``clinguin server|client|client-server``.

``server`` runs the HTTP API, ``client`` serves the static frontend bundle
pointing at an existing API, and ``client-server`` does both in one
process.
"""

from __future__ import annotations

import argparse
import functools
import http.server
import logging
import os
import sys
import threading

from .backends import BACKENDS
from .server import ServerConfig, create_app

log = logging.getLogger(__name__)

DEFAULT_HOST = "127.0.0.1"
DEFAULT_PORT = 8000
FRONTEND_ENV_VAR = "CLINGUIN_FRONTEND"


def _add_common_options(parser: argparse.ArgumentParser, needs_programs: bool):
    parser.add_argument(
        "--domain-files", nargs="+", default=[], metavar="FILE",
        required=needs_programs, help="ASP files describing the problem domain",
    )
    parser.add_argument(
        "--ui-files", nargs="+", default=[], metavar="FILE",
        required=needs_programs, help="ASP files describing the user interface",
    )
    parser.add_argument(
        "--backend", default="ClingoBackend", choices=sorted(BACKENDS),
        help="backend controlling solving and snapshot construction",
    )
    parser.add_argument("--host", default=os.environ.get("CLINGUIN_HOST", DEFAULT_HOST))
    parser.add_argument(
        "--port", type=int, default=int(os.environ.get("CLINGUIN_PORT", DEFAULT_PORT))
    )
    parser.add_argument(
        "--solver", default=None,
        help="solver executable (default: clingo if installed, else the bundled solver)",
    )
    parser.add_argument(
        "--log-level", default="info", choices=["debug", "info", "warning", "error"]
    )
    for backend_cls in BACKENDS.values():
        backend_cls.register_options(parser)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="clinguin", description=__doc__)
    sub = parser.add_subparsers(dest="mode", required=True)
    _add_common_options(sub.add_parser("server", help="run the HTTP API"), True)
    client = sub.add_parser("client", help="serve the frontend for an existing API")
    _add_common_options(client, False)
    client.add_argument(
        "--frontend-dir", default=os.environ.get(FRONTEND_ENV_VAR),
        help="directory with the built frontend assets",
    )
    both = sub.add_parser("client-server", help="run API and frontend together")
    _add_common_options(both, True)
    both.add_argument("--frontend-dir", default=os.environ.get(FRONTEND_ENV_VAR))
    return parser


def parse_cli(argv=None):
    """Parse arguments into (ServerConfig | None, parsed namespace)."""
    args = build_parser().parse_args(argv)
    config = None
    if args.mode in ("server", "client-server"):
        backend_options = {"assumption_signature": getattr(args, "assumption_signature", [])}
        config = ServerConfig(
            domain_files=args.domain_files,
            ui_files=args.ui_files,
            backend=args.backend,
            backend_options=backend_options,
            host=args.host,
            port=args.port,
            solver=args.solver,
            log_level=args.log_level,
        )
    return config, args


def _run_api(config: ServerConfig):
    import uvicorn

    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port, log_level=config.log_level)


def _run_frontend(directory: str | None, host: str, api_port: int):
    if not directory or not os.path.isdir(directory):
        print(
            "no frontend directory found; point --frontend-dir (or the "
            f"{FRONTEND_ENV_VAR} variable) at the built frontend assets",
            file=sys.stderr,
        )
        return
    port = api_port + 1
    handler = functools.partial(http.server.SimpleHTTPRequestHandler, directory=directory)
    with http.server.ThreadingHTTPServer((host, port), handler) as httpd:
        print(f"frontend at http://{host}:{port}/ (API expected on port {api_port})")
        httpd.serve_forever()


def main(argv=None) -> int:
    config, args = parse_cli(argv)
    logging.basicConfig(level=args.log_level.upper(), stream=sys.stderr)
    try:
        if args.mode == "server":
            _run_api(config)
        elif args.mode == "client":
            _run_frontend(args.frontend_dir, args.host, args.port)
        else:
            api = threading.Thread(target=_run_api, args=(config,), daemon=True)
            api.start()
            _run_frontend(args.frontend_dir, args.host, args.port)
    except KeyboardInterrupt:
        pass
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
