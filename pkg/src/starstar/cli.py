"""Command-line front door: validate, build, filter, project, bench, serve.

Exit codes: 0 success, 1 usage error, 2 data error.  Diagnostics go to
stderr; data goes to --out targets or stdout.  STARSTAR_LOG=error|warn|
info|debug controls diagnostic verbosity.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from .bench import format_report, run_bench
from .errors import StarStarError
from .filtering import FilterSpec, apply_filter
from .graphs import ModelSnapshot, a2a_to_dot, a2a_to_json_bytes, build_model
from .ingest import parse_path, validate_path, write_jsonl
from .projection import ProjectionParams, case_notion, export_csv, export_xes, project, projection_summary

logger = logging.getLogger("starstar.cli")

_LOG_LEVELS = {"error": logging.ERROR, "warn": logging.WARNING,
               "info": logging.INFO, "debug": logging.DEBUG}


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the contract here wants 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _omega(text: str) -> float:
    value = float(text)
    if not 0.0 < value <= 1.0:
        raise argparse.ArgumentTypeError("omega must lie in (0, 1]")
    return value


def _window(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("window must be >= 0")
    return value


def _sizes(text: str) -> tuple:
    try:
        sizes = tuple(int(part) for part in text.split(",") if part)
    except ValueError:
        raise argparse.ArgumentTypeError("sizes must be comma-separated integers")
    if not sizes:
        raise argparse.ArgumentTypeError("at least one size is required")
    return sizes


def build_parser() -> _Parser:
    parser = _Parser(prog="starstar", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    def add_input(p):
        p.add_argument("input", help="event data file (XOC XML or JSONL)")
        p.add_argument("--format", choices=("xoc", "jsonl"), default="",
                       help="input format; detected from the extension when omitted")

    p = sub.add_parser("validate", help="check a file and print an integrity report")
    add_input(p)

    p = sub.add_parser("build", help="build the model and emit the activities graph")
    add_input(p)
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--dot", action="store_true", help="emit Graphviz DOT instead of JSON")
    p.add_argument("--metric", choices=("count", "weight", "perf"), default="count",
                   help="metric used for DOT labels and pen widths")

    p = sub.add_parser("filter", help="apply a filter spec and emit the resulting graph")
    add_input(p)
    p.add_argument("--spec", required=True, help="path to a filter spec JSON file")
    p.add_argument("--out", help="output path for the A2A JSON (default: stdout)")
    p.add_argument("--log-out", help="also write the filtered sub-log as JSONL (edgeDrill only)")

    p = sub.add_parser("project", help="project a class perspective to a classic event log")
    add_input(p)
    p.add_argument("--class", dest="perspective", required=True, help="perspective object class")
    p.add_argument("--omega", type=_omega, default=0.05, help="connection weight threshold (default 0.05)")
    p.add_argument("--window", type=_window, default=2, help="log window / iteration count (default 2)")
    p.add_argument("--xes", help="write the projected log as XES to this path")
    p.add_argument("--csv", help="write the projected log as CSV to this path")
    p.add_argument("--summary", action="store_true",
                   help="print a JSON summary to stdout (default when no output path is given)")

    p = sub.add_parser("bench", help="measure build-time scaling for all kernel backends")
    p.add_argument("--sizes", type=_sizes, default=(10_000, 20_000, 40_000),
                   help="comma-separated eo-pair counts (default 10000,20000,40000)")
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true", help="machine-readable output")

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--state-dir", help="persist uploaded logs as JSONL for restart recovery")
    p.add_argument("--ui", help="serve a static UI build from this directory under /ui")
    p.add_argument("--timeout", type=float, default=60.0, help="projection timeout in seconds")

    return parser


def _emit(data: bytes, out_path) -> None:
    if out_path:
        with open(out_path, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)


def _cmd_validate(args) -> int:
    report = validate_path(args.input, args.format)
    for issue in report.errors:
        print(f"error    {issue.code:22} {issue.message}", file=sys.stderr)
    for issue in report.warnings:
        print(f"warning  {issue.code:22} {issue.message}", file=sys.stderr)
    print(f"{len(report.errors)} error(s), {len(report.warnings)} warning(s)")
    return 0 if report.ok else 2


def _cmd_build(args) -> int:
    snapshot = build_model(parse_path(args.input, args.format))
    if args.dot:
        _emit(a2a_to_dot(snapshot.a2a, metric=args.metric).encode("utf-8"), args.out)
    else:
        _emit(a2a_to_json_bytes(snapshot.a2a, indent=2), args.out)
    return 0


def _cmd_filter(args) -> int:
    with open(args.spec, "r", encoding="utf-8") as fh:
        spec = FilterSpec.from_dict(json.load(fh))
    snapshot = build_model(parse_path(args.input, args.format))
    result = apply_filter(snapshot, spec)
    if isinstance(result, ModelSnapshot):
        if args.log_out:
            with open(args.log_out, "wb") as fh:
                fh.write(write_jsonl(result.log))
        _emit(a2a_to_json_bytes(result.a2a, indent=2), args.out)
    else:
        if args.log_out:
            print("warning: --log-out ignored for display-level filters", file=sys.stderr)
        _emit(a2a_to_json_bytes(result, indent=2), args.out)
    return 0


def _cmd_project(args) -> int:
    log = parse_path(args.input, args.format)
    params = ProjectionParams(args.perspective, args.omega, args.window)
    clog = project(log, case_notion(log, params))
    wrote_file = False
    if args.xes:
        _emit(export_xes(clog), args.xes)
        wrote_file = True
    if args.csv:
        _emit(export_csv(clog), args.csv)
        wrote_file = True
    if args.summary or not wrote_file:
        print(json.dumps(projection_summary(clog)))
    return 0


def _cmd_bench(args) -> int:
    report = run_bench(sizes=args.sizes, repeats=args.repeats, seed=args.seed)
    if args.json:
        print(json.dumps(report))
    else:
        sys.stdout.write(format_report(report))
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(state_dir=args.state_dir, project_timeout=args.timeout, ui_dir=args.ui)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


_COMMANDS = {
    "validate": _cmd_validate,
    "build": _cmd_build,
    "filter": _cmd_filter,
    "project": _cmd_project,
    "bench": _cmd_bench,
    "serve": _cmd_serve,
}


def main(argv=None) -> int:
    level = _LOG_LEVELS.get(os.environ.get("STARSTAR_LOG", "warn").lower())
    logging.basicConfig(level=level if level is not None else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1

    try:
        return _COMMANDS[args.command](args)
    except StarStarError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
