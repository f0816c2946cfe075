"""Command-line entry point.

    otr demo depth            record a bundled demo (trace + schema sidecar)
    otr tree depth.trace      print the call tree
    otr calls depth.trace depth [--unique]
    otr export-chrome depth.trace -o depth.json [--logical-time]
    otr serve depth.trace [--port 7381]

stdout carries data, stderr carries diagnostics. Exit codes: 0 success,
1 usage error, 2 unreadable or mismatched trace/schema input (the message
names the specific error).
"""

from __future__ import annotations

import argparse
import sys

from . import call_tree, demos, exporters, schema as schema_mod, server, wire
from .errors import OtrError

DEFAULT_PORT = 7381


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage; this tool reserves 2 for bad input data.
    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def default_schema_path(trace_path: str) -> str:
    if trace_path.endswith(".trace"):
        return trace_path[: -len(".trace")] + ".schema.json"
    return trace_path + ".schema.json"


def load_forest(trace_path: str, schema_path: str | None):
    if schema_path is None:
        schema_path = default_schema_path(trace_path)
    schema = schema_mod.load_schema(schema_path)
    try:
        events, truncated = wire.read_trace(trace_path, schema)
    except OSError as exc:
        from .errors import IoFailure

        raise IoFailure(f"cannot read trace {trace_path}: {exc}") from exc
    if truncated:
        print("warning: trace is truncated; open frames are reported as such", file=sys.stderr)
    return schema, call_tree.build(events)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="otr", description="record, inspect, and replay execution traces")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tree", help="print the call tree of a trace")
    p.add_argument("trace")
    p.add_argument("--schema", default=None, help="schema sidecar path")
    p.add_argument("--max-depth", type=int, default=None)

    p = sub.add_parser("calls", help="list every recorded call of a function")
    p.add_argument("trace")
    p.add_argument("fn_name")
    p.add_argument("--schema", default=None)
    p.add_argument("--unique", action="store_true", help="drop repeated identical lines")

    p = sub.add_parser("export-chrome", help="write Chrome Trace Event JSON")
    p.add_argument("trace")
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--schema", default=None)
    p.add_argument("--logical-time", action="store_true", help="event indices instead of timestamps")

    p = sub.add_parser("serve", help="serve the trace over HTTP with the web explorer")
    p.add_argument("trace")
    p.add_argument("--schema", default=None)
    p.add_argument("--port", type=int, default=DEFAULT_PORT)
    p.add_argument("--assets", default=None, help="directory of web UI assets")

    p = sub.add_parser("demo", help="record a bundled demo trace")
    p.add_argument("name", choices=demos.DEMO_NAMES)
    p.add_argument("--out", default=None, help="output directory (default: $OTR_TRACE_DIR or .)")

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except OtrError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


def _dispatch(args) -> int:
    if args.command == "tree":
        schema, forest = load_forest(args.trace, args.schema)
        sys.stdout.write(exporters.print_tree(forest, schema, max_depth=args.max_depth))
        return 0

    if args.command == "calls":
        schema, forest = load_forest(args.trace, args.schema)
        sys.stdout.write(exporters.observe(forest, schema, args.fn_name, unique=args.unique))
        return 0

    if args.command == "export-chrome":
        schema, forest = load_forest(args.trace, args.schema)
        doc = exporters.to_chrome(forest, schema, logical_time=args.logical_time)
        with open(args.out, "wb") as f:
            f.write(exporters.chrome_json_bytes(doc))
        print(f"wrote {args.out}", file=sys.stderr)
        return 0

    if args.command == "serve":
        schema, forest = load_forest(args.trace, args.schema)
        srv = server.make_server(schema, forest, port=args.port, assets_dir=args.assets)
        host, port = srv.server_address
        print(f"serving {args.trace} on http://{host}:{port}", file=sys.stderr, flush=True)
        try:
            srv.serve_forever()
        except KeyboardInterrupt:
            pass
        return 0

    if args.command == "demo":
        result = demos.run_demo(args.name, out_dir=args.out)
        print(f"wrote {result.trace_path} and {result.schema_path}", file=sys.stderr)
        return 0

    raise AssertionError(f"unhandled command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
