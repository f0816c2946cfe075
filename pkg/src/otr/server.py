"""Read-only HTTP JSON API over one loaded (schema, forest) pair.

The service is stateless: the client owns its cursor and /api/step merely
computes transitions, so concurrent readers need no sessions and no
locking. Static assets for the browser UI are served from an assets
directory when one is available.
"""

from __future__ import annotations

import json
import mimetypes
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, unquote, urlparse

from . import exporters, navigator
from .call_tree import CallForest, Frame, find_calls
from .errors import NoEnclosingFrame, UnknownFrame, UnknownFunctionName
from .schema import Schema
from .wire import Call, Match, Raise, Return

FALLBACK_PAGE = """<!doctype html>
<html><head><title>otr</title></head><body>
<h1>otr trace service</h1>
<p>No web UI assets are installed. The JSON API is live:</p>
<ul>
<li><a href="/api/summary">/api/summary</a></li>
<li>/api/frames/{id}</li>
<li>/api/events?from=A&amp;to=B</li>
<li>/api/step?at=C&amp;op=next|prev|over|back_over|out|back_out</li>
<li>/api/search?fn=NAME</li>
<li><a href="/api/export/chrome">/api/export/chrome</a></li>
</ul></body></html>
"""


def frame_to_obj(forest: CallForest, schema: Schema, frame: Frame) -> dict:
    fn = schema.function(frame.fn_id)
    return {
        "id": frame.frame_id,
        "fn_id": frame.fn_id,
        "name": fn.name,
        "location": fn.location,
        "args": exporters.rendered_args(frame, schema),
        "outcome": exporters.rendered_outcome(frame, schema),
        "outcome_kind": exporters.outcome_kind(frame),
        "parent": frame.parent_id,
        "children": [c.frame_id for c in frame.child_frames()],
        "matches": [
            {
                "site_id": m.site_id,
                "event_idx": m.event_idx,
                "ts": m.ts,
                "location": schema.match_site(m.site_id).location,
                "value": exporters.match_rendered(m, schema),
            }
            for m in frame.match_nodes()
        ],
        "begin_event": frame.begin_event_idx,
        "end_event": frame.end_event_idx,
        "begin_ts": frame.begin_ts,
        "end_ts": frame.end_ts,
    }


def event_to_obj(forest: CallForest, schema: Schema, idx: int) -> dict:
    e = forest.events[idx]
    if isinstance(e, Call):
        frame = forest.frame_opened_at(idx)
        return {
            "idx": idx,
            "kind": "call",
            "ts": e.ts,
            "fn_id": e.fn_id,
            "name": schema.function(e.fn_id).name,
            "frame_id": frame.frame_id,
            "args": exporters.rendered_args(frame, schema),
        }
    if isinstance(e, Return):
        frame = forest.frame_closed_at(idx)
        return {
            "idx": idx,
            "kind": "return",
            "ts": e.ts,
            "frame_id": frame.frame_id,
            "value": exporters.rendered_outcome(frame, schema),
        }
    if isinstance(e, Raise):
        frame = forest.frame_closed_at(idx)
        return {
            "idx": idx,
            "kind": "raise",
            "ts": e.ts,
            "frame_id": frame.frame_id,
            "value": exporters.rendered_outcome(frame, schema),
        }
    assert isinstance(e, Match)
    node = forest.match_node_at(idx)
    return {
        "idx": idx,
        "kind": "match",
        "ts": e.ts,
        "site_id": e.site_id,
        "location": schema.match_site(e.site_id).location,
        "value": exporters.match_rendered(node, schema),
    }


def stack_to_obj(entries) -> list[dict]:
    return [
        {
            "frame_id": s.frame_id,
            "function": s.function,
            "args": list(s.args),
            "location": s.location,
            "closed_child": (
                None
                if s.closed_child is None
                else {"function": s.closed_child.function, "outcome": s.closed_child.outcome}
            ),
        }
        for s in entries
    ]


class _ApiError(Exception):
    def __init__(self, status: int, message: str) -> None:
        super().__init__(message)
        self.status = status


class TraceRequestHandler(BaseHTTPRequestHandler):
    server_version = "otr"

    # The service is read-only; request logging is just noise.
    def log_message(self, format, *args) -> None:
        pass

    def do_GET(self) -> None:
        url = urlparse(self.path)
        try:
            if url.path.startswith("/api/"):
                self._handle_api(url.path, parse_qs(url.query))
            else:
                self._handle_static(url.path)
        except _ApiError as exc:
            self._send_json({"error": str(exc)}, status=exc.status)
        except BrokenPipeError:
            pass

    def _handle_api(self, path: str, query: dict) -> None:
        forest: CallForest = self.server.forest
        schema: Schema = self.server.schema

        if path == "/api/summary":
            self._send_json(
                {
                    "event_count": forest.event_count,
                    "top_frames": [f.frame_id for f in forest.roots],
                    "truncated_count": forest.truncated_count,
                }
            )
        elif path.startswith("/api/frames/"):
            frame_id = self._int(path[len("/api/frames/") :], "frame id")
            try:
                frame = forest.frame(frame_id)
            except UnknownFrame as exc:
                raise _ApiError(404, str(exc)) from None
            self._send_json(frame_to_obj(forest, schema, frame))
        elif path == "/api/events":
            lo = self._int(query.get("from", ["0"])[0], "from")
            hi = self._int(query.get("to", [str(forest.event_count)])[0], "to")
            lo, hi = max(lo, 0), min(hi, forest.event_count)
            self._send_json(
                {"events": [event_to_obj(forest, schema, i) for i in range(lo, hi)]}
            )
        elif path == "/api/step":
            if "at" not in query or "op" not in query:
                raise _ApiError(400, "step needs at= and op=")
            at = self._int(query["at"][0], "at")
            op = query["op"][0]
            if op not in navigator.STEP_OPS:
                raise _ApiError(400, f"unknown op {op!r}")
            try:
                cursor = navigator.step(forest, at, op)
                entries = navigator.stack(forest, schema, cursor)
            except NoEnclosingFrame as exc:
                raise _ApiError(422, str(exc)) from None
            except ValueError as exc:
                raise _ApiError(400, str(exc)) from None
            location = entries[-1].location if entries else None
            self._send_json(
                {"cursor": cursor, "stack": stack_to_obj(entries), "location": location}
            )
        elif path == "/api/search":
            if "fn" not in query:
                raise _ApiError(400, "search needs fn=")
            try:
                frames = [f.frame_id for f in find_calls(forest, schema, query["fn"][0])]
            except UnknownFunctionName as exc:
                raise _ApiError(404, str(exc)) from None
            self._send_json({"frames": frames})
        elif path == "/api/export/chrome":
            logical = query.get("logical_time", ["0"])[0] in ("1", "true")
            doc = exporters.to_chrome(forest, schema, logical_time=logical)
            self._send_bytes(exporters.chrome_json_bytes(doc), "application/json")
        else:
            raise _ApiError(404, f"no such endpoint {path}")

    def _handle_static(self, path: str) -> None:
        assets: Path | None = self.server.assets_dir
        name = unquote(path).lstrip("/") or "index.html"
        if assets is not None:
            target = (assets / name).resolve()
            if str(target).startswith(str(assets.resolve())) and target.is_file():
                ctype = mimetypes.guess_type(str(target))[0] or "application/octet-stream"
                self._send_bytes(target.read_bytes(), ctype)
                return
        if name == "index.html":
            self._send_bytes(FALLBACK_PAGE.encode("utf-8"), "text/html; charset=utf-8")
            return
        raise _ApiError(404, f"no such file {name!r}")

    def _int(self, raw: str, what: str) -> int:
        try:
            return int(raw)
        except ValueError:
            raise _ApiError(400, f"malformed {what}: {raw!r}") from None

    def _send_json(self, obj, status: int = 200) -> None:
        self._send_bytes(
            json.dumps(obj, ensure_ascii=False).encode("utf-8"),
            "application/json",
            status=status,
        )

    def _send_bytes(self, payload: bytes, ctype: str, status: int = 200) -> None:
        self.send_response(status)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(payload)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(payload)


class TraceServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, address, schema: Schema, forest: CallForest, assets_dir=None) -> None:
        super().__init__(address, TraceRequestHandler)
        self.schema = schema
        self.forest = forest
        self.assets_dir = Path(assets_dir) if assets_dir is not None else default_assets_dir()


def default_assets_dir() -> Path | None:
    bundled = Path(__file__).parent / "webui"
    return bundled if (bundled / "index.html").is_file() else None


def make_server(schema: Schema, forest: CallForest, port: int = 0, assets_dir=None) -> TraceServer:
    return TraceServer(("127.0.0.1", port), schema, forest, assets_dir=assets_dir)
