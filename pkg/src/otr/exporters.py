"""Batch renderings of a call forest: text tree, per-function call listings,
and Chrome Trace Event JSON for flame-graph viewers.

Frame lines everywhere share one shape: the function name, each argument
rendered in juxtaposition position, then "= value" for a return, "raised
value" for an unwind, or "(truncated)" when the stream ended first.
"""

from __future__ import annotations

import json

from .call_tree import CallForest, Frame, MatchNode, Raised, Returned
from .errors import ArityMismatch
from .schema import Schema
from .values import decode, render, render_arg, render_untyped
from .wire import Call, Match, Raise, Return


# --- shared value presentation ----------------------------------------------

def decoded_args(frame: Frame, schema: Schema):
    fn = schema.function(frame.fn_id)
    if len(frame.args) != len(fn.arg_type_ids):
        raise ArityMismatch(
            f"call of {fn.name!r} recorded {len(frame.args)} args, "
            f"schema declares {len(fn.arg_type_ids)}"
        )
    return [decode(a, t, schema.types) for a, t in zip(frame.args, fn.arg_type_ids)]


def rendered_args(frame: Frame, schema: Schema) -> list[str]:
    return [render(tv) for tv in decoded_args(frame, schema)]


def rendered_outcome(frame: Frame, schema: Schema) -> str | None:
    """The outcome value alone ("1", '"boom"'), None for truncated frames."""
    if isinstance(frame.outcome, Returned):
        fn = schema.function(frame.fn_id)
        return render(decode(frame.outcome.value, fn.ret_type_id, schema.types))
    if isinstance(frame.outcome, Raised):
        # Exception payloads carry no type-id; render them schema-free.
        return render_untyped(frame.outcome.value)
    return None


def outcome_kind(frame: Frame) -> str:
    if isinstance(frame.outcome, Returned):
        return "returned"
    if isinstance(frame.outcome, Raised):
        return "raised"
    return "truncated"


def outcome_suffix(frame: Frame, schema: Schema) -> str:
    if isinstance(frame.outcome, Returned):
        return f"= {rendered_outcome(frame, schema)}"
    if isinstance(frame.outcome, Raised):
        return f"raised {rendered_outcome(frame, schema)}"
    return "(truncated)"


def frame_line(frame: Frame, schema: Schema) -> str:
    fn = schema.function(frame.fn_id)
    parts = [fn.name]
    parts += [render_arg(tv) for tv in decoded_args(frame, schema)]
    parts.append(outcome_suffix(frame, schema))
    return " ".join(parts)


def match_rendered(node: MatchNode, schema: Schema) -> str:
    site = schema.match_site(node.site_id)
    return render(decode(node.discriminee, site.scrutinee_type_id, schema.types))


# --- text exports -------------------------------------------------------------

ELISION = "…"


def print_tree(forest: CallForest, schema: Schema, max_depth: int | None = None) -> str:
    """Indented text rendering of the whole forest, two spaces per level.
    With max_depth, deeper children collapse into one elision line."""
    lines: list[str] = []

    def walk(node, depth: int) -> None:
        indent = "  " * (depth - 1)
        if isinstance(node, MatchNode):
            lines.append(f"{indent}match {match_rendered(node, schema)}")
            return
        lines.append(indent + frame_line(node, schema))
        if max_depth is not None and depth >= max_depth:
            if node.children:
                lines.append("  " * depth + ELISION)
            return
        for child in node.children:
            walk(child, depth + 1)

    for root in forest.roots:
        walk(root, 1)
    return "".join(line + "\n" for line in lines)


def observe(forest: CallForest, schema: Schema, fn_name: str, unique: bool = False) -> str:
    """One line per recorded call of fn_name, in pre-order. unique drops
    repeated identical lines, keeping first occurrences."""
    from .call_tree import find_calls

    lines = [frame_line(f, schema) for f in find_calls(forest, schema, fn_name)]
    if unique:
        seen = set()
        lines = [ln for ln in lines if not (ln in seen or seen.add(ln))]
    return "".join(line + "\n" for line in lines)


# --- Chrome Trace Event Format --------------------------------------------------

def to_chrome(forest: CallForest, schema: Schema, logical_time: bool = False) -> dict:
    """Trace Event JSON: B/E pairs per frame, instants for matches.

    Truncated frames get a synthesized E at the final event's timestamp with
    args.truncated set, keeping every tid B/E-balanced. logical_time swaps
    timestamps for event indices, which makes the output byte-reproducible.
    """
    trace_events: list[dict] = []
    open_frames: list[Frame] = []
    last_ts = 0
    for idx, e in enumerate(forest.events):
        ts = idx if logical_time else e.ts
        last_ts = ts
        if isinstance(e, Call):
            frame = forest.frame_opened_at(idx)
            open_frames.append(frame)
            trace_events.append(
                {
                    "ph": "B",
                    "name": schema.function(frame.fn_id).name,
                    "ts": ts,
                    "pid": 1,
                    "tid": 1,
                    "args": {"args": rendered_args(frame, schema)},
                }
            )
        elif isinstance(e, (Return, Raise)):
            frame = open_frames.pop()
            result = rendered_outcome(frame, schema)
            if isinstance(e, Raise):
                result = f"raised {result}"
            trace_events.append(
                {"ph": "E", "ts": ts, "pid": 1, "tid": 1, "args": {"result": result}}
            )
        elif isinstance(e, Match):
            trace_events.append(
                {
                    "ph": "i",
                    "name": "match",
                    "s": "t",
                    "ts": ts,
                    "pid": 1,
                    "tid": 1,
                    "args": {"value": match_rendered(forest.match_node_at(idx), schema)},
                }
            )
    for _ in range(len(open_frames)):
        open_frames.pop()
        trace_events.append(
            {"ph": "E", "ts": last_ts, "pid": 1, "tid": 1, "args": {"truncated": True}}
        )
    return {"traceEvents": trace_events}


def chrome_json_bytes(doc: dict) -> bytes:
    """Canonical serialization used for files and goldens."""
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False).encode(
        "utf-8"
    )


def validate_chrome(doc) -> None:
    """Structural check: B/E balance and LIFO nesting per (pid, tid), plus a
    globally non-decreasing ts sequence. Raises ValueError on violation."""
    if not isinstance(doc, dict) or not isinstance(doc.get("traceEvents"), list):
        raise ValueError("document must be an object with a traceEvents array")
    stacks: dict[tuple, list] = {}
    prev_ts = None
    for i, e in enumerate(doc["traceEvents"]):
        ph, ts = e.get("ph"), e.get("ts")
        if ph not in ("B", "E", "i"):
            raise ValueError(f"event {i}: unsupported phase {ph!r}")
        if not isinstance(ts, (int, float)):
            raise ValueError(f"event {i}: missing ts")
        if prev_ts is not None and ts < prev_ts:
            raise ValueError(f"event {i}: ts {ts} decreases below {prev_ts}")
        prev_ts = ts
        key = (e.get("pid"), e.get("tid"))
        if ph == "B":
            stacks.setdefault(key, []).append((e, ts))
        elif ph == "E":
            stack = stacks.get(key)
            if not stack:
                raise ValueError(f"event {i}: E without matching B on {key}")
            _, begin_ts = stack.pop()
            if ts < begin_ts:
                raise ValueError(f"event {i}: span ends at {ts} before it begins at {begin_ts}")
    for key, stack in stacks.items():
        if stack:
            raise ValueError(f"{len(stack)} unbalanced B events on {key}")
