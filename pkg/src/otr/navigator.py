"""Time-travel stepping over a recorded trace.

A cursor is a position between events: c means events [0, c) have happened.
All ops are pure functions of (forest, cursor); the HTTP layer on top holds
no session state, so the client owns the cursor and navigation is
unconstrained by actual execution -- backwards works exactly like forwards.
"""

from __future__ import annotations

from dataclasses import dataclass

from .call_tree import CallForest, Frame
from .errors import NoEnclosingFrame
from .exporters import outcome_suffix, rendered_args
from .schema import Schema

STEP_OPS = ("next", "prev", "over", "back_over", "out", "back_out")


def _check_cursor(forest: CallForest, cursor: int) -> None:
    if not (0 <= cursor <= forest.event_count):
        raise ValueError(f"cursor {cursor} out of [0, {forest.event_count}]")


def step(forest: CallForest, cursor: int, op: str) -> int:
    """Apply one navigation op and return the new cursor.

    next/prev clamp at the stream edges. over skips a whole subtree when the
    cursor faces its Call; back_over mirrors it when the cursor sits just
    after a close. out/back_out leave the innermost open frame forwards or
    backwards and raise NoEnclosingFrame at top level.
    """
    _check_cursor(forest, cursor)
    n = forest.event_count

    if op == "next":
        return min(cursor + 1, n)
    if op == "prev":
        return max(cursor - 1, 0)
    if op == "over":
        frame = forest.frame_opened_at(cursor) if cursor < n else None
        if frame is None:
            return min(cursor + 1, n)
        return frame.end_event_idx + 1 if not frame.truncated else n
    if op == "back_over":
        frame = forest.frame_closed_at(cursor - 1) if cursor > 0 else None
        if frame is None:
            return max(cursor - 1, 0)
        return frame.begin_event_idx
    if op == "out":
        frame = _innermost(forest, cursor)
        return frame.end_event_idx + 1 if not frame.truncated else n
    if op == "back_out":
        return _innermost(forest, cursor).begin_event_idx
    raise ValueError(f"unknown step op {op!r}")


def _innermost(forest: CallForest, cursor: int) -> Frame:
    chain = forest.open_frames_at(cursor)
    if not chain:
        raise NoEnclosingFrame(f"no frame is open at cursor {cursor}")
    return chain[-1]


@dataclass(frozen=True)
class ClosedChild:
    """What just finished inside an open frame: its latest closed child."""

    function: str
    outcome: str  # same "= v" / "raised v" shape the tree printer uses


@dataclass(frozen=True)
class StackEntry:
    frame_id: int
    function: str
    args: tuple[str, ...]
    location: str
    closed_child: ClosedChild | None


def stack(forest: CallForest, schema: Schema, cursor: int) -> list[StackEntry]:
    """Open frames at the cursor, outermost first, with rendered values.

    Each entry also carries the most recently closed direct child (if the
    cursor has passed its close), which is how stepping across a Raise shows
    the callee that just unwound.
    """
    _check_cursor(forest, cursor)
    entries = []
    for frame in forest.open_frames_at(cursor):
        fn = schema.function(frame.fn_id)
        closed: ClosedChild | None = None
        latest = -1
        for child in frame.child_frames():
            if child.end_event_idx is not None and child.end_event_idx < cursor:
                if child.end_event_idx > latest:
                    latest = child.end_event_idx
                    closed = ClosedChild(
                        schema.function(child.fn_id).name, outcome_suffix(child, schema)
                    )
        entries.append(
            StackEntry(
                frame_id=frame.frame_id,
                function=fn.name,
                args=tuple(rendered_args(frame, schema)),
                location=fn.location,
                closed_child=closed,
            )
        )
    return entries
