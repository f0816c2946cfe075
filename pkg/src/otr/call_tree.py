"""Reconstructs the tree of calls from a linear event stream.

A stack machine replays the events: Call pushes a frame, Return/Raise close
the innermost one, Match attaches a point node to it. Frames left open at
end-of-stream get outcome Truncated but keep their children, so a crashed
run is still explorable. Frame ids are dense in pre-order, i.e. in Call
order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import OrphanClose, UnknownFrame
from .schema import Schema
from .values import EncodedValue
from .wire import Call, Match, Raise, Return, TraceEvent


class Outcome:
    __slots__ = ()


@dataclass(frozen=True)
class Returned(Outcome):
    value: EncodedValue


@dataclass(frozen=True)
class Raised(Outcome):
    value: EncodedValue


@dataclass(frozen=True)
class Truncated(Outcome):
    pass


@dataclass(frozen=True)
class MatchNode:
    site_id: int
    discriminee: EncodedValue
    event_idx: int
    ts: int


@dataclass
class Frame:
    frame_id: int
    fn_id: int
    args: tuple[EncodedValue, ...]
    begin_event_idx: int
    begin_ts: int
    parent_id: int | None
    children: list = field(default_factory=list)  # Frame | MatchNode, event order
    outcome: Outcome = Truncated()
    end_event_idx: int | None = None  # None iff truncated
    end_ts: int | None = None

    @property
    def truncated(self) -> bool:
        return self.end_event_idx is None

    def child_frames(self) -> list[Frame]:
        return [c for c in self.children if isinstance(c, Frame)]

    def match_nodes(self) -> list[MatchNode]:
        return [c for c in self.children if isinstance(c, MatchNode)]


class CallForest:
    """Immutable (after build) call tree plus the event list it came from."""

    def __init__(self, roots, frames, events, truncated_count: int, by_begin, by_end, by_match) -> None:
        self.roots: list[Frame] = roots
        self.frames: list[Frame] = frames  # indexed by frame_id
        self.events: list[TraceEvent] = events
        self.truncated_count = truncated_count
        self._by_begin: dict[int, Frame] = by_begin
        self._by_end: dict[int, Frame] = by_end
        self._by_match: dict[int, MatchNode] = by_match

    @property
    def event_count(self) -> int:
        return len(self.events)

    def frame(self, frame_id: int) -> Frame:
        if not (0 <= frame_id < len(self.frames)):
            raise UnknownFrame(f"frame_id {frame_id} out of range (have {len(self.frames)})")
        return self.frames[frame_id]

    def frame_opened_at(self, event_idx: int) -> Frame | None:
        """The frame whose Call is event event_idx, if that event is a Call."""
        return self._by_begin.get(event_idx)

    def frame_closed_at(self, event_idx: int) -> Frame | None:
        """The frame whose Return/Raise is event event_idx, if any."""
        return self._by_end.get(event_idx)

    def match_node_at(self, event_idx: int) -> MatchNode | None:
        return self._by_match.get(event_idx)

    def subtree_last_event(self, frame: Frame) -> int:
        """Index of the last event inside the frame's subtree. For truncated
        frames that is the final event of the stream."""
        return frame.end_event_idx if frame.end_event_idx is not None else len(self.events) - 1

    def open_frames_at(self, cursor: int) -> list[Frame]:
        """Frames open at a cursor (begin < cursor <= end, truncated end
        counting as stream end), outermost first."""
        chain: list[Frame] = []
        candidates = self.roots
        while True:
            nxt = None
            for f in candidates:
                if f.begin_event_idx < cursor <= self.subtree_end_for_openness(f):
                    nxt = f
                    break
            if nxt is None:
                return chain
            chain.append(nxt)
            candidates = nxt.child_frames()

    def subtree_end_for_openness(self, frame: Frame) -> int:
        return frame.end_event_idx if frame.end_event_idx is not None else len(self.events)


def build(events) -> CallForest:
    """Arrange a (possibly truncated) event stream into a forest of frames."""
    events = list(events)
    roots: list[Frame] = []
    frames: list[Frame] = []
    stack: list[Frame] = []
    by_begin: dict[int, Frame] = {}
    by_end: dict[int, Frame] = {}
    by_match: dict[int, MatchNode] = {}

    for idx, e in enumerate(events):
        if isinstance(e, Call):
            frame = Frame(
                frame_id=len(frames),
                fn_id=e.fn_id,
                args=e.args,
                begin_event_idx=idx,
                begin_ts=e.ts,
                parent_id=stack[-1].frame_id if stack else None,
            )
            frames.append(frame)
            by_begin[idx] = frame
            (stack[-1].children if stack else roots).append(frame)
            stack.append(frame)
        elif isinstance(e, (Return, Raise)):
            if not stack:
                raise OrphanClose(f"event {idx} closes a frame but none is open")
            frame = stack.pop()
            frame.outcome = Returned(e.value) if isinstance(e, Return) else Raised(e.exn)
            frame.end_event_idx = idx
            frame.end_ts = e.ts
            by_end[idx] = frame
        elif isinstance(e, Match):
            if not stack:
                raise OrphanClose(f"match event {idx} occurs outside any frame")
            node = MatchNode(e.site_id, e.discriminee, idx, e.ts)
            stack[-1].children.append(node)
            by_match[idx] = node
        else:
            raise TypeError(f"not a TraceEvent: {e!r}")

    truncated_count = len(stack)  # frames left open keep outcome Truncated
    return CallForest(roots, frames, events, truncated_count, by_begin, by_end, by_match)


def find_calls(forest: CallForest, schema: Schema, fn_name: str) -> list[Frame]:
    """All frames recording a call of the named function, in pre-order."""
    fn = schema.function_named(fn_name)  # UnknownFunctionName if absent
    return [f for f in forest.frames if f.fn_id == fn.fn_id]


def frame_path(forest: CallForest, frame_id: int) -> list[Frame]:
    """Root-to-target chain of frames ending at frame_id."""
    frame = forest.frame(frame_id)
    path = [frame]
    while frame.parent_id is not None:
        frame = forest.frames[frame.parent_id]
        path.append(frame)
    path.reverse()
    return path
