"""Runtime emission API used by instrumented programs.

A TraceSession owns one output stream and enforces the nesting discipline:
call() opens a frame and hands back a FrameGuard, ret()/raise_exit() close
the innermost one. Any stream produced through guards is well nested by
construction. The instrumentation contract for exceptions: wrap the body,
intercept an escaping exception, call raise_exit, re-raise -- so an
exception unwinding k frames leaves k Raise events behind it.

Values are encoded eagerly at event time; interpretation is deferred to
readers holding the schema sidecar.

The @traced decorator is sugar over this API for hand-instrumenting Python
code; the guard API is the contract.
"""

from __future__ import annotations

import functools
import inspect
import os
import time
from pathlib import Path

from . import values as values_mod
from .errors import (
    GuardAlreadyClosed,
    KindMismatch,
    NoOpenFrame,
    NotInnermost,
    SessionClosed,
    UnknownFunction,
    UnknownSite,
)
from .schema import Schema, save_schema, schema_hash
from .values import EncodedValue, Opaque, OPAQUE_ABSTRACT, OPAQUE_FUNCTION
from .wire import Call, Match, Raise, Return, TraceWriter

TRACE_DIR_ENV = "OTR_TRACE_DIR"


def _monotonic_clock():
    origin = time.monotonic_ns()
    return lambda: (time.monotonic_ns() - origin) // 1000


class TickClock:
    """Deterministic clock: one microsecond per reading. Demos and tests use
    this so regenerated traces are byte-identical."""

    def __init__(self, start: int = 0, step: int = 1) -> None:
        self._next = start
        self._step = step

    def __call__(self) -> int:
        now = self._next
        self._next += self._step
        return now


class FrameGuard:
    """Handle for one open Call; consumed exactly once by ret or raise_exit."""

    __slots__ = ("_session", "fn_id", "_depth", "closed")

    def __init__(self, session: TraceSession, fn_id: int, depth: int) -> None:
        self._session = session
        self.fn_id = fn_id
        self._depth = depth
        self.closed = False


class TraceSession:
    """One thread's recording of one execution into <name>.trace, with the
    schema sidecar written next to it as <name>.schema.json."""

    def __init__(self, name: str, schema: Schema, out_dir=None, clock=None) -> None:
        self.schema = schema
        base = Path(out_dir) if out_dir is not None else Path(os.environ.get(TRACE_DIR_ENV, "."))
        base.mkdir(parents=True, exist_ok=True)
        self.trace_path = base / f"{name}.trace"
        self.schema_path = base / f"{name}.schema.json"
        # Sidecar first: even a crashed run leaves an interpretable trace.
        save_schema(schema, self.schema_path)
        self._clock = clock if clock is not None else _monotonic_clock()
        self._stack: list[FrameGuard] = []
        self._last_ts = 0
        self._stream = open(self.trace_path, "wb")
        self._writer = TraceWriter(self._stream, schema_hash(schema))
        self._closed = False

    @property
    def depth(self) -> int:
        return len(self._stack)

    def _now(self) -> int:
        ts = self._clock()
        # Wire deltas are unsigned; never let a quirky clock step backwards.
        if ts < self._last_ts:
            ts = self._last_ts
        self._last_ts = ts
        return ts

    def _check_open(self) -> None:
        if self._closed:
            raise SessionClosed("trace session already finalized")

    def call(self, fn_id: int, args) -> FrameGuard:
        self._check_open()
        if not (0 <= fn_id < len(self.schema.functions)):
            raise UnknownFunction(f"fn_id {fn_id} is not registered")
        args = tuple(args)
        self._writer.write_event(Call(fn_id, args, self._now()))
        guard = FrameGuard(self, fn_id, len(self._stack))
        self._stack.append(guard)
        return guard

    def ret(self, guard: FrameGuard, value: EncodedValue) -> None:
        self._close_frame(guard)
        self._writer.write_event(Return(value, self._now()))

    def raise_exit(self, guard: FrameGuard, exn: EncodedValue) -> None:
        self._close_frame(guard)
        self._writer.write_event(Raise(exn, self._now()))

    def _close_frame(self, guard: FrameGuard) -> None:
        self._check_open()
        if guard.closed:
            raise GuardAlreadyClosed(f"frame for fn_id {guard.fn_id} already closed")
        if guard._session is not self:
            raise NotInnermost("guard belongs to a different session")
        if not self._stack or self._stack[-1] is not guard:
            raise NotInnermost(
                f"frame for fn_id {guard.fn_id} is not the innermost open frame"
            )
        self._stack.pop()
        guard.closed = True

    def match_event(self, site_id: int, discriminee: EncodedValue) -> None:
        self._check_open()
        if not self._stack:
            raise NoOpenFrame("match events only occur inside an open frame")
        if not (0 <= site_id < len(self.schema.match_sites)):
            raise UnknownSite(f"site_id {site_id} is not registered")
        self._writer.write_event(Match(site_id, discriminee, self._now()))

    def close(self) -> None:
        """Finalize the stream. Open frames are legal here only when the
        program is aborting; they will read back as truncated."""
        if self._closed:
            return
        self._closed = True
        self._stream.close()

    def __enter__(self) -> TraceSession:
        return self

    def __exit__(self, *exc) -> None:
        self.close()


# --- decorator sugar -------------------------------------------------------------

_active_session: TraceSession | None = None


class use_session:
    """Route @traced functions into `session` while the context is active."""

    def __init__(self, session: TraceSession) -> None:
        self._session = session
        self._previous: TraceSession | None = None

    def __enter__(self) -> TraceSession:
        global _active_session
        self._previous = _active_session
        _active_session = self._session
        return self._session

    def __exit__(self, *exc) -> None:
        global _active_session
        _active_session = self._previous


def encode_python(value, type_id: int, table) -> EncodedValue:
    """Best-effort encoding of a native Python value under a descriptor.
    Used by the decorator sugar; hand instrumentation encodes explicitly."""
    desc = table[type_id]
    if isinstance(desc, values_mod.Unit):
        return values_mod.Immediate(0)
    if isinstance(desc, values_mod.Bool):
        return values_mod.Immediate(int(bool(value)))
    if isinstance(desc, values_mod.Int):
        return values_mod.Immediate(int(value))
    if isinstance(desc, values_mod.Char):
        return values_mod.Immediate(ord(value))
    if isinstance(desc, values_mod.Float):
        return values_mod.Float64(float(value))
    if isinstance(desc, values_mod.String):
        data = value.encode("utf-8") if isinstance(value, str) else bytes(value)
        return values_mod.Str(data)
    if isinstance(desc, values_mod.Func):
        return Opaque(OPAQUE_FUNCTION if callable(value) else OPAQUE_ABSTRACT)
    if isinstance(desc, values_mod.Tuple):
        items = tuple(value)
        if len(items) != len(desc.elements):
            raise KindMismatch(f"tuple arity {len(desc.elements)}, got {len(items)}")
        return values_mod.Block(
            0, tuple(encode_python(x, t, table) for x, t in zip(items, desc.elements))
        )
    if isinstance(desc, values_mod.ListOf):
        return values_mod.encode_list(encode_python(x, desc.element, table) for x in value)
    if isinstance(desc, values_mod.Record):
        return values_mod.Block(
            0, tuple(encode_python(value[n], t, table) for n, t in desc.fields)
        )
    if isinstance(desc, values_mod.Variant):
        if isinstance(value, str):
            return values_mod.encode_constructor(desc, value, ())
        if isinstance(value, values_mod.CtorV):
            name, args = value.name, value.args
        else:
            name, args = value  # (ctor name, arg sequence) pair
        arg_types = dict(desc.constructors).get(name)
        if arg_types is None:
            return values_mod.encode_constructor(desc, name, ())  # UnknownConstructor
        encoded = tuple(encode_python(a, t, table) for a, t in zip(args, arg_types))
        return values_mod.encode_constructor(desc, name, encoded)
    raise KindMismatch(f"cannot encode {value!r} under {desc!r}")


def traced(registry, arg_types, ret_type, name=None, source_file=None, line=None):
    """Register the decorated function's signature and wrap it so calls are
    recorded into the active session (a no-op when none is active)."""

    def wrap(fn):
        fn_name = name if name is not None else fn.__name__
        try:
            src = source_file if source_file is not None else inspect.getsourcefile(fn) or "<unknown>"
            lineno = line if line is not None else inspect.getsourcelines(fn)[1]
        except (OSError, TypeError):
            src, lineno = source_file or "<unknown>", line or 1
        params = list(inspect.signature(fn).parameters)
        fn_id = registry.register_function(
            fn_name, src, lineno, params[: len(arg_types)], arg_types, ret_type
        )

        @functools.wraps(fn)
        def wrapper(*args):
            session = _active_session
            if session is None:
                return fn(*args)
            table = session.schema.types
            encoded = tuple(encode_python(a, t, table) for a, t in zip(args, arg_types))
            guard = session.call(fn_id, encoded)
            try:
                result = fn(*args)
            except BaseException as exc:
                session.raise_exit(guard, values_mod.Str(str(exc).encode("utf-8")))
                raise
            session.ret(guard, encode_python(result, ret_type, table))
            return result

        wrapper.fn_id = fn_id
        return wrapper

    return wrap
