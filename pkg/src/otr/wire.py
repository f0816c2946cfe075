"""Compact binary trace stream: header, LEB128/zigzag primitives, events.

Layout (all multi-byte integers little-endian, varints LEB128):

  header   "OTRC" | u16 format version | u64 schema hash
  value    0x00 imm (zigzag varint) | 0x01 block (tag byte, varint count,
           fields) | 0x02 float (8-byte IEEE-754) | 0x03 str (varint length,
           bytes) | 0x04 opaque (0=function, 1=abstract)
  event    0x00 call (varint fn_id, varint argc, args, varint ts delta)
           0x01 return (value, varint ts delta)
           0x02 raise (value, varint ts delta)
           0x03 match (varint site_id, value, varint ts delta)

Timestamps are microseconds, delta-encoded against the previous event (the
first delta is from 0). Reading tolerates a stream that stops mid-event:
crashed programs leave readable prefixes, so truncation is reported as a
flag, never as an error. MalformedEvent means the bytes themselves are
invalid, which no clean truncation can produce.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

from . import schema as schema_mod
from .errors import (
    BadMagic,
    MalformedEvent,
    MalformedVarint,
    SchemaHashMismatch,
    UnsupportedVersion,
)
from .values import Block, EncodedValue, Float64, Immediate, Opaque, Str
from .values import OPAQUE_ABSTRACT, OPAQUE_FUNCTION

MAGIC = b"OTRC"
TRACE_FORMAT_VERSION = 1
HEADER_SIZE = 14

_U64_MASK = (1 << 64) - 1

_VALUE_IMMEDIATE = 0x00
_VALUE_BLOCK = 0x01
_VALUE_FLOAT = 0x02
_VALUE_STR = 0x03
_VALUE_OPAQUE = 0x04

_EVENT_CALL = 0x00
_EVENT_RETURN = 0x01
_EVENT_RAISE = 0x02
_EVENT_MATCH = 0x03

_OPAQUE_BYTE = {OPAQUE_FUNCTION: 0, OPAQUE_ABSTRACT: 1}
_OPAQUE_KIND = {0: OPAQUE_FUNCTION, 1: OPAQUE_ABSTRACT}


# --- events --------------------------------------------------------------------

class TraceEvent:
    __slots__ = ()


@dataclass(frozen=True)
class Call(TraceEvent):
    fn_id: int
    args: tuple[EncodedValue, ...]
    ts: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class Return(TraceEvent):
    value: EncodedValue
    ts: int


@dataclass(frozen=True)
class Raise(TraceEvent):
    exn: EncodedValue
    ts: int


@dataclass(frozen=True)
class Match(TraceEvent):
    site_id: int
    discriminee: EncodedValue
    ts: int


# --- varint / zigzag -------------------------------------------------------------

def zigzag(n: int) -> int:
    """Map a signed 64-bit int onto an unsigned one, small magnitudes first."""
    return ((n << 1) ^ (n >> 63)) & _U64_MASK


def unzigzag(u: int) -> int:
    return (u >> 1) ^ -(u & 1)


def write_varint(n: int) -> bytes:
    if not (0 <= n <= _U64_MASK):
        raise ValueError(f"varint out of unsigned 64-bit range: {n}")
    out = bytearray()
    while True:
        byte = n & 0x7F
        n >>= 7
        if n:
            out.append(byte | 0x80)
        else:
            out.append(byte)
            return bytes(out)


def read_varint(data: bytes, offset: int = 0) -> tuple[int, int]:
    """Decode one LEB128 varint; returns (value, next offset).

    Raises MalformedVarint past 10 bytes or on 64-bit overflow, IndexError
    if the buffer ends first (callers translate that into truncation).
    """
    result = 0
    for i in range(10):
        byte = data[offset + i]
        result |= (byte & 0x7F) << (7 * i)
        if not byte & 0x80:
            if result > _U64_MASK:
                raise MalformedVarint(f"varint overflows 64 bits at offset {offset}")
            return result, offset + i + 1
    raise MalformedVarint(f"varint longer than 10 bytes at offset {offset}")


# --- value codec ------------------------------------------------------------------

def encode_value(v: EncodedValue) -> bytes:
    if isinstance(v, Immediate):
        return bytes([_VALUE_IMMEDIATE]) + write_varint(zigzag(v.value))
    if isinstance(v, Block):
        out = bytearray([_VALUE_BLOCK, v.tag])
        out += write_varint(len(v.fields))
        for f in v.fields:
            out += encode_value(f)
        return bytes(out)
    if isinstance(v, Float64):
        return bytes([_VALUE_FLOAT]) + struct.pack("<d", v.value)
    if isinstance(v, Str):
        return bytes([_VALUE_STR]) + write_varint(len(v.data)) + v.data
    if isinstance(v, Opaque):
        return bytes([_VALUE_OPAQUE, _OPAQUE_BYTE[v.kind]])
    raise TypeError(f"not an EncodedValue: {v!r}")


class _Truncated(Exception):
    """Internal: the byte stream ended mid-item."""


class _Reader:
    def __init__(self, data: bytes, pos: int = 0) -> None:
        self.data = data
        self.pos = pos

    @property
    def eof(self) -> bool:
        return self.pos >= len(self.data)

    def read(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise _Truncated
        chunk = self.data[self.pos : self.pos + n]
        self.pos += n
        return chunk

    def byte(self) -> int:
        return self.read(1)[0]

    def varint(self) -> int:
        try:
            value, self.pos = read_varint(self.data, self.pos)
        except IndexError:
            raise _Truncated from None
        return value


def _read_value(r: _Reader) -> EncodedValue:
    kind = r.byte()
    if kind == _VALUE_IMMEDIATE:
        return Immediate(unzigzag(r.varint()))
    if kind == _VALUE_BLOCK:
        tag = r.byte()
        count = r.varint()
        return Block(tag, tuple(_read_value(r) for _ in range(count)))
    if kind == _VALUE_FLOAT:
        return Float64(struct.unpack("<d", r.read(8))[0])
    if kind == _VALUE_STR:
        return Str(r.read(r.varint()))
    if kind == _VALUE_OPAQUE:
        opaque = r.byte()
        if opaque not in _OPAQUE_KIND:
            raise MalformedEvent(f"bad opaque kind byte 0x{opaque:02x}")
        return Opaque(_OPAQUE_KIND[opaque])
    raise MalformedEvent(f"bad value kind byte 0x{kind:02x}")


def decode_value(data: bytes) -> EncodedValue:
    r = _Reader(data)
    try:
        v = _read_value(r)
    except _Truncated:
        raise MalformedEvent("value bytes end prematurely") from None
    if not r.eof:
        raise MalformedEvent(f"{len(data) - r.pos} trailing bytes after value")
    return v


# --- event codec -------------------------------------------------------------------

def encode_event(e: TraceEvent, prev_ts: int) -> bytes:
    if e.ts < prev_ts:
        raise ValueError(f"timestamp regression: {e.ts} after {prev_ts}")
    delta = write_varint(e.ts - prev_ts)
    if isinstance(e, Call):
        out = bytearray([_EVENT_CALL])
        out += write_varint(e.fn_id)
        out += write_varint(len(e.args))
        for a in e.args:
            out += encode_value(a)
        return bytes(out) + delta
    if isinstance(e, Return):
        return bytes([_EVENT_RETURN]) + encode_value(e.value) + delta
    if isinstance(e, Raise):
        return bytes([_EVENT_RAISE]) + encode_value(e.exn) + delta
    if isinstance(e, Match):
        return bytes([_EVENT_MATCH]) + write_varint(e.site_id) + encode_value(e.discriminee) + delta
    raise TypeError(f"not a TraceEvent: {e!r}")


def _read_event(r: _Reader, prev_ts: int) -> TraceEvent:
    kind = r.byte()
    if kind == _EVENT_CALL:
        fn_id = r.varint()
        argc = r.varint()
        args = tuple(_read_value(r) for _ in range(argc))
        return Call(fn_id, args, prev_ts + r.varint())
    if kind == _EVENT_RETURN:
        value = _read_value(r)
        return Return(value, prev_ts + r.varint())
    if kind == _EVENT_RAISE:
        exn = _read_value(r)
        return Raise(exn, prev_ts + r.varint())
    if kind == _EVENT_MATCH:
        site_id = r.varint()
        discriminee = _read_value(r)
        return Match(site_id, discriminee, prev_ts + r.varint())
    raise MalformedEvent(f"bad event kind byte 0x{kind:02x}")


# --- stream writer / reader ----------------------------------------------------------

def encode_header(schema_hash: int) -> bytes:
    return MAGIC + struct.pack("<H", TRACE_FORMAT_VERSION) + struct.pack("<Q", schema_hash)


class TraceWriter:
    """Appends a header and delta-timestamped events to a binary stream."""

    def __init__(self, stream, schema_hash: int) -> None:
        self._stream = stream
        self._last_ts = 0
        stream.write(encode_header(schema_hash))

    def write_event(self, e: TraceEvent) -> None:
        self._stream.write(encode_event(e, self._last_ts))
        self._last_ts = e.ts


def write_trace(path, schema_hash: int, events) -> None:
    with open(path, "wb") as f:
        w = TraceWriter(f, schema_hash)
        for e in events:
            w.write_event(e)


def read_trace(path, schema: schema_mod.Schema) -> tuple[list[TraceEvent], bool]:
    """Read and validate a trace against its schema sidecar.

    Returns (events, truncated). truncated is set when the stream stops
    mid-event or leaves frames unclosed; both are expected after a crash.
    """
    with open(path, "rb") as f:
        return read_trace_bytes(f.read(), schema)


def read_trace_bytes(data: bytes, schema: schema_mod.Schema) -> tuple[list[TraceEvent], bool]:
    if data[:4] != MAGIC:
        raise BadMagic(f"bad magic {data[:4]!r}")
    if len(data) < HEADER_SIZE:
        raise MalformedEvent("truncated header")
    (version,) = struct.unpack_from("<H", data, 4)
    if version != TRACE_FORMAT_VERSION:
        raise UnsupportedVersion(f"trace format version {version} not supported")
    (found_hash,) = struct.unpack_from("<Q", data, 6)
    expected_hash = schema_mod.schema_hash(schema)
    if found_hash != expected_hash:
        raise SchemaHashMismatch(
            f"trace was recorded against schema {found_hash:#018x}, "
            f"sidecar hashes to {expected_hash:#018x}"
        )

    r = _Reader(data, HEADER_SIZE)
    events: list[TraceEvent] = []
    truncated = False
    depth = 0
    ts = 0
    while not r.eof:
        try:
            e = _read_event(r, ts)
        except _Truncated:
            truncated = True
            break
        events.append(e)
        ts = e.ts
        if isinstance(e, Call):
            depth += 1
        elif isinstance(e, (Return, Raise)) and depth > 0:
            depth -= 1
    return events, truncated or depth > 0
