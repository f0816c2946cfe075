import random

import pytest
from hypothesis import given, strategies as st

import randgen
from otr import schema as schema_mod
from otr.errors import (
    BadMagic,
    MalformedEvent,
    MalformedVarint,
    SchemaHashMismatch,
    UnsupportedVersion,
)
from otr.schema import SchemaRegistry
from otr.values import Block, Float64, Immediate, Opaque, Str
from otr.wire import (
    Call,
    HEADER_SIZE,
    Match,
    Raise,
    Return,
    TraceWriter,
    decode_value,
    encode_event,
    encode_header,
    encode_value,
    read_trace_bytes,
    read_varint,
    unzigzag,
    write_trace,
    write_varint,
    zigzag,
)

U64_MAX = 2**64 - 1
I64_MIN, I64_MAX = -(2**63), 2**63 - 1


def tiny_schema():
    reg = SchemaRegistry()
    from otr.values import Int

    id_int = reg.add_type(Int())
    reg.register_function("f", "x.py", 1, ("n",), (id_int,), id_int)
    reg.register_function("g", "x.py", 2, ("n",), (id_int,), id_int)
    reg.register_function("h", "x.py", 3, ("n",), (id_int,), id_int)
    reg.register_match_site("x.py", 4, id_int)
    reg.register_match_site("x.py", 5, id_int)
    return reg.finalize()


class TestVarint:
    @pytest.mark.parametrize(
        "n,expected",
        [
            (0, b"\x00"),
            (1, b"\x01"),
            (127, b"\x7f"),
            (128, b"\x80\x01"),
            (300, b"\xac\x02"),
            (624485, b"\xe5\x8e\x26"),
            (U64_MAX, b"\xff" * 9 + b"\x01"),
        ],
    )
    def test_known_encodings(self, n, expected):
        assert write_varint(n) == expected
        assert read_varint(expected) == (n, len(expected))

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            write_varint(-1)
        with pytest.raises(ValueError):
            write_varint(U64_MAX + 1)

    def test_too_long_is_malformed(self):
        with pytest.raises(MalformedVarint):
            read_varint(b"\x80" * 10 + b"\x01")

    def test_overflow_is_malformed(self):
        with pytest.raises(MalformedVarint):
            read_varint(b"\xff" * 9 + b"\x02")

    @given(st.integers(min_value=0, max_value=U64_MAX))
    def test_roundtrip(self, n):
        assert read_varint(write_varint(n)) == (n, len(write_varint(n)))


class TestZigzag:
    @pytest.mark.parametrize(
        "n,expected", [(0, 0), (-1, 1), (1, 2), (-2, 3), (2, 4), (I64_MIN, U64_MAX), (I64_MAX, U64_MAX - 1)]
    )
    def test_known_values(self, n, expected):
        assert zigzag(n) == expected
        assert unzigzag(expected) == n

    @given(st.integers(min_value=I64_MIN, max_value=I64_MAX))
    def test_roundtrip(self, n):
        assert unzigzag(zigzag(n)) == n
        assert 0 <= zigzag(n) <= U64_MAX


class TestValueCodec:
    @pytest.mark.parametrize(
        "value,expected",
        [
            (Immediate(0), b"\x00\x00"),
            (Immediate(1), b"\x00\x02"),
            (Immediate(-1), b"\x00\x01"),
            (Block(0, (Immediate(1),)), b"\x01\x00\x01\x00\x02"),
            (Str(b"x"), b"\x03\x01x"),
            (Opaque("function"), b"\x04\x00"),
            (Opaque("abstract"), b"\x04\x01"),
        ],
    )
    def test_known_encodings(self, value, expected):
        assert encode_value(value) == expected
        assert decode_value(expected) == value

    def test_float_is_eight_le_bytes(self):
        raw = encode_value(Float64(1.0))
        assert raw == b"\x02\x00\x00\x00\x00\x00\x00\xf0\x3f"
        assert decode_value(raw) == Float64(1.0)

    def test_random_roundtrip(self):
        rng = random.Random(5)
        for _ in range(500):
            v = randgen.random_encoded(rng)
            assert decode_value(encode_value(v)) == v

    def test_bad_kind_byte(self):
        with pytest.raises(MalformedEvent):
            decode_value(b"\x07")

    def test_bad_opaque_byte(self):
        with pytest.raises(MalformedEvent):
            decode_value(b"\x04\x02")

    def test_trailing_bytes_rejected(self):
        with pytest.raises(MalformedEvent):
            decode_value(b"\x00\x00\x00")

    def test_premature_end_rejected(self):
        with pytest.raises(MalformedEvent):
            decode_value(b"\x01\x00\x02\x00\x02")  # block promises 2 fields, has 1


class TestEventLayout:
    def test_call_then_return_byte_layout(self):
        # Call(fn 0, [Imm 1], ts 10) then Return(Imm 0, ts 25): the second
        # delta is 15 and each delta trails its event payload.
        call = encode_event(Call(0, (Immediate(1),), 10), 0)
        ret = encode_event(Return(Immediate(0), 25), 10)
        assert call == b"\x00" + b"\x00" + b"\x01" + b"\x00\x02" + b"\x0a"
        assert ret == b"\x01" + b"\x00\x00" + b"\x0f"

    def test_match_layout(self):
        raw = encode_event(Match(1, Immediate(0), 7), 7)
        assert raw == b"\x03" + b"\x01" + b"\x00\x00" + b"\x00"

    def test_timestamp_regression_rejected(self):
        with pytest.raises(ValueError):
            encode_event(Return(Immediate(0), 5), 10)


class TestStream:
    def test_header_layout(self):
        raw = encode_header(0x1122334455667788)
        assert raw[:4] == b"OTRC"
        assert raw[4:6] == b"\x01\x00"
        assert raw[6:] == b"\x88\x77\x66\x55\x44\x33\x22\x11"
        assert len(raw) == HEADER_SIZE

    def test_empty_event_section(self):
        schema = tiny_schema()
        data = encode_header(schema_mod.schema_hash(schema))
        assert read_trace_bytes(data, schema) == ([], False)

    def test_bad_magic(self):
        with pytest.raises(BadMagic):
            read_trace_bytes(b"NOPE" + b"\x00" * 10, tiny_schema())
        with pytest.raises(BadMagic):
            read_trace_bytes(b"OT", tiny_schema())

    def test_unsupported_version(self):
        schema = tiny_schema()
        data = bytearray(encode_header(schema_mod.schema_hash(schema)))
        data[4] = 9
        with pytest.raises(UnsupportedVersion):
            read_trace_bytes(bytes(data), schema)

    def test_schema_hash_mismatch(self):
        schema = tiny_schema()
        with pytest.raises(SchemaHashMismatch):
            read_trace_bytes(encode_header(12345), schema)

    def test_truncated_header(self):
        with pytest.raises(MalformedEvent):
            read_trace_bytes(b"OTRC\x01\x00", tiny_schema())

    def test_bad_event_kind_is_malformed(self):
        schema = tiny_schema()
        data = encode_header(schema_mod.schema_hash(schema)) + b"\x2a"
        with pytest.raises(MalformedEvent):
            read_trace_bytes(data, schema)

    def test_write_read_roundtrip_random_streams(self, tmp_path):
        schema = tiny_schema()
        rng = random.Random(11)
        path = tmp_path / "t.trace"
        for i in range(60):
            events = randgen.well_nested_events(rng)
            write_trace(path, schema_mod.schema_hash(schema), events)
            got, truncated = (
                read_trace_bytes(path.read_bytes(), schema)
            )
            assert got == events
            assert not truncated
            assert all(b.ts <= a.ts for b, a in zip(got, got[1:]))

    def test_unclosed_frames_flag_truncation(self):
        schema = tiny_schema()
        events = [Call(0, (), 1), Call(1, (), 2), Return(Immediate(0), 3)]
        data = encode_header(schema_mod.schema_hash(schema))
        prev = 0
        for e in events:
            data += encode_event(e, prev)
            prev = e.ts
        got, truncated = read_trace_bytes(data, schema)
        assert got == events
        assert truncated

    def test_every_byte_truncation_is_readable(self):
        # Chopping any suffix must never crash or report MalformedEvent.
        schema = tiny_schema()
        rng = random.Random(3)
        events = randgen.well_nested_events(rng)
        while not events:
            events = randgen.well_nested_events(rng)
        data = encode_header(schema_mod.schema_hash(schema))
        prev = 0
        for e in events:
            data += encode_event(e, prev)
            prev = e.ts
        for cut in range(HEADER_SIZE, len(data)):
            got, truncated = read_trace_bytes(data[:cut], schema)
            assert len(got) <= len(events)
            assert got == events[: len(got)]

    def test_writer_appends_to_stream(self, tmp_path):
        schema = tiny_schema()
        path = tmp_path / "w.trace"
        with open(path, "wb") as f:
            w = TraceWriter(f, schema_mod.schema_hash(schema))
            w.write_event(Call(0, (Immediate(5),), 10))
            w.write_event(Return(Immediate(6), 25))
        events, truncated = read_trace_bytes(path.read_bytes(), schema)
        assert events == [Call(0, (Immediate(5),), 10), Return(Immediate(6), 25)]
        assert not truncated
