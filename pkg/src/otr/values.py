"""Untyped value encoding, type descriptors, and schema-driven decoding.

Runtime values are recorded in a uniform representation that keeps only
constructor tags, the way a compiled functional program would lay them out
in memory: small immediates for ints/bools/chars/constant constructors,
tagged blocks for tuples/records/cons cells/non-constant constructors, plus
boxed floats, byte strings, and opaque placeholders for unserializable
values. The representation deliberately loses type identity -- ``Some 1``
and ``Ok 1`` encode to the same bytes -- so interpretation needs a
TypeDescriptor, looked up in a TypeTable by type-id.

Constructor numbering follows the constant/non-constant split: constant
constructors are numbered 0..k-1 among themselves and become immediates,
non-constant constructors are numbered 0..m-1 among themselves and become
block tags. That split is exactly what makes distinct types share
representations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import (
    ArityMismatch,
    BoolOutOfRange,
    CharOutOfRange,
    KindMismatch,
    TagOutOfRange,
    UnknownConstructor,
    UnknownTypeId,
)

INT64_MIN = -(1 << 63)
INT64_MAX = (1 << 63) - 1

OPAQUE_FUNCTION = "function"
OPAQUE_ABSTRACT = "abstract"


# --- encoded (untyped) values ------------------------------------------------

class EncodedValue:
    """Base for the untyped runtime-representation-like values."""

    __slots__ = ()


@dataclass(frozen=True)
class Immediate(EncodedValue):
    value: int

    def __post_init__(self) -> None:
        if not (INT64_MIN <= self.value <= INT64_MAX):
            raise ValueError(f"immediate out of signed 64-bit range: {self.value}")


@dataclass(frozen=True)
class Block(EncodedValue):
    tag: int
    fields: tuple[EncodedValue, ...]

    def __post_init__(self) -> None:
        if not (0 <= self.tag <= 255):
            raise ValueError(f"block tag out of range: {self.tag}")
        object.__setattr__(self, "fields", tuple(self.fields))


@dataclass(frozen=True)
class Float64(EncodedValue):
    value: float


@dataclass(frozen=True)
class Str(EncodedValue):
    data: bytes


@dataclass(frozen=True)
class Opaque(EncodedValue):
    kind: str  # OPAQUE_FUNCTION or OPAQUE_ABSTRACT

    def __post_init__(self) -> None:
        if self.kind not in (OPAQUE_FUNCTION, OPAQUE_ABSTRACT):
            raise ValueError(f"bad opaque kind: {self.kind!r}")


# --- type descriptors ----------------------------------------------------------

class TypeDescriptor:
    __slots__ = ()


@dataclass(frozen=True)
class Unit(TypeDescriptor):
    pass


@dataclass(frozen=True)
class Bool(TypeDescriptor):
    pass


@dataclass(frozen=True)
class Int(TypeDescriptor):
    pass


@dataclass(frozen=True)
class Char(TypeDescriptor):
    pass


@dataclass(frozen=True)
class Float(TypeDescriptor):
    pass


@dataclass(frozen=True)
class String(TypeDescriptor):
    pass


@dataclass(frozen=True)
class Func(TypeDescriptor):
    pass


@dataclass(frozen=True)
class Tuple(TypeDescriptor):
    elements: tuple[int, ...]  # type-ids, arity >= 2

    def __post_init__(self) -> None:
        object.__setattr__(self, "elements", tuple(self.elements))
        if len(self.elements) < 2:
            raise ValueError("tuple descriptor needs arity >= 2")


@dataclass(frozen=True)
class ListOf(TypeDescriptor):
    element: int  # type-id


@dataclass(frozen=True)
class Record(TypeDescriptor):
    name: str
    fields: tuple[tuple[str, int], ...]  # ordered (field name, type-id)

    def __post_init__(self) -> None:
        object.__setattr__(self, "fields", tuple((n, t) for n, t in self.fields))
        if not self.fields:
            raise ValueError("record descriptor needs >= 1 field")
        names = [n for n, _ in self.fields]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate record field in {self.name!r}")


@dataclass(frozen=True)
class Variant(TypeDescriptor):
    name: str
    constructors: tuple[tuple[str, tuple[int, ...]], ...]  # ordered (ctor, arg type-ids)

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "constructors", tuple((n, tuple(a)) for n, a in self.constructors)
        )
        if not self.constructors:
            raise ValueError(f"variant {self.name!r} needs >= 1 constructor")
        names = [n for n, _ in self.constructors]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate constructor in {self.name!r}")

    def constant_constructors(self) -> list[str]:
        return [n for n, args in self.constructors if not args]

    def block_constructors(self) -> list[tuple[str, tuple[int, ...]]]:
        return [(n, args) for n, args in self.constructors if args]


def _referenced_ids(desc: TypeDescriptor) -> list[int]:
    if isinstance(desc, Tuple):
        return list(desc.elements)
    if isinstance(desc, ListOf):
        return [desc.element]
    if isinstance(desc, Record):
        return [t for _, t in desc.fields]
    if isinstance(desc, Variant):
        return [t for _, args in desc.constructors for t in args]
    return []


class TypeTable:
    """Dense sequence of TypeDescriptor indexed by type-id 0..n-1.

    Construction validates that every referenced type-id is defined, so a
    table in hand is always safe to decode against.
    """

    def __init__(self, descriptors) -> None:
        self._descriptors: tuple[TypeDescriptor, ...] = tuple(descriptors)
        for i, desc in enumerate(self._descriptors):
            for ref in _referenced_ids(desc):
                if not (0 <= ref < len(self._descriptors)):
                    raise UnknownTypeId(
                        f"type-id {i} references undefined type-id {ref}"
                    )

    def __len__(self) -> int:
        return len(self._descriptors)

    def __iter__(self):
        return iter(self._descriptors)

    def __getitem__(self, type_id: int) -> TypeDescriptor:
        if not (0 <= type_id < len(self._descriptors)):
            raise UnknownTypeId(f"type-id {type_id} not defined (table size {len(self)})")
        return self._descriptors[type_id]

    def __eq__(self, other) -> bool:
        return isinstance(other, TypeTable) and self._descriptors == other._descriptors

    def __repr__(self) -> str:
        return f"TypeTable({list(self._descriptors)!r})"


# --- decoded (typed) values ----------------------------------------------------

class TypedValue:
    __slots__ = ()


@dataclass(frozen=True)
class UnitV(TypedValue):
    pass


@dataclass(frozen=True)
class BoolV(TypedValue):
    value: bool


@dataclass(frozen=True)
class IntV(TypedValue):
    value: int


@dataclass(frozen=True)
class CharV(TypedValue):
    value: str  # single char, code point < 256

    def __post_init__(self) -> None:
        if len(self.value) != 1 or ord(self.value) > 255:
            raise ValueError(f"bad char: {self.value!r}")


@dataclass(frozen=True)
class FloatV(TypedValue):
    value: float


@dataclass(frozen=True)
class StringV(TypedValue):
    data: bytes


@dataclass(frozen=True)
class TupleV(TypedValue):
    items: tuple[TypedValue, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "items", tuple(self.items))


@dataclass(frozen=True)
class ListV(TypedValue):
    items: tuple[TypedValue, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "items", tuple(self.items))


@dataclass(frozen=True)
class RecordV(TypedValue):
    fields: tuple[tuple[str, TypedValue], ...]  # descriptor field order

    def __post_init__(self) -> None:
        object.__setattr__(self, "fields", tuple((n, v) for n, v in self.fields))


@dataclass(frozen=True)
class CtorV(TypedValue):
    name: str
    args: tuple[TypedValue, ...] = field(default=())

    def __post_init__(self) -> None:
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class OpaqueV(TypedValue):
    kind: str


# --- encoding ------------------------------------------------------------------

def encode_constructor(variant: Variant, ctor_name: str, args) -> EncodedValue:
    """Encode one constructor application under the numbering rule.

    Constant constructors become Immediate(index among constant
    constructors); the rest become Block(index among non-constant
    constructors, args).
    """
    args = tuple(args)
    for name, arg_types in variant.constructors:
        if name == ctor_name:
            if len(args) != len(arg_types):
                raise ArityMismatch(
                    f"{variant.name}.{ctor_name} takes {len(arg_types)} args, got {len(args)}"
                )
            if not arg_types:
                return Immediate(variant.constant_constructors().index(ctor_name))
            tag = [n for n, _ in variant.block_constructors()].index(ctor_name)
            return Block(tag, args)
    raise UnknownConstructor(f"{ctor_name!r} not in variant {variant.name!r}")


def encode_list(items) -> EncodedValue:
    """Encode a list as cons cells: [] is Immediate 0, x :: rest is Block{0, [x, rest]}."""
    acc: EncodedValue = Immediate(0)
    for item in reversed(tuple(items)):
        acc = Block(0, (item, acc))
    return acc


def encode_typed(tv: TypedValue, type_id: int, table: TypeTable) -> EncodedValue:
    """Encode a decoded value back to its untyped form (composition of the
    encode helpers; inverse of decode)."""
    desc = table[type_id]
    if isinstance(desc, Unit):
        _expect(tv, UnitV, desc)
        return Immediate(0)
    if isinstance(desc, Bool):
        _expect(tv, BoolV, desc)
        return Immediate(int(tv.value))
    if isinstance(desc, Int):
        _expect(tv, IntV, desc)
        return Immediate(tv.value)
    if isinstance(desc, Char):
        _expect(tv, CharV, desc)
        return Immediate(ord(tv.value))
    if isinstance(desc, Float):
        _expect(tv, FloatV, desc)
        return Float64(tv.value)
    if isinstance(desc, String):
        _expect(tv, StringV, desc)
        return Str(tv.data)
    if isinstance(desc, Func):
        _expect(tv, OpaqueV, desc)
        return Opaque(tv.kind)
    if isinstance(desc, Tuple):
        _expect(tv, TupleV, desc)
        if len(tv.items) != len(desc.elements):
            raise ArityMismatch(f"tuple arity {len(desc.elements)}, got {len(tv.items)}")
        return Block(0, tuple(encode_typed(x, t, table) for x, t in zip(tv.items, desc.elements)))
    if isinstance(desc, ListOf):
        _expect(tv, ListV, desc)
        return encode_list(encode_typed(x, desc.element, table) for x in tv.items)
    if isinstance(desc, Record):
        _expect(tv, RecordV, desc)
        if tuple(n for n, _ in tv.fields) != tuple(n for n, _ in desc.fields):
            raise KindMismatch(f"record fields do not match descriptor {desc.name!r}")
        return Block(
            0,
            tuple(encode_typed(v, t, table) for (_, v), (_, t) in zip(tv.fields, desc.fields)),
        )
    if isinstance(desc, Variant):
        _expect(tv, CtorV, desc)
        for name, arg_types in desc.constructors:
            if name == tv.name:
                if len(tv.args) != len(arg_types):
                    raise ArityMismatch(f"{desc.name}.{name} arity {len(arg_types)}")
                args = tuple(encode_typed(a, t, table) for a, t in zip(tv.args, arg_types))
                return encode_constructor(desc, name, args)
        raise UnknownConstructor(f"{tv.name!r} not in variant {desc.name!r}")
    raise KindMismatch(f"unhandled descriptor {desc!r}")


def _expect(tv: TypedValue, cls, desc: TypeDescriptor) -> None:
    if not isinstance(tv, cls):
        raise KindMismatch(f"{type(tv).__name__} does not fit descriptor {desc!r}")


# --- decoding --------------------------------------------------------------------

def decode(v: EncodedValue, type_id: int, table: TypeTable) -> TypedValue:
    """Interpret an untyped value against a descriptor.

    Total over well-formed inputs: either returns a TypedValue or raises one
    of DECODE_ERRORS. A raised error means the trace and the schema disagree.
    """
    desc = table[type_id]

    if isinstance(desc, Unit):
        k = _immediate(v, desc)
        if k != 0:
            raise TagOutOfRange(f"unit must be immediate 0, got {k}")
        return UnitV()

    if isinstance(desc, Bool):
        k = _immediate(v, desc)
        if k not in (0, 1):
            raise BoolOutOfRange(f"bool must be immediate 0/1, got {k}")
        return BoolV(bool(k))

    if isinstance(desc, Int):
        return IntV(_immediate(v, desc))

    if isinstance(desc, Char):
        k = _immediate(v, desc)
        if not (0 <= k <= 255):
            raise CharOutOfRange(f"char immediate out of [0, 255]: {k}")
        return CharV(chr(k))

    if isinstance(desc, Float):
        if not isinstance(v, Float64):
            raise KindMismatch(f"{_kind_name(v)} where float expected")
        return FloatV(v.value)

    if isinstance(desc, String):
        if not isinstance(v, Str):
            raise KindMismatch(f"{_kind_name(v)} where string expected")
        return StringV(v.data)

    if isinstance(desc, Func):
        if not isinstance(v, Opaque):
            raise KindMismatch(f"{_kind_name(v)} where function expected")
        return OpaqueV(v.kind)

    if isinstance(desc, Tuple):
        fields = _block_fields(v, desc, len(desc.elements))
        return TupleV(tuple(decode(f, t, table) for f, t in zip(fields, desc.elements)))

    if isinstance(desc, ListOf):
        # Cons chains can be long; walk them iteratively.
        items = []
        while True:
            if isinstance(v, Immediate):
                if v.value != 0:
                    raise TagOutOfRange(f"list nil must be immediate 0, got {v.value}")
                return ListV(tuple(items))
            if isinstance(v, Block):
                if v.tag != 0:
                    raise TagOutOfRange(f"cons cell must have tag 0, got {v.tag}")
                if len(v.fields) != 2:
                    raise ArityMismatch(f"cons cell must have 2 fields, got {len(v.fields)}")
                items.append(decode(v.fields[0], desc.element, table))
                v = v.fields[1]
                continue
            raise KindMismatch(f"{_kind_name(v)} where list expected")

    if isinstance(desc, Record):
        fields = _block_fields(v, desc, len(desc.fields))
        return RecordV(
            tuple((n, decode(f, t, table)) for f, (n, t) in zip(fields, desc.fields))
        )

    if isinstance(desc, Variant):
        if isinstance(v, Immediate):
            constants = desc.constant_constructors()
            if not (0 <= v.value < len(constants)):
                raise TagOutOfRange(
                    f"{desc.name!r} has {len(constants)} constant constructors, got index {v.value}"
                )
            return CtorV(constants[v.value], ())
        if isinstance(v, Block):
            blocks = desc.block_constructors()
            if v.tag >= len(blocks):
                raise TagOutOfRange(
                    f"{desc.name!r} has {len(blocks)} non-constant constructors, got tag {v.tag}"
                )
            name, arg_types = blocks[v.tag]
            if len(v.fields) != len(arg_types):
                raise ArityMismatch(
                    f"{desc.name}.{name} takes {len(arg_types)} args, block has {len(v.fields)}"
                )
            return CtorV(name, tuple(decode(f, t, table) for f, t in zip(v.fields, arg_types)))
        raise KindMismatch(f"{_kind_name(v)} where variant {desc.name!r} expected")

    raise KindMismatch(f"unhandled descriptor {desc!r}")


def _immediate(v: EncodedValue, desc: TypeDescriptor) -> int:
    if not isinstance(v, Immediate):
        raise KindMismatch(f"{_kind_name(v)} where immediate expected for {desc!r}")
    return v.value


def _block_fields(v: EncodedValue, desc: TypeDescriptor, arity: int) -> tuple:
    if not isinstance(v, Block):
        raise KindMismatch(f"{_kind_name(v)} where block expected for {desc!r}")
    if v.tag != 0:
        raise TagOutOfRange(f"{desc!r} expects tag 0, got {v.tag}")
    if len(v.fields) != arity:
        raise ArityMismatch(f"{desc!r} expects {arity} fields, got {len(v.fields)}")
    return v.fields


def _kind_name(v: EncodedValue) -> str:
    return type(v).__name__.lower()


# --- rendering ---------------------------------------------------------------------

def render(tv: TypedValue) -> str:
    """Deterministic source-like text for a decoded value."""
    if isinstance(tv, UnitV):
        return "()"
    if isinstance(tv, BoolV):
        return "true" if tv.value else "false"
    if isinstance(tv, IntV):
        return str(tv.value)
    if isinstance(tv, CharV):
        return "'" + _escape_char(tv.value) + "'"
    if isinstance(tv, FloatV):
        return _render_float(tv.value)
    if isinstance(tv, StringV):
        return '"' + _escape_bytes(tv.data) + '"'
    if isinstance(tv, TupleV):
        return "(" + ", ".join(render(x) for x in tv.items) + ")"
    if isinstance(tv, ListV):
        return "[" + "; ".join(render(x) for x in tv.items) + "]"
    if isinstance(tv, RecordV):
        return "{ " + "; ".join(f"{n} = {render(v)}" for n, v in tv.fields) + " }"
    if isinstance(tv, CtorV):
        if not tv.args:
            return tv.name
        if len(tv.args) == 1:
            return f"{tv.name} {render_arg(tv.args[0])}"
        return tv.name + " (" + ", ".join(render(x) for x in tv.args) + ")"
    if isinstance(tv, OpaqueV):
        return "<fun>" if tv.kind == OPAQUE_FUNCTION else "<abstr>"
    raise TypeError(f"not a TypedValue: {tv!r}")


def render_arg(tv: TypedValue) -> str:
    """Render in argument (juxtaposition) position, parenthesizing where the
    plain text would be ambiguous: constructor applications and negatives."""
    text = render(tv)
    needs = (isinstance(tv, CtorV) and bool(tv.args)) or text.startswith("-")
    return f"({text})" if needs else text


def render_untyped(v: EncodedValue) -> str:
    """Best-effort rendering for values with no descriptor (exception payloads)."""
    if isinstance(v, Immediate):
        return str(v.value)
    if isinstance(v, Float64):
        return _render_float(v.value)
    if isinstance(v, Str):
        return '"' + _escape_bytes(v.data) + '"'
    if isinstance(v, Block):
        inner = ", ".join(render_untyped(f) for f in v.fields)
        return f"<block {v.tag}: {inner}>" if inner else f"<block {v.tag}>"
    if isinstance(v, Opaque):
        return "<fun>" if v.kind == OPAQUE_FUNCTION else "<abstr>"
    raise TypeError(f"not an EncodedValue: {v!r}")


def _render_float(x: float) -> str:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    text = repr(x)  # shortest round-trip decimal
    return text[:-1] if text.endswith(".0") else text


def _escape_bytes(data: bytes) -> str:
    text = data.decode("utf-8", errors="surrogateescape")
    return "".join(_escape(ch, '"') for ch in text)


def _escape_char(ch: str) -> str:
    return _escape(ch, "'")


def _escape(ch: str, quote: str) -> str:
    if ch == "\n":
        return "\\n"
    if ch == "\t":
        return "\\t"
    if ch == "\\":
        return "\\\\"
    if ch == quote:
        return "\\" + quote
    o = ord(ch)
    if 0xDC80 <= o <= 0xDCFF:  # surrogateescape stand-in for an invalid byte
        return f"\\x{o - 0xDC00:02x}"
    if o < 0x20 or o == 0x7F:
        return f"\\x{o:02x}"
    return ch
