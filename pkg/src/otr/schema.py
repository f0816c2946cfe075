"""Schema sidecar: the metadata needed to interpret a binary trace.

A Schema maps type-ids to descriptors and fn/match-site ids to names,
locations, and signatures. It serializes to canonical JSON (sorted keys, no
insignificant whitespace, arrays in id order) so that its FNV-1a hash is
stable; the trace header embeds that hash so readers can refuse a
mismatched sidecar.

Registration is two-phase: declare_type reserves an id, define_type
installs the descriptor. That is what lets recursive types (a rose tree
holding a list of itself) reference their own id before it is defined.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from . import values
from .errors import (
    ArityMismatch,
    DoubleDefine,
    IoFailure,
    MalformedSchema,
    UndefinedAtFinalize,
    UnknownFunction,
    UnknownFunctionName,
    UnknownSite,
    UnknownTypeId,
)
from .values import TypeDescriptor, TypeTable

SCHEMA_FORMAT_VERSION = 1

FNV_OFFSET_BASIS = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3


@dataclass(frozen=True)
class FunctionInfo:
    fn_id: int
    name: str
    source_file: str
    line: int
    arg_names: tuple[str, ...]
    arg_type_ids: tuple[int, ...]
    ret_type_id: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "arg_names", tuple(self.arg_names))
        object.__setattr__(self, "arg_type_ids", tuple(self.arg_type_ids))
        if len(self.arg_names) != len(self.arg_type_ids):
            raise ArityMismatch(
                f"function {self.name!r}: {len(self.arg_names)} arg names "
                f"vs {len(self.arg_type_ids)} arg types"
            )
        if self.line < 1:
            raise MalformedSchema(f"function {self.name!r}: line must be positive")

    @property
    def location(self) -> str:
        return f"{self.source_file}:{self.line}"


@dataclass(frozen=True)
class MatchSiteInfo:
    site_id: int
    source_file: str
    line: int
    scrutinee_type_id: int

    @property
    def location(self) -> str:
        return f"{self.source_file}:{self.line}"


@dataclass(frozen=True)
class Schema:
    types: TypeTable
    functions: tuple[FunctionInfo, ...]
    match_sites: tuple[MatchSiteInfo, ...]
    format_version: int = SCHEMA_FORMAT_VERSION

    def __post_init__(self) -> None:
        object.__setattr__(self, "functions", tuple(self.functions))
        object.__setattr__(self, "match_sites", tuple(self.match_sites))
        for i, fn in enumerate(self.functions):
            if fn.fn_id != i:
                raise MalformedSchema(f"fn_ids not dense: expected {i}, got {fn.fn_id}")
            for t in (*fn.arg_type_ids, fn.ret_type_id):
                self._check_type_id(t, f"function {fn.name!r}")
        for i, site in enumerate(self.match_sites):
            if site.site_id != i:
                raise MalformedSchema(f"site_ids not dense: expected {i}, got {site.site_id}")
            self._check_type_id(site.scrutinee_type_id, f"match site {i}")

    def _check_type_id(self, type_id: int, who: str) -> None:
        if not (0 <= type_id < len(self.types)):
            raise MalformedSchema(f"{who} references undefined type-id {type_id}")

    def function(self, fn_id: int) -> FunctionInfo:
        if not (0 <= fn_id < len(self.functions)):
            raise UnknownFunction(f"no function with fn_id {fn_id}")
        return self.functions[fn_id]

    def function_named(self, name: str) -> FunctionInfo:
        for fn in self.functions:
            if fn.name == name:
                return fn
        raise UnknownFunctionName(f"no registered function named {name!r}")

    def match_site(self, site_id: int) -> MatchSiteInfo:
        if not (0 <= site_id < len(self.match_sites)):
            raise UnknownSite(f"no match site with site_id {site_id}")
        return self.match_sites[site_id]


class SchemaRegistry:
    """Single-writer builder for a Schema, used during program startup."""

    def __init__(self) -> None:
        self._types: list[TypeDescriptor | None] = []
        self._functions: list[FunctionInfo] = []
        self._match_sites: list[MatchSiteInfo] = []

    def declare_type(self) -> int:
        self._types.append(None)
        return len(self._types) - 1

    def define_type(self, type_id: int, body: TypeDescriptor) -> None:
        self._check_declared(type_id)
        if self._types[type_id] is not None:
            raise DoubleDefine(f"type-id {type_id} already defined")
        for ref in values._referenced_ids(body):
            self._check_declared(ref)
        self._types[type_id] = body

    def add_type(self, body: TypeDescriptor) -> int:
        """declare_type + define_type for the non-recursive case."""
        type_id = self.declare_type()
        self.define_type(type_id, body)
        return type_id

    def register_function(
        self,
        name: str,
        source_file: str,
        line: int,
        arg_names,
        arg_type_ids,
        ret_type_id: int,
    ) -> int:
        arg_type_ids = tuple(arg_type_ids)
        for t in (*arg_type_ids, ret_type_id):
            self._check_declared(t)
        fn_id = len(self._functions)
        self._functions.append(
            FunctionInfo(fn_id, name, source_file, line, tuple(arg_names), arg_type_ids, ret_type_id)
        )
        return fn_id

    def register_match_site(self, source_file: str, line: int, scrutinee_type_id: int) -> int:
        self._check_declared(scrutinee_type_id)
        site_id = len(self._match_sites)
        self._match_sites.append(MatchSiteInfo(site_id, source_file, line, scrutinee_type_id))
        return site_id

    def finalize(self) -> Schema:
        for type_id, body in enumerate(self._types):
            if body is None:
                raise UndefinedAtFinalize(f"type-id {type_id} declared but never defined")
        return Schema(
            types=TypeTable(self._types),
            functions=tuple(self._functions),
            match_sites=tuple(self._match_sites),
        )

    def _check_declared(self, type_id: int) -> None:
        if not (0 <= type_id < len(self._types)):
            raise UnknownTypeId(f"type-id {type_id} was never declared")


# --- canonical JSON ------------------------------------------------------------

_PRIMITIVES = {
    values.Unit: "unit",
    values.Bool: "bool",
    values.Int: "int",
    values.Char: "char",
    values.Float: "float",
    values.String: "string",
    values.Func: "func",
}
_PRIMITIVE_KINDS = {kind: cls for cls, kind in _PRIMITIVES.items()}


def descriptor_to_obj(desc: TypeDescriptor) -> dict:
    kind = _PRIMITIVES.get(type(desc))
    if kind is not None:
        return {"kind": kind}
    if isinstance(desc, values.Tuple):
        return {"kind": "tuple", "elements": list(desc.elements)}
    if isinstance(desc, values.ListOf):
        return {"kind": "list", "element": desc.element}
    if isinstance(desc, values.Record):
        return {"kind": "record", "name": desc.name, "fields": [[n, t] for n, t in desc.fields]}
    if isinstance(desc, values.Variant):
        return {
            "kind": "variant",
            "name": desc.name,
            "constructors": [[n, list(a)] for n, a in desc.constructors],
        }
    raise MalformedSchema(f"unhandled descriptor {desc!r}")


def descriptor_from_obj(obj) -> TypeDescriptor:
    try:
        kind = obj["kind"]
        if kind in _PRIMITIVE_KINDS:
            return _PRIMITIVE_KINDS[kind]()
        if kind == "tuple":
            return values.Tuple(tuple(_id(t) for t in obj["elements"]))
        if kind == "list":
            return values.ListOf(_id(obj["element"]))
        if kind == "record":
            return values.Record(
                _text(obj["name"]), tuple((_text(n), _id(t)) for n, t in obj["fields"])
            )
        if kind == "variant":
            return values.Variant(
                _text(obj["name"]),
                tuple((_text(n), tuple(_id(t) for t in a)) for n, a in obj["constructors"]),
            )
    except MalformedSchema:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedSchema(f"bad type descriptor {obj!r}: {exc}") from exc
    raise MalformedSchema(f"unknown descriptor kind {kind!r}")


def _id(x) -> int:
    if not isinstance(x, int) or isinstance(x, bool) or x < 0:
        raise MalformedSchema(f"bad type-id {x!r}")
    return x


def _text(x) -> str:
    if not isinstance(x, str):
        raise MalformedSchema(f"expected string, got {x!r}")
    return x


def schema_to_obj(s: Schema) -> dict:
    return {
        "format_version": s.format_version,
        "types": [descriptor_to_obj(d) for d in s.types],
        "functions": [
            {
                "fn_id": fn.fn_id,
                "name": fn.name,
                "source_file": fn.source_file,
                "line": fn.line,
                "arg_names": list(fn.arg_names),
                "arg_type_ids": list(fn.arg_type_ids),
                "ret_type_id": fn.ret_type_id,
            }
            for fn in s.functions
        ],
        "match_sites": [
            {
                "site_id": site.site_id,
                "source_file": site.source_file,
                "line": site.line,
                "scrutinee_type_id": site.scrutinee_type_id,
            }
            for site in s.match_sites
        ],
    }


def canonical_bytes(s: Schema) -> bytes:
    """The exact bytes save_schema writes and schema_hash hashes."""
    return json.dumps(schema_to_obj(s), sort_keys=True, separators=(",", ":")).encode("utf-8")


def save_schema(s: Schema, path) -> None:
    try:
        with open(path, "wb") as f:
            f.write(canonical_bytes(s))
    except OSError as exc:
        raise IoFailure(f"cannot write schema {path}: {exc}") from exc


def load_schema(path) -> Schema:
    try:
        with open(path, "rb") as f:
            raw = f.read()
    except OSError as exc:
        raise IoFailure(f"cannot read schema {path}: {exc}") from exc
    try:
        obj = json.loads(raw)
    except ValueError as exc:
        raise MalformedSchema(f"schema {path} is not valid JSON: {exc}") from exc
    return schema_from_obj(obj)


def schema_from_obj(obj) -> Schema:
    if not isinstance(obj, dict):
        raise MalformedSchema("schema document must be a JSON object")
    version = obj.get("format_version")
    if version != SCHEMA_FORMAT_VERSION:
        raise MalformedSchema(f"unsupported schema format_version {version!r}")
    try:
        types = TypeTable(descriptor_from_obj(d) for d in _list(obj, "types"))
        functions = tuple(
            FunctionInfo(
                _id(fn["fn_id"]),
                _text(fn["name"]),
                _text(fn["source_file"]),
                _id(fn["line"]),
                tuple(_text(n) for n in fn["arg_names"]),
                tuple(_id(t) for t in fn["arg_type_ids"]),
                _id(fn["ret_type_id"]),
            )
            for fn in _list(obj, "functions")
        )
        match_sites = tuple(
            MatchSiteInfo(
                _id(site["site_id"]),
                _text(site["source_file"]),
                _id(site["line"]),
                _id(site["scrutinee_type_id"]),
            )
            for site in _list(obj, "match_sites")
        )
        return Schema(types=types, functions=functions, match_sites=match_sites)
    except MalformedSchema:
        raise
    except (KeyError, TypeError, ValueError, ArityMismatch, UnknownTypeId) as exc:
        raise MalformedSchema(f"bad schema document: {exc}") from exc


def _list(obj: dict, key: str) -> list:
    v = obj.get(key)
    if not isinstance(v, list):
        raise MalformedSchema(f"schema key {key!r} must be an array")
    return v


# --- hashing ---------------------------------------------------------------------

def fnv1a_64(data: bytes) -> int:
    h = FNV_OFFSET_BASIS
    for byte in data:
        h ^= byte
        h = (h * FNV_PRIME) & 0xFFFFFFFFFFFFFFFF
    return h


def schema_hash(s: Schema) -> int:
    return fnv1a_64(canonical_bytes(s))
