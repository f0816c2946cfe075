"""Bundled instrumented programs; they double as acceptance fixtures.

Each demo writes <name>.trace and <name>.schema.json into the chosen
directory using a deterministic tick clock, so regenerated files are
byte-identical. Instrumentation is manual through the TraceSession guard
API -- that is the contract under test, not the decorator sugar.

* depth: a rose-tree depth function whose per-node work is a right fold.
  Traced: the function itself, the fold's two-argument step closure, and
  the match on the scrutinized node. The fold combinator itself is library
  code and stays untraced. An uninstrumented reference computation must
  agree with the traced run.
* ambiguity: two functions whose distinct results ("Some 1" of an option
  type, "Ok 1" of a result type) share one byte encoding.
* exception: f calls g calls h; h raises, f handles. Each unwound frame
  leaves one Raise event, so the tree shows g and h raised while f
  returned.
"""

from __future__ import annotations

from dataclasses import dataclass

from .schema import Schema, SchemaRegistry
from .tracer import TickClock, TraceSession
from .values import (
    Immediate,
    Int,
    ListOf,
    Str,
    String,
    Unit,
    Variant,
    encode_constructor,
    encode_list,
)

DEMO_NAMES = ("depth", "ambiguity", "exception")


# --- rose trees -----------------------------------------------------------------

@dataclass(frozen=True)
class Leaf:
    value: int


@dataclass(frozen=True)
class Node:
    children: tuple

    def __init__(self, children) -> None:
        object.__setattr__(self, "children", tuple(children))


Tree = Leaf | Node

FIXED_TREE = Node([Leaf(1), Node([Leaf(2), Leaf(3)])])


def tree_depth(t: Tree) -> int:
    """Reference depth, deliberately free of any tracing."""
    if isinstance(t, Leaf):
        return 0
    acc = 0
    for child in t.children:
        acc = max(tree_depth(child), acc)
    return acc + 1


@dataclass(frozen=True)
class DepthDemoSchema:
    schema: Schema
    tree_desc: Variant
    id_tree: int
    fn_depth: int
    fn_fold: int
    site_match: int


def build_depth_schema() -> DepthDemoSchema:
    reg = SchemaRegistry()
    id_int = reg.add_type(Int())
    id_tree = reg.declare_type()
    id_tree_list = reg.add_type(ListOf(id_tree))
    tree_desc = Variant("tree", (("Leaf", (id_int,)), ("Node", (id_tree_list,))))
    reg.define_type(id_tree, tree_desc)
    fn_depth = reg.register_function(
        "depth", "depth_demo.py", 10, ("t",), (id_tree,), id_int
    )
    fn_fold = reg.register_function(
        "fold_fn", "depth_demo.py", 13, ("c", "t"), (id_tree, id_int), id_int
    )
    site_match = reg.register_match_site("depth_demo.py", 11, id_tree)
    return DepthDemoSchema(reg.finalize(), tree_desc, id_tree, fn_depth, fn_fold, site_match)


def encode_tree(desc: Variant, t: Tree):
    if isinstance(t, Leaf):
        return encode_constructor(desc, "Leaf", (Immediate(t.value),))
    return encode_constructor(
        desc, "Node", (encode_list(encode_tree(desc, c) for c in t.children),)
    )


def _traced_depth(session: TraceSession, d: DepthDemoSchema, t: Tree) -> int:
    guard = session.call(d.fn_depth, (encode_tree(d.tree_desc, t),))
    session.match_event(d.site_match, encode_tree(d.tree_desc, t))
    if isinstance(t, Leaf):
        result = 0
    else:
        # Right fold: the step closure fires on the last child first.
        acc = 0
        for child in reversed(t.children):
            fold_guard = session.call(
                d.fn_fold, (encode_tree(d.tree_desc, child), Immediate(acc))
            )
            acc = max(_traced_depth(session, d, child), acc)
            session.ret(fold_guard, Immediate(acc))
        result = acc + 1
    session.ret(guard, Immediate(result))
    return result


@dataclass(frozen=True)
class DemoResult:
    name: str
    trace_path: object
    schema_path: object
    schema: Schema


def run_depth_demo(out_dir=None, tree: Tree = FIXED_TREE) -> DemoResult:
    d = build_depth_schema()
    with TraceSession("depth", d.schema, out_dir=out_dir, clock=TickClock()) as session:
        traced = _traced_depth(session, d, tree)
    reference = tree_depth(tree)
    assert traced == reference, f"traced depth {traced} != reference {reference}"
    return DemoResult("depth", session.trace_path, session.schema_path, d.schema)


# --- ambiguity --------------------------------------------------------------------

@dataclass(frozen=True)
class AmbiguityDemoSchema:
    schema: Schema
    option_desc: Variant
    result_desc: Variant
    id_option: int
    id_result: int
    fn_some: int
    fn_ok: int


def build_ambiguity_schema() -> AmbiguityDemoSchema:
    reg = SchemaRegistry()
    id_unit = reg.add_type(Unit())
    id_int = reg.add_type(Int())
    id_string = reg.add_type(String())
    option_desc = Variant("option", (("None", ()), ("Some", (id_int,))))
    result_desc = Variant("result", (("Ok", (id_int,)), ("Error", (id_string,))))
    id_option = reg.add_type(option_desc)
    id_result = reg.add_type(result_desc)
    fn_some = reg.register_function(
        "make_some", "ambiguity_demo.py", 5, ("u",), (id_unit,), id_option
    )
    fn_ok = reg.register_function(
        "make_ok", "ambiguity_demo.py", 8, ("u",), (id_unit,), id_result
    )
    return AmbiguityDemoSchema(
        reg.finalize(), option_desc, result_desc, id_option, id_result, fn_some, fn_ok
    )


def run_ambiguity_demo(out_dir=None) -> DemoResult:
    from . import wire

    d = build_ambiguity_schema()
    some_value = encode_constructor(d.option_desc, "Some", (Immediate(1),))
    ok_value = encode_constructor(d.result_desc, "Ok", (Immediate(1),))
    assert some_value == ok_value, "Some 1 and Ok 1 must share a representation"
    assert wire.encode_value(some_value) == wire.encode_value(ok_value)
    with TraceSession("ambiguity", d.schema, out_dir=out_dir, clock=TickClock()) as session:
        guard = session.call(d.fn_some, (Immediate(0),))
        session.ret(guard, some_value)
        guard = session.call(d.fn_ok, (Immediate(0),))
        session.ret(guard, ok_value)
    return DemoResult("ambiguity", session.trace_path, session.schema_path, d.schema)


# --- exception --------------------------------------------------------------------

class DemoFailure(Exception):
    pass


@dataclass(frozen=True)
class ExceptionDemoSchema:
    schema: Schema
    fn_f: int
    fn_g: int
    fn_h: int


def build_exception_schema() -> ExceptionDemoSchema:
    reg = SchemaRegistry()
    id_int = reg.add_type(Int())
    fn_f = reg.register_function("f", "exception_demo.py", 5, ("x",), (id_int,), id_int)
    fn_g = reg.register_function("g", "exception_demo.py", 12, ("x",), (id_int,), id_int)
    fn_h = reg.register_function("h", "exception_demo.py", 19, ("x",), (id_int,), id_int)
    return ExceptionDemoSchema(reg.finalize(), fn_f, fn_g, fn_h)


def _encode_exn(exc: BaseException):
    return Str(str(exc).encode("utf-8"))


def _exn_f(session: TraceSession, d: ExceptionDemoSchema, x: int) -> int:
    guard = session.call(d.fn_f, (Immediate(x),))
    try:
        try:
            result = _exn_g(session, d, x)
        except DemoFailure:
            result = -1  # the handler lives here; f still returns normally
        session.ret(guard, Immediate(result))
        return result
    except BaseException as exc:
        session.raise_exit(guard, _encode_exn(exc))
        raise


def _exn_g(session: TraceSession, d: ExceptionDemoSchema, x: int) -> int:
    guard = session.call(d.fn_g, (Immediate(x),))
    try:
        result = _exn_h(session, d, x)
        session.ret(guard, Immediate(result))
        return result
    except BaseException as exc:
        session.raise_exit(guard, _encode_exn(exc))
        raise


def _exn_h(session: TraceSession, d: ExceptionDemoSchema, x: int) -> int:
    guard = session.call(d.fn_h, (Immediate(x),))
    try:
        raise DemoFailure("boom")
    except BaseException as exc:
        session.raise_exit(guard, _encode_exn(exc))
        raise


def run_exception_demo(out_dir=None) -> DemoResult:
    d = build_exception_schema()
    with TraceSession("exception", d.schema, out_dir=out_dir, clock=TickClock()) as session:
        result = _exn_f(session, d, 3)
    assert result == -1
    return DemoResult("exception", session.trace_path, session.schema_path, d.schema)


DEMOS = {
    "depth": run_depth_demo,
    "ambiguity": run_ambiguity_demo,
    "exception": run_exception_demo,
}


def run_demo(name: str, out_dir=None) -> DemoResult:
    if name not in DEMOS:
        raise ValueError(f"unknown demo {name!r}; have {', '.join(DEMO_NAMES)}")
    return DEMOS[name](out_dir=out_dir)
