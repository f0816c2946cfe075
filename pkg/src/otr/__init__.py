"""otr: record typed executions as compact binary traces, then reconstruct,
query, replay, and visualize them.

Trace content and metadata are separate artifacts: a `.trace` file holds
untyped events, a `.schema.json` sidecar holds the type descriptors and
signatures needed to interpret them.
"""

from .errors import *  # noqa: F401,F403
from .values import (  # noqa: F401
    Block,
    Bool,
    BoolV,
    Char,
    CharV,
    CtorV,
    EncodedValue,
    Float,
    Float64,
    FloatV,
    Func,
    Immediate,
    Int,
    IntV,
    ListOf,
    ListV,
    Opaque,
    OpaqueV,
    Record,
    RecordV,
    Str,
    String,
    StringV,
    Tuple,
    TupleV,
    TypeDescriptor,
    TypeTable,
    TypedValue,
    Unit,
    UnitV,
    Variant,
    decode,
    encode_constructor,
    encode_list,
    encode_typed,
    render,
    render_untyped,
)
from .schema import (  # noqa: F401
    FunctionInfo,
    MatchSiteInfo,
    Schema,
    SchemaRegistry,
    load_schema,
    save_schema,
    schema_hash,
)
from .wire import Call, Match, Raise, Return, TraceEvent, read_trace  # noqa: F401
from .tracer import TraceSession  # noqa: F401
from .call_tree import CallForest, Frame, MatchNode, build, find_calls, frame_path  # noqa: F401
from .navigator import STEP_OPS, stack, step  # noqa: F401
from .exporters import observe, print_tree, to_chrome, validate_chrome  # noqa: F401

__version__ = "0.1.0"
