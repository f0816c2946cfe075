"""Exception hierarchy shared by every layer of the toolkit.

Decode errors signal trace/schema disagreement: the decoder never guesses,
it names exactly what failed. DECODE_ERRORS is the closed set a fuzzer may
observe from decoding; anything else escaping the decoder is a bug.
"""


class OtrError(Exception):
    pass


# --- value encoding / decoding ---------------------------------------------

class UnknownConstructor(OtrError):
    pass


class ArityMismatch(OtrError):
    pass


class KindMismatch(OtrError):
    pass


class TagOutOfRange(OtrError):
    pass


class BoolOutOfRange(OtrError):
    pass


class CharOutOfRange(OtrError):
    pass


class UnknownTypeId(OtrError):
    pass


# Closed set of errors decode() may raise on hostile input.
DECODE_ERRORS = (
    KindMismatch,
    TagOutOfRange,
    ArityMismatch,
    BoolOutOfRange,
    CharOutOfRange,
    UnknownTypeId,
)


# --- schema registry / sidecar ----------------------------------------------

class DoubleDefine(OtrError):
    pass


class UndefinedAtFinalize(OtrError):
    pass


class MalformedSchema(OtrError):
    pass


class IoFailure(OtrError):
    pass


# --- binary trace stream -----------------------------------------------------

class MalformedVarint(OtrError):
    pass


class BadMagic(OtrError):
    pass


class UnsupportedVersion(OtrError):
    pass


class SchemaHashMismatch(OtrError):
    pass


class MalformedEvent(OtrError):
    pass


# --- live tracing ------------------------------------------------------------

class UnknownFunction(OtrError):
    pass


class SessionClosed(OtrError):
    pass


class NotInnermost(OtrError):
    pass


class GuardAlreadyClosed(OtrError):
    pass


class NoOpenFrame(OtrError):
    pass


class UnknownSite(OtrError):
    pass


# --- call-tree queries / navigation ------------------------------------------

class OrphanClose(OtrError):
    pass


class UnknownFunctionName(OtrError):
    pass


class UnknownFrame(OtrError):
    pass


class NoEnclosingFrame(OtrError):
    pass
