import random

import pytest

import randgen
from otr import wire
from otr.errors import (
    DECODE_ERRORS,
    ArityMismatch,
    BoolOutOfRange,
    CharOutOfRange,
    KindMismatch,
    TagOutOfRange,
    UnknownConstructor,
    UnknownTypeId,
)
from otr.values import (
    Block,
    Bool,
    BoolV,
    Char,
    CharV,
    Float,
    CtorV,
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
    TypeTable,
    Unit,
    UnitV,
    Variant,
    decode,
    encode_constructor,
    encode_list,
    encode_typed,
    render,
    render_arg,
    render_untyped,
)

# Shared descriptors. Layout: 0=int, 1=string, 2=option<int>, 3=result<int,string>,
# 4=bool, 5=unit, 6=char, 7=float, 8=func, 9=(int,int) tuple, 10=int list,
# 11=record, 12=four-constructor variant.
OPTION = Variant("option", (("None", ()), ("Some", (0,))))
RESULT = Variant("result", (("Ok", (0,)), ("Error", (1,))))
ABCD = Variant("t", (("A", ()), ("B", (0,)), ("C", ()), ("D", (1,))))
POINT = Record("point", (("x", 0), ("y", 0)))

TABLE = TypeTable(
    [
        Int(),
        String(),
        OPTION,
        RESULT,
        Bool(),
        Unit(),
        Char(),
        Float(),
        Func(),
        Tuple((0, 0)),
        ListOf(0),
        POINT,
        ABCD,
    ]
)


class TestEncodeConstructor:
    def test_some_and_ok_share_bytes(self):
        some = encode_constructor(OPTION, "Some", (Immediate(1),))
        ok = encode_constructor(RESULT, "Ok", (Immediate(1),))
        assert some == Block(0, (Immediate(1),))
        assert some == ok
        assert wire.encode_value(some) == wire.encode_value(ok)

    def test_none_is_first_constant(self):
        assert encode_constructor(OPTION, "None", ()) == Immediate(0)

    def test_constant_and_block_numbering_are_independent(self):
        # type t = A | B of int | C | D of string
        assert encode_constructor(ABCD, "A", ()) == Immediate(0)
        assert encode_constructor(ABCD, "C", ()) == Immediate(1)
        assert encode_constructor(ABCD, "B", (Immediate(7),)) == Block(0, (Immediate(7),))
        assert encode_constructor(ABCD, "D", (Str(b"x"),)) == Block(1, (Str(b"x"),))

    def test_unknown_constructor(self):
        with pytest.raises(UnknownConstructor):
            encode_constructor(OPTION, "Sum", (Immediate(1),))

    def test_arity_mismatch(self):
        with pytest.raises(ArityMismatch):
            encode_constructor(OPTION, "Some", ())
        with pytest.raises(ArityMismatch):
            encode_constructor(OPTION, "None", (Immediate(1),))


class TestEncodeList:
    def test_nil(self):
        assert encode_list(()) == Immediate(0)

    def test_cons_cells(self):
        got = encode_list((Immediate(1), Immediate(2)))
        assert got == Block(0, (Immediate(1), Block(0, (Immediate(2), Immediate(0)))))

    def test_builtin_list_is_ambiguous_with_cons_variant(self):
        # A hand-rolled Nil/Cons variant reproduces the built-in list bytes.
        cons = Variant("mylist", (("Nil", ()), ("Cons", (0, 1))))
        assert encode_list(()) == encode_constructor(cons, "Nil", ())
        assert encode_list((Immediate(7),)) == encode_constructor(
            cons, "Cons", (Immediate(7), encode_constructor(cons, "Nil", ()))
        )


class TestDecode:
    def test_bool(self):
        assert decode(Immediate(0), 4, TABLE) == BoolV(False)
        assert decode(Immediate(1), 4, TABLE) == BoolV(True)

    def test_same_bytes_two_types(self):
        v = Block(0, (Immediate(1),))
        assert decode(v, 2, TABLE) == CtorV("Some", (IntV(1),))
        assert decode(v, 3, TABLE) == CtorV("Ok", (IntV(1),))

    def test_tag_out_of_range(self):
        with pytest.raises(TagOutOfRange):
            decode(Block(5, ()), 2, TABLE)

    def test_constant_index_out_of_range(self):
        with pytest.raises(TagOutOfRange):
            decode(Immediate(1), 2, TABLE)  # option has one constant constructor
        with pytest.raises(TagOutOfRange):
            decode(Immediate(-1), 2, TABLE)

    def test_block_arity(self):
        with pytest.raises(ArityMismatch):
            decode(Block(0, (Immediate(1), Immediate(2))), 2, TABLE)

    def test_bool_out_of_range(self):
        with pytest.raises(BoolOutOfRange):
            decode(Immediate(2), 4, TABLE)

    def test_char_out_of_range(self):
        with pytest.raises(CharOutOfRange):
            decode(Immediate(256), 6, TABLE)
        assert decode(Immediate(97), 6, TABLE) == CharV("a")

    def test_kind_mismatches(self):
        with pytest.raises(KindMismatch):
            decode(Block(0, ()), 0, TABLE)  # block where int expected
        with pytest.raises(KindMismatch):
            decode(Immediate(0), 7, TABLE)  # immediate where float expected
        with pytest.raises(KindMismatch):
            decode(Immediate(0), 1, TABLE)  # immediate where string expected
        with pytest.raises(KindMismatch):
            decode(Immediate(0), 8, TABLE)  # func accepts only opaque

    def test_func_accepts_opaque(self):
        assert decode(Opaque("function"), 8, TABLE) == OpaqueV("function")

    def test_unit(self):
        assert decode(Immediate(0), 5, TABLE) == UnitV()
        with pytest.raises(TagOutOfRange):
            decode(Immediate(3), 5, TABLE)

    def test_tuple_and_record(self):
        pair = Block(0, (Immediate(1), Immediate(2)))
        assert decode(pair, 9, TABLE) == TupleV((IntV(1), IntV(2)))
        assert decode(pair, 11, TABLE) == RecordV((("x", IntV(1)), ("y", IntV(2))))

    def test_list_follows_cons_cells(self):
        v = encode_list((Immediate(1), Immediate(2)))
        assert decode(v, 10, TABLE) == ListV((IntV(1), IntV(2)))
        with pytest.raises(TagOutOfRange):
            decode(Immediate(1), 10, TABLE)  # bad nil
        with pytest.raises(TagOutOfRange):
            decode(Block(1, (Immediate(1), Immediate(0))), 10, TABLE)

    def test_unknown_type_id(self):
        with pytest.raises(UnknownTypeId):
            decode(Immediate(0), 99, TABLE)


class TestRender:
    @pytest.mark.parametrize(
        "tv,expected",
        [
            (UnitV(), "()"),
            (BoolV(True), "true"),
            (BoolV(False), "false"),
            (IntV(42), "42"),
            (IntV(-7), "-7"),
            (FloatV(1.0), "1."),
            (FloatV(-0.5), "-0.5"),
            (FloatV(100.0), "100."),
            (FloatV(1e22), "1e+22"),
            (CharV("a"), "'a'"),
            (CharV("\n"), "'\\n'"),
            (StringV(b"hi"), '"hi"'),
            (StringV(b'say "hi"\n'), '"say \\"hi\\"\\n"'),
            (StringV(b"\xff\x00"), '"\\xff\\x00"'),
            (TupleV((IntV(1), IntV(2))), "(1, 2)"),
            (ListV((IntV(1), IntV(2))), "[1; 2]"),
            (ListV(()), "[]"),
            (RecordV((("x", IntV(1)), ("y", IntV(2)))), "{ x = 1; y = 2 }"),
            (CtorV("None", ()), "None"),
            (CtorV("Some", (IntV(1),)), "Some 1"),
            (CtorV("D", (StringV(b"x"),)), 'D "x"'),
            (OpaqueV("function"), "<fun>"),
            (OpaqueV("abstract"), "<abstr>"),
        ],
    )
    def test_basic_forms(self, tv, expected):
        assert render(tv) == expected

    def test_nested_constructor_parenthesized(self):
        assert render(CtorV("Some", (CtorV("Ok", (IntV(1),)),))) == "Some (Ok 1)"

    def test_negative_argument_parenthesized(self):
        assert render(CtorV("Some", (IntV(-1),))) == "Some (-1)"
        assert render(CtorV("Some", (FloatV(-1.0),))) == "Some (-1.)"

    def test_constant_constructor_argument_bare(self):
        assert render(CtorV("Some", (CtorV("None", ()),))) == "Some None"

    def test_list_argument_bare(self):
        assert render(CtorV("Node", (ListV((IntV(1),)),))) == "Node [1]"

    def test_multi_argument_constructor(self):
        assert render(CtorV("Pair", (IntV(1), IntV(2)))) == "Pair (1, 2)"

    def test_render_arg_wraps_only_when_needed(self):
        assert render_arg(IntV(3)) == "3"
        assert render_arg(IntV(-3)) == "(-3)"
        assert render_arg(CtorV("Some", (IntV(1),))) == "(Some 1)"
        assert render_arg(CtorV("None", ())) == "None"

    def test_rose_tree_roundtrip_text(self):
        # Hand-encode Node [Leaf 1; Leaf 2] against a self-referential table.
        table = TypeTable(
            [Int(), Variant("tree", (("Leaf", (0,)), ("Node", (2,)))), ListOf(1)]
        )
        tree_desc = table[1]
        leaf1 = encode_constructor(tree_desc, "Leaf", (Immediate(1),))
        leaf2 = encode_constructor(tree_desc, "Leaf", (Immediate(2),))
        node = encode_constructor(tree_desc, "Node", (encode_list((leaf1, leaf2)),))
        assert render(decode(node, 1, table)) == "Node [Leaf 1; Leaf 2]"

    def test_render_untyped(self):
        assert render_untyped(Immediate(5)) == "5"
        assert render_untyped(Str(b"boom")) == '"boom"'
        assert render_untyped(Block(1, (Immediate(1), Str(b"x")))) == '<block 1: 1, "x">'
        assert render_untyped(Block(0, ())) == "<block 0>"
        assert render_untyped(Opaque("function")) == "<fun>"
        assert render_untyped(Float64(2.5)) == "2.5"


class TestTableInvariants:
    def test_dangling_reference_rejected(self):
        with pytest.raises(UnknownTypeId):
            TypeTable([ListOf(3)])

    def test_record_needs_fields(self):
        with pytest.raises(ValueError):
            Record("empty", ())

    def test_duplicate_field_names_rejected(self):
        with pytest.raises(ValueError):
            Record("dup", (("x", 0), ("x", 0)))

    def test_duplicate_constructors_rejected(self):
        with pytest.raises(ValueError):
            Variant("dup", (("A", ()), ("A", (0,))))

    def test_tuple_needs_two_elements(self):
        with pytest.raises(ValueError):
            Tuple((0,))

    def test_block_tag_range(self):
        with pytest.raises(ValueError):
            Block(256, ())


class TestRoundTrip:
    def test_random_values_roundtrip(self):
        rng = random.Random(20250811)
        for _ in range(400):
            table = randgen.make_table(rng)
            type_id = rng.randrange(len(table))
            tv = randgen.random_typed(rng, table, type_id, depth=6)
            assert decode(encode_typed(tv, type_id, table), type_id, table) == tv

    def test_ambiguity_holds_for_all_payloads(self):
        rng = random.Random(7)
        for _ in range(200):
            x = Immediate(randgen.random_int64(rng))
            some = encode_constructor(OPTION, "Some", (x,))
            ok = encode_constructor(RESULT, "Ok", (x,))
            assert some == ok
            assert wire.encode_value(some) == wire.encode_value(ok)

    def test_decode_totality_on_fuzzed_input(self):
        rng = random.Random(99)
        for _ in range(2000):
            table = randgen.make_table(rng)
            type_id = rng.randrange(len(table))
            v = randgen.random_encoded(rng)
            try:
                decode(v, type_id, table)
            except DECODE_ERRORS:
                pass
