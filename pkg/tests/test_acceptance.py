"""Acceptance suite: one test per criterion, each printing a pass line.

Run with `python3 -m pytest tests/test_acceptance.py -v -s` to see the
per-criterion report. Every tolerance and budget is pinned here.
"""

import random
import time
from pathlib import Path

import randgen
from otr import call_tree, demos, exporters, navigator, schema as schema_mod, wire
from otr.call_tree import Raised, Returned, build, find_calls
from otr.errors import DECODE_ERRORS
from otr.values import (
    CtorV,
    Immediate,
    IntV,
    Variant,
    decode,
    encode_constructor,
    encode_typed,
    render,
)

GOLDEN = Path(__file__).parent / "golden"


def report(name: str) -> None:
    print(f"[PASS] {name}")


def test_ambiguity_reproduction():
    started = time.perf_counter()
    option = Variant("option", (("None", ()), ("Some", (0,))))
    result = Variant("result", (("Ok", (0,)), ("Error", (1,))))
    some = encode_constructor(option, "Some", (Immediate(1),))
    ok = encode_constructor(result, "Ok", (Immediate(1),))
    assert some == ok
    assert wire.encode_value(some) == wire.encode_value(ok)

    from otr.values import Int, String, TypeTable

    table = TypeTable([Int(), String(), option, result])
    same_bytes = wire.decode_value(wire.encode_value(some))
    assert render(decode(same_bytes, 2, table)) == "Some 1"
    assert render(decode(same_bytes, 3, table)) == "Ok 1"
    assert time.perf_counter() - started < 1.0
    report("ambiguity reproduction: identical bytes, 'Some 1' vs 'Ok 1' by descriptor")


def test_codec_round_trip_1000_cases():
    started = time.perf_counter()
    rng = random.Random(0xC0DEC)
    rose_cases = 0
    for _ in range(1000):
        table = randgen.make_table(rng)
        rose_ids = [
            i
            for i, d in enumerate(table)
            if isinstance(d, Variant) and d.name.startswith("rose")
        ]
        if rose_ids and rng.random() < 0.5:
            type_id = rng.choice(rose_ids)
            rose_cases += 1
        else:
            type_id = rng.randrange(len(table))
        tv = randgen.random_typed(rng, table, type_id, depth=6)
        assert decode(encode_typed(tv, type_id, table), type_id, table) == tv
    elapsed = time.perf_counter() - started
    assert rose_cases >= 100, "recursive rose-tree coverage too thin"
    assert elapsed < 10.0
    report(
        f"codec round-trip: 1000/1000 cases ({rose_cases} recursive rose trees), "
        f"{elapsed:.2f}s"
    )


def test_decoder_totality_10000_fuzzed_pairs():
    rng = random.Random(0xF022)
    outcomes = {"value": 0, "error": 0}
    for _ in range(10_000):
        table = randgen.make_table(rng)
        type_id = rng.randrange(len(table))
        v = randgen.random_encoded(rng)
        try:
            decode(v, type_id, table)
            outcomes["value"] += 1
        except DECODE_ERRORS:
            outcomes["error"] += 1
        # anything else propagates and fails the test
    report(
        f"decoder totality: 10000 fuzzed pairs, {outcomes['value']} decoded, "
        f"{outcomes['error']} rejected with enumerated errors, 0 crashes"
    )


def test_depth_demo_fidelity(depth_demo):
    forest, schema = depth_demo.forest, depth_demo.schema
    root = forest.roots[0]
    assert root.outcome == Returned(Immediate(2))
    assert demos.tree_depth(demos.FIXED_TREE) == 2

    depth_frames = find_calls(forest, schema, "depth")
    fold_frames = find_calls(forest, schema, "fold_fn")
    match_count = sum(len(f.match_nodes()) for f in forest.frames)
    assert len(depth_frames) == 5
    assert len(fold_frames) == 4
    assert match_count == 5
    for frame in depth_frames:
        first = frame.children[0]
        assert isinstance(first, call_tree.MatchNode)
        assert first.event_idx == frame.begin_event_idx + 1
    report(
        "depth demo fidelity: traced == reference == 2; "
        "5 depth frames, 4 closure frames, 5 matches; match first in every depth frame"
    )


def test_truncation_tolerance(depth_demo):
    data = Path(depth_demo.trace_path).read_bytes()
    for k in range(1, 33):
        events, truncated = wire.read_trace_bytes(data[:-k], depth_demo.schema)
        assert truncated, f"cutting {k} bytes must leave a truncated stream"
        forest = build(events)
        assert forest.truncated_count >= 1
        open_frames = [f for f in forest.frames if f.end_event_idx is None]
        assert len(open_frames) == forest.truncated_count
        for frame in open_frames:
            assert frame.outcome == call_tree.Truncated()
    report("truncation: 32 byte-level cuts all read back flagged, never malformed")


def test_exception_semantics(exception_demo):
    forest, schema = exception_demo.forest, exception_demo.schema
    outcome = {schema.function(f.fn_id).name: f.outcome for f in forest.frames}
    assert outcome["f"] == Returned(Immediate(-1))
    assert isinstance(outcome["g"], Raised)
    assert isinstance(outcome["h"], Raised)
    raises = [e for e in exception_demo.events if isinstance(e, wire.Raise)]
    assert len(raises) == 2
    report("exception semantics: outcomes [f returned, g raised, h raised], 2 raise events")


def test_navigator_reversibility(depth_demo, exception_demo):
    started = time.perf_counter()
    checked = 0
    for demo in (depth_demo, exception_demo):
        forest = demo.forest
        n = forest.event_count
        for c in range(n + 1):
            if c < n:
                assert navigator.step(forest, navigator.step(forest, c, "next"), "prev") == c
                checked += 1
            if c > 0:
                assert navigator.step(forest, navigator.step(forest, c, "prev"), "next") == c
                checked += 1
            opened = forest.frame_opened_at(c) if c < n else None
            if opened is not None and not opened.truncated:
                over = navigator.step(forest, c, "over")
                assert navigator.step(forest, over, "back_over") == c
                checked += 1
            closed = forest.frame_closed_at(c - 1) if c > 0 else None
            if closed is not None:
                back = navigator.step(forest, c, "back_over")
                assert navigator.step(forest, back, "over") == c
                checked += 1
            chain = forest.open_frames_at(c)
            if chain and not chain[-1].truncated:
                out = navigator.step(forest, c, "out")
                back_out = navigator.step(forest, c, "back_out")
                assert navigator.step(forest, back_out, "over") == out
                assert navigator.step(forest, out, "back_over") == back_out
                checked += 2
    elapsed = time.perf_counter() - started
    assert elapsed < 5.0
    report(f"navigator reversibility: {checked} inverse-law checks, exhaustive, {elapsed:.2f}s")


def test_chrome_export_validity(depth_demo, ambiguity_demo, exception_demo):
    for demo in (depth_demo, ambiguity_demo, exception_demo):
        for logical in (False, True):
            doc = exporters.to_chrome(demo.forest, demo.schema, logical_time=logical)
            exporters.validate_chrome(doc)
        logical_bytes = exporters.chrome_json_bytes(
            exporters.to_chrome(demo.forest, demo.schema, logical_time=True)
        )
        golden = (GOLDEN / f"{demo.result.name}.chrome.json").read_bytes()
        assert logical_bytes == golden
    report("chrome export: structural checker green on all demos, logical goldens bit-exact")


def test_compactness_sanity(depth_demo):
    binary_size = Path(depth_demo.trace_path).stat().st_size
    text = exporters.print_tree(depth_demo.forest, depth_demo.schema)
    text_size = len(text.encode("utf-8"))
    assert binary_size < text_size
    report(
        f"compactness: binary {binary_size} B < text {text_size} B "
        f"(ratio {binary_size / text_size:.2f})"
    )
