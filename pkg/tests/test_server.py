import json
import threading
import urllib.error
import urllib.request

import pytest

from otr import exporters, navigator
from otr.server import make_server, stack_to_obj


@pytest.fixture(scope="module")
def depth_service(depth_demo):
    srv = make_server(depth_demo.schema, depth_demo.forest, port=0)
    thread = threading.Thread(target=srv.serve_forever, daemon=True)
    thread.start()
    base = f"http://127.0.0.1:{srv.server_address[1]}"
    yield base, depth_demo
    srv.shutdown()


def get(base, path):
    with urllib.request.urlopen(base + path) as resp:
        return resp.status, json.loads(resp.read().decode("utf-8"))


def get_error(base, path):
    try:
        urllib.request.urlopen(base + path)
    except urllib.error.HTTPError as err:
        return err.code, json.loads(err.read().decode("utf-8"))
    raise AssertionError(f"{path} unexpectedly succeeded")


class TestApi:
    def test_summary(self, depth_service):
        base, demo = depth_service
        status, obj = get(base, "/api/summary")
        assert status == 200
        assert obj == {
            "event_count": demo.forest.event_count,
            "top_frames": [0],
            "truncated_count": 0,
        }

    def test_frame_detail(self, depth_service):
        base, demo = depth_service
        _, obj = get(base, "/api/frames/0")
        assert obj["name"] == "depth"
        assert obj["args"] == ["Node [Leaf 1; Node [Leaf 2; Leaf 3]]"]
        assert obj["outcome"] == "2"
        assert obj["outcome_kind"] == "returned"
        assert obj["begin_event"] == 0
        assert obj["end_event"] == demo.forest.event_count - 1
        assert obj["children"] == [f.frame_id for f in demo.forest.roots[0].child_frames()]
        assert [m["event_idx"] for m in obj["matches"]] == [1]

    def test_frame_unknown_is_404(self, depth_service):
        base, _ = depth_service
        status, obj = get_error(base, "/api/frames/999")
        assert status == 404 and "error" in obj

    def test_frame_malformed_is_400(self, depth_service):
        base, _ = depth_service
        status, _ = get_error(base, "/api/frames/abc")
        assert status == 400

    def test_events_range(self, depth_service):
        base, demo = depth_service
        _, obj = get(base, "/api/events?from=0&to=3")
        kinds = [e["kind"] for e in obj["events"]]
        assert kinds == ["call", "match", "call"]
        assert obj["events"][0]["name"] == "depth"
        assert obj["events"][1]["value"] == "Node [Leaf 1; Node [Leaf 2; Leaf 3]]"

    def test_events_default_is_whole_stream(self, depth_service):
        base, demo = depth_service
        _, obj = get(base, "/api/events")
        assert len(obj["events"]) == demo.forest.event_count

    def test_step_matches_library(self, depth_service):
        base, demo = depth_service
        for cursor in range(demo.forest.event_count + 1):
            for op in ("next", "prev", "over", "back_over"):
                _, obj = get(base, f"/api/step?at={cursor}&op={op}")
                expected_cursor = navigator.step(demo.forest, cursor, op)
                expected_stack = stack_to_obj(
                    navigator.stack(demo.forest, demo.schema, expected_cursor)
                )
                assert obj["cursor"] == expected_cursor
                assert obj["stack"] == expected_stack

    def test_step_no_enclosing_frame_is_422(self, depth_service):
        base, _ = depth_service
        status, _ = get_error(base, "/api/step?at=0&op=out")
        assert status == 422

    def test_step_bad_requests_are_400(self, depth_service):
        base, _ = depth_service
        assert get_error(base, "/api/step?at=0&op=warp")[0] == 400
        assert get_error(base, "/api/step?at=zzz&op=next")[0] == 400
        assert get_error(base, "/api/step?at=999&op=next")[0] == 400
        assert get_error(base, "/api/step?op=next")[0] == 400

    def test_search(self, depth_service):
        base, _ = depth_service
        _, obj = get(base, "/api/search?fn=depth")
        assert len(obj["frames"]) == 5
        assert get_error(base, "/api/search?fn=nope")[0] == 404
        assert get_error(base, "/api/search")[0] == 400

    def test_chrome_export_equals_library_bytes(self, depth_service):
        base, demo = depth_service
        with urllib.request.urlopen(base + "/api/export/chrome?logical_time=1") as resp:
            raw = resp.read()
        doc = exporters.to_chrome(demo.forest, demo.schema, logical_time=True)
        assert raw == exporters.chrome_json_bytes(doc)

    def test_unknown_endpoint_is_404(self, depth_service):
        base, _ = depth_service
        assert get_error(base, "/api/nope")[0] == 404

    def test_index_page_served(self, depth_service):
        base, _ = depth_service
        with urllib.request.urlopen(base + "/") as resp:
            body = resp.read().decode("utf-8")
        assert resp.headers["Content-Type"].startswith("text/html")

    def test_fallback_page_when_assets_missing(self, depth_demo, tmp_path):
        srv = make_server(depth_demo.schema, depth_demo.forest, port=0, assets_dir=tmp_path)
        thread = threading.Thread(target=srv.serve_forever, daemon=True)
        thread.start()
        try:
            with urllib.request.urlopen(
                f"http://127.0.0.1:{srv.server_address[1]}/"
            ) as resp:
                body = resp.read().decode("utf-8")
            assert "/api/summary" in body  # the built-in API listing
        finally:
            srv.shutdown()

    def test_static_assets_served_when_configured(self, depth_demo, tmp_path):
        (tmp_path / "index.html").write_text("<html>explorer</html>")
        (tmp_path / "main.js").write_text("console.log(1)")
        srv = make_server(depth_demo.schema, depth_demo.forest, port=0, assets_dir=tmp_path)
        thread = threading.Thread(target=srv.serve_forever, daemon=True)
        thread.start()
        base = f"http://127.0.0.1:{srv.server_address[1]}"
        try:
            with urllib.request.urlopen(base + "/") as resp:
                assert b"explorer" in resp.read()
            with urllib.request.urlopen(base + "/main.js") as resp:
                assert resp.headers["Content-Type"].startswith(("application/javascript", "text/javascript"))
            assert get_error(base, "/../secrets")[0] == 404
        finally:
            srv.shutdown()
