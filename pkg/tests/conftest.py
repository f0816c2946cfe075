import pytest

from otr import call_tree, demos, wire


class DemoFixture:
    """A demo run plus everything read back from its files."""

    def __init__(self, result):
        self.result = result
        self.schema = result.schema
        self.trace_path = result.trace_path
        self.schema_path = result.schema_path
        self.events, self.truncated = wire.read_trace(result.trace_path, result.schema)
        self.forest = call_tree.build(self.events)


@pytest.fixture(scope="session")
def depth_demo(tmp_path_factory) -> DemoFixture:
    return DemoFixture(demos.run_depth_demo(tmp_path_factory.mktemp("depth")))


@pytest.fixture(scope="session")
def small_depth_demo(tmp_path_factory) -> DemoFixture:
    """The two-leaf variant used by the worked examples."""
    tree = demos.Node([demos.Leaf(1), demos.Leaf(2)])
    return DemoFixture(demos.run_depth_demo(tmp_path_factory.mktemp("depth_small"), tree=tree))


@pytest.fixture(scope="session")
def ambiguity_demo(tmp_path_factory) -> DemoFixture:
    return DemoFixture(demos.run_ambiguity_demo(tmp_path_factory.mktemp("ambiguity")))


@pytest.fixture(scope="session")
def exception_demo(tmp_path_factory) -> DemoFixture:
    return DemoFixture(demos.run_exception_demo(tmp_path_factory.mktemp("exception")))
