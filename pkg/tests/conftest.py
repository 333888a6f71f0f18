import pytest
from hypothesis import assume
from hypothesis import strategies as st

from wrain.grid import DIRECTIONS, neighbor
from wrain.model import Configuration, from_nodes

# one verdict line per acceptance criterion, echoed after the test summary
_acceptance_lines: list[str] = []


@pytest.fixture(scope="session")
def acceptance_log():
    return _acceptance_lines


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)

small_coords = st.integers(min_value=-3, max_value=3)
node_st = st.tuples(small_coords, small_coords)
state_st = st.one_of(st.none(), st.sampled_from(DIRECTIONS))


@st.composite
def configurations(draw, min_size=1, max_size=6, with_expanded=True):
    """Arbitrary well-formed configurations, not necessarily connected."""
    nodes = draw(st.sets(node_st, min_size=min_size, max_size=max_size))
    particles = {}
    for v in sorted(nodes):
        particles[v] = draw(state_st) if with_expanded else None
    config = Configuration(particles)
    assume(not config.validate())
    return config


@st.composite
def connected_node_sets(draw, min_size=1, max_size=8):
    """Connected node sets grown by random attachment."""
    n = draw(st.integers(min_value=min_size, max_value=max_size))
    steps = draw(
        st.lists(
            st.tuples(st.integers(min_value=0, max_value=255),
                      st.sampled_from(DIRECTIONS)),
            min_size=6 * max_size,
            max_size=6 * max_size,
        )
    )
    nodes = [(0, 0)]
    seen = {(0, 0)}
    for idx, d in steps:
        if len(nodes) >= n:
            break
        w = neighbor(nodes[idx % len(nodes)], d)
        if w not in seen:
            seen.add(w)
            nodes.append(w)
    assume(len(nodes) == n)
    return frozenset(nodes)


@st.composite
def initial_configurations(draw, min_size=1, max_size=8):
    return from_nodes(draw(connected_node_sets(min_size, max_size)))


@pytest.fixture
def pair_config():
    return from_nodes([(0, 0), (0, 1)])


@pytest.fixture
def triangle_config():
    return from_nodes([(0, 0), (1, 0), (0, 1)])
