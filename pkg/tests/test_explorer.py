"""Exhaustive exploration: graph shape, checks, and counterexamples."""

import itertools

import pytest

from wrain import explorer, grid, rule
from wrain.engine import replay
from wrain.model import CONTRACTED, Configuration, from_nodes


def test_pair_serial_graph():
    result = explorer.explore(from_nodes([(0, 0), (0, 1)]), mode="serial")
    assert result.ok
    assert result.states == 3
    assert result.edges == 2
    assert result.terminals == {"0,0,.;1,0,."}
    assert result.max_moves == 1
    assert result.max_depth == 2


def test_triangle_serial_is_a_chain():
    result = explorer.explore(from_nodes([(0, 0), (0, 1), (1, 0)]), mode="serial")
    assert result.ok
    assert result.terminals == {"0,0,.;1,0,.;2,0,."}
    assert result.max_moves == 2
    assert result.max_depth == 4


def test_already_final_start_has_no_successors():
    config = from_nodes([(0, 0), (1, 0), (2, 0)])
    result = explorer.explore(config, mode="serial")
    assert result.ok
    assert result.states == 1
    assert result.edges == 0
    assert result.terminals == {config.canonical_key()}
    assert result.max_moves == 0


def test_terminals_are_floor_lines():
    config = from_nodes([(0, 0), (0, 1), (0, 2)])
    result = explorer.explore(config, mode="serial")
    assert result.ok
    assert result.terminal_shapes == {"0,0,.;1,0,.;2,0,."}


def test_modes_agree_on_terminals_up_to_n3():
    for n in (1, 2, 3):
        for config in explorer.enumerate_initial(n):
            serial = explorer.explore(config, mode="serial")
            subsets = explorer.explore(config, mode="all_subsets")
            assert serial.ok and subsets.ok
            assert serial.terminals == subsets.terminals, config.canonical_key()


def test_all_subsets_covers_tie_breaks():
    # two expanded particles converging on (1,0) via different edges: the
    # subset activating both must branch on the node tie-break
    config = Configuration({(-1, 0): "E", (0, 0): None, (0, 1): None})
    with pytest.raises(explorer.ExplorerError):
        explorer.explore(config, mode="all_subsets")  # not an initial config


def test_mode_and_size_guards():
    big = from_nodes([(q, 0) for q in range(6)])
    with pytest.raises(explorer.ExplorerError):
        explorer.explore(big, mode="serial")
    with pytest.raises(explorer.ExplorerError):
        explorer.explore(from_nodes([(0, 0)] ), mode="bogus")
    with pytest.raises(explorer.ExplorerError):
        explorer.explore(from_nodes([(q, 0) for q in range(4)]), mode="all_subsets")


def test_budget_exhaustion_reported():
    config = from_nodes([(0, 0), (0, 1), (0, 2)])
    result = explorer.explore(config, mode="serial", max_states=2)
    assert result.budget_exhausted
    assert not result.ok


def _window_polyhex_count(n: int) -> int:
    """Brute-force count of connected n-shapes, translation-normalized.

    Any connected n-shape spans at most n-1 in q and in r, so every
    translation class has exactly one representative inside the n x n
    window with q_min = r_min = 0.
    """
    window = [(q, r) for q in range(n) for r in range(n)]
    count = 0
    for combo in itertools.combinations(window, n):
        if min(q for q, _ in combo) != 0 or min(r for _, r in combo) != 0:
            continue
        seen = {combo[0]}
        frontier = [combo[0]]
        cells = set(combo)
        while frontier:
            v = frontier.pop()
            for w in grid.neighbors(v):
                if w in cells and w not in seen:
                    seen.add(w)
                    frontier.append(w)
        if len(seen) == n:
            count += 1
    return count


@pytest.mark.parametrize("n,count", [(1, 1), (2, 3), (3, 11), (4, 44)])
def test_enumerate_initial_counts(n, count):
    shapes = list(explorer.enumerate_initial(n))
    assert len(shapes) == count
    assert count == _window_polyhex_count(n)
    keys = {c.canonical_key() for c in shapes}
    assert len(keys) == count
    for c in shapes:
        assert c.is_initial()
        box = c.bounding_box()
        assert (box.q_min, box.r_min) == (0, 0)


def test_enumerate_initial_guard():
    with pytest.raises(explorer.ExplorerError):
        list(explorer.enumerate_initial(7))
    with pytest.raises(explorer.ExplorerError):
        list(explorer.enumerate_initial(0))


def test_broken_rule_yields_stuck_counterexample(monkeypatch):
    def lazy(view):
        if view.center_state != CONTRACTED:
            raise ValueError("needs a contracted center")
        return None

    monkeypatch.setattr(rule, "decide", lazy)
    result = explorer.explore(from_nodes([(0, 0), (0, 1)]), mode="serial")
    assert not result.ok
    assert any(v["kind"] == "stuck non-final state" for v in result.violations)
    trace = result.counterexample
    assert trace is not None
    assert replay(trace).ok


def test_broken_rule_yields_potential_counterexample(monkeypatch):
    def westward(view):
        if view.center_state != CONTRACTED:
            raise ValueError("needs a contracted center")
        if not view.occupied_at(9):   # unit W position
            return grid.W
        return None

    monkeypatch.setattr(rule, "decide", westward)
    result = explorer.explore(from_nodes([(0, 0), (0, 1)]), mode="serial")
    assert not result.ok
    assert any(v["kind"] == "potential did not increase"
               for v in result.violations)
    trace = result.counterexample
    assert trace is not None
    report = replay(trace)
    assert report.ok
    # the witness path really does end in a westward move
    assert any(rec.contractions for rec in trace.records)


def test_sweep_n4_serial_all_sinks_final():
    for config in explorer.enumerate_initial(4):
        result = explorer.explore(config, mode="serial")
        assert result.ok, (config.canonical_key(), result.violations)
        assert result.terminals
        assert result.max_moves <= 2 * 4 * 3
