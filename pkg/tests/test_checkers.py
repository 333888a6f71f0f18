import dataclasses

from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import initial_configurations
from wrain.checkers import (
    all_passed,
    check_all,
    check_bbox,
    check_connectivity,
    check_moves,
    check_progress,
    check_uniqueness,
)
from wrain.engine import StepRecord, Trace, run
from wrain.model import from_nodes
from wrain.scheduler import FirstById, FullySync, SerialRandom, SubsetRandom


def sync_trace(nodes):
    return run(from_nodes(nodes), FullySync(), FirstById())


def test_triangle_trace_passes_everything(triangle_config):
    trace = run(triangle_config, FullySync(), FirstById())
    reports = check_all(trace)
    assert all_passed(reports), [r.line() for r in reports]
    by_name = {r.name: r for r in reports}
    # four changed rounds plus the initial configuration
    assert by_name["uniqueness"].metrics["distinct_configs"] == 5
    assert by_name["moves"].metrics["moves"] == 2
    assert by_name["connectivity"].metrics["recoveries"] >= 1


def test_pair_trace_passes(pair_config):
    trace = run(pair_config, FullySync(), FirstById())
    assert all_passed(check_all(trace))
    assert check_connectivity(trace).metrics["recoveries"] == 0


def test_zero_step_trace():
    trace = run(from_nodes([(0, 0)]), FullySync(), FirstById())
    assert all_passed(check_all(trace))
    assert check_uniqueness(trace).passed


def test_uniqueness_catches_repeats(pair_config):
    trace = run(pair_config, FullySync(), FirstById())
    # a synthetic step that walks the mover back to the initial shape
    back = dataclasses.replace(
        trace.records[-1],
        round=3,
        contractions=((1, (0, 1)),),
        expansions=(),
        config_key=trace.initial.canonical_key(),
    )
    broken = Trace(1, 2, 0, trace.initial, list(trace.records) + [back])
    report = check_uniqueness(broken)
    assert not report.passed
    assert report.witness["round"] == 3
    assert report.witness["first_seen_round"] == 0


def test_uniqueness_catches_translated_repeats():
    # two contracted steps east: same shape, different nodes
    initial = from_nodes([(0, 0)])
    rec1 = StepRecord(1, (0,), ((0, "contract"),), (), ((0, (1, 0)),), (),
                      "1,0,.")
    rec2 = StepRecord(2, (0,), ((0, "contract"),), (), ((0, (2, 0)),), (),
                      "2,0,.")
    trace = Trace(1, 1, 0, initial, [rec1, rec2])
    report = check_uniqueness(trace)
    assert not report.passed
    assert report.witness["mode"] == "translated"


def test_bbox_catches_westward_movement():
    initial = from_nodes([(0, 0), (1, 0)])
    rec = StepRecord(1, (0,), ((0, "contract"),), (), ((0, (-1, 0)),), (),
                     "-1,0,.;1,0,.")
    trace = Trace(1, 2, 0, initial, [rec])
    report = check_bbox(trace)
    assert not report.passed
    assert report.witness["kind"] == "q_min decreased"


def test_bbox_catches_northward_movement():
    initial = from_nodes([(0, 0), (1, 0)])
    rec = StepRecord(1, (0,), ((0, "contract"),), (), ((0, (-1, 1)),), (),
                     "-1,1,.;1,0,.")
    trace = Trace(1, 2, 0, initial, [rec])
    assert not check_bbox(trace).passed


def test_bbox_metrics(triangle_config):
    trace = run(triangle_config, FullySync(), FirstById())
    report = check_bbox(trace)
    assert report.passed
    assert report.metrics["initial_sides"] == (1, 1)
    assert report.metrics["union_sides"] == (2, 1)


def test_progress_on_truncated_trace(pair_config):
    trace = run(pair_config, FullySync(), FirstById(), max_steps=1)
    assert check_progress(trace).passed  # expanded particle still enabled


def test_progress_fails_on_stuck_islands():
    trace = run(from_nodes([(0, 0), (5, 0)]), FullySync(), FirstById(),
                strict=False)
    report = check_progress(trace)
    assert not report.passed


def test_connectivity_inconclusive_when_cut_mid_separation(triangle_config):
    trace = run(triangle_config, FullySync(), FirstById(), max_steps=3)
    report = check_connectivity(trace)
    assert report.status == "inconclusive"
    assert report.witness["separated_since_round"] == 3


def test_connectivity_requires_contiguous_terminal_line():
    trace = run(from_nodes([(0, 0), (5, 0)]), FullySync(), FirstById(),
                strict=False)
    # force the summary to claim termination; the separated line must fail
    trace.summary = dataclasses.replace(trace.summary, terminated=True)
    report = check_connectivity(trace)
    assert not report.passed


def test_moves_requires_termination(pair_config):
    trace = run(pair_config, FullySync(), FirstById(), max_steps=1)
    assert check_moves(trace).status == "inconclusive"


def test_moves_catches_blowup(pair_config):
    trace = run(pair_config, FullySync(), FirstById())
    report = check_moves(trace)
    assert report.passed
    assert report.metrics == {"moves": 1, "budget": 4, "max_e": 0, "max_se": 1}
    # a forged extra move breaks the per-particle bound (n-1 = 1)
    extra = StepRecord(
        3, (1,), ((1, "contract"),), (), ((1, (2, -1)),), (), "0,0,.;2,-1,."
    )
    forged = Trace(1, 2, 0, trace.initial, list(trace.records) + [extra],
                   trace.summary)
    bad = check_moves(forged)
    assert not bad.passed


def test_check_all_flags_limit_stop(pair_config):
    trace = run(pair_config, FullySync(), FirstById(), max_steps=1)
    reports = check_all(trace)
    assert not all_passed(reports)
    assert reports[0].name == "terminated"
    assert not reports[0].passed
    assert reports[0].witness == {"stop": "limit"}


def test_report_lines_are_printable(triangle_config):
    trace = run(triangle_config, FullySync(), FirstById())
    for report in check_all(trace):
        line = report.line()
        assert report.name in line
        assert report.status in line


@settings(max_examples=30, deadline=None)
@given(
    initial_configurations(min_size=2, max_size=7),
    st.integers(min_value=0, max_value=2**32),
    st.sampled_from(["serial", "subset", "sync"]),
)
def test_engine_runs_always_pass_all_checks(config, seed, kind):
    sched = {
        "serial": lambda: SerialRandom(seed),
        "subset": lambda: SubsetRandom(seed, 0.4),
        "sync": FullySync,
    }[kind]()
    trace = run(config, sched, FirstById())
    reports = check_all(trace)
    assert all_passed(reports), [r.line() for r in reports]
