"""Acceptance suite: one test and one verdict line per criterion.

Verdict lines are echoed in the terminal summary. Numeric thresholds are
exact where the guarantee is exact (move budgets, frozen counts) and use
the stated interval for the scaling fit; there are no hidden tolerances.
"""

import json
import math

import pytest
from click.testing import CliRunner
from fastapi.testclient import TestClient

from wrain import checkers, engine, explorer, instances, tracefile
from wrain.cli import main as cli_main
from wrain.model import from_nodes
from wrain.rng import mix_seed
from wrain.scheduler import FirstById, FullySync, parse_adversary, parse_scheduler
from wrain.service import PROTOCOL_VERSION, create_app

# 10,000 seeded runs: (scheduler kind, n, run count)
SUITE_BASE = 20260501
SUITE_PLAN = (
    ("serial", 5, 3500), ("subset", 5, 3500),
    ("serial", 10, 1200), ("subset", 10, 1200),
    ("serial", 20, 300), ("subset", 20, 300),
)

# frozen on the first oracle run; hex blobs settle in exactly n(n-1)/2 moves
HEX_SYNC_MOVES = {7: 21, 19: 171, 37: 666, 61: 1830}

SHAPE_COUNTS = {1: 1, 2: 3, 3: 11, 4: 44}

DETERMINISM_TRIPLES = (
    ("vline", 6, 0, "serial:42", "random:42"),
    ("hex", 13, 0, "subset:9", "random:9"),
    ("random", 17, 3, "sync", "first"),
)


def _record(log, criterion, ok, detail) -> None:
    log.append(f"criterion {criterion}: {'PASS' if ok else 'FAIL'} ({detail})")


@pytest.fixture(scope="module")
def randomized_suite():
    rows = []
    for kind, n, count in SUITE_PLAN:
        for i in range(count):
            shape_seed = mix_seed(SUITE_BASE + n, i)
            run_seed = mix_seed(shape_seed, 1)
            config = instances.generate("random", n, shape_seed)
            trace = engine.run(
                config,
                parse_scheduler(kind, run_seed),
                parse_adversary("random", run_seed),
            )
            by_name = {r.name: r for r in checkers.check_all(trace)}
            m = by_name["moves"].metrics
            rows.append({
                "kind": kind, "n": n, "seed": run_seed,
                "stop": trace.summary.stop,
                "moves": m["moves"], "budget": m["budget"],
                "max_e": m["max_e"], "max_se": m["max_se"],
                "status": {name: r.status for name, r in by_name.items()},
            })
    return rows


def test_criterion_1_exhaustive_small_n(acceptance_log):
    counts = {}
    states = 0
    violations = []
    for n in SHAPE_COUNTS:
        shapes = list(explorer.enumerate_initial(n))
        counts[n] = len(shapes)
        for config in shapes:
            result = explorer.explore(config, mode="serial")
            states += result.states
            if not (result.ok and result.terminals):
                violations.append((config.canonical_key(), result.violations))
    ok = counts == SHAPE_COUNTS and not violations
    _record(
        acceptance_log, 1, ok,
        f"{sum(counts.values())} instances (n 1..4), {states} states explored, "
        f"{len(violations)} counterexamples",
    )
    assert counts == SHAPE_COUNTS
    assert not violations, violations[:2]


def test_criterion_2_serializability_probe(acceptance_log):
    mismatches = []
    instances_checked = 0
    for n in (1, 2, 3):
        for config in explorer.enumerate_initial(n):
            instances_checked += 1
            serial = explorer.explore(config, mode="serial")
            subsets = explorer.explore(config, mode="all_subsets")
            if (not serial.ok or not subsets.ok
                    or serial.terminals != subsets.terminals):
                mismatches.append(config.canonical_key())
    _record(
        acceptance_log, 2, not mismatches,
        f"{instances_checked} instances (n 1..3), terminal sets equal in both modes",
    )
    assert not mismatches, mismatches


def test_criterion_3_move_bounds(randomized_suite, acceptance_log):
    total = len(randomized_suite)
    bad = [
        row for row in randomized_suite
        if not (row["stop"] == "final"
                and row["moves"] <= row["budget"]
                and row["max_e"] <= row["n"] - 1
                and row["max_se"] <= row["n"] - 1)
    ]
    peak = max(row["moves"] / row["budget"] for row in randomized_suite)
    ok = total == 10_000 and not bad
    _record(
        acceptance_log, 3, ok,
        f"{total} runs, 0 over budget, peak budget use {peak:.0%}, "
        f"per-particle E/SE <= n-1 exact",
    )
    assert total == 10_000
    assert not bad, bad[:3]


def test_criterion_4_quadratic_scaling(acceptance_log):
    measured = {}
    for n in sorted(HEX_SYNC_MOVES):
        trace = engine.run(instances.generate("hex", n), FullySync(), FirstById())
        assert trace.summary.terminated
        measured[n] = trace.summary.moves
    xs = [math.log(n) for n in sorted(measured)]
    ys = [math.log(measured[n]) for n in sorted(measured)]
    xbar, ybar = sum(xs) / len(xs), sum(ys) / len(ys)
    slope = (
        sum((x - xbar) * (y - ybar) for x, y in zip(xs, ys))
        / sum((x - xbar) ** 2 for x in xs)
    )
    ok = measured == HEX_SYNC_MOVES and 1.6 <= slope <= 2.2
    _record(
        acceptance_log, 4, ok,
        f"hex sync moves {measured}, log-log slope {slope:.3f} in [1.6, 2.2]",
    )
    assert measured == HEX_SYNC_MOVES
    assert 1.6 <= slope <= 2.2


def test_criterion_5_trace_checks_on_suite(randomized_suite, acceptance_log):
    names = ("uniqueness", "bbox", "connectivity")
    bad = [
        row for row in randomized_suite
        if any(row["status"][name] != "pass" for name in names)
    ]
    _record(
        acceptance_log, 5, not bad,
        f"uniqueness/bbox/connectivity pass on {len(randomized_suite) - len(bad)}"
        f"/{len(randomized_suite)} runs",
    )
    assert not bad, bad[:3]


def test_criterion_6_running_example_replays(acceptance_log):
    pair = engine.run(from_nodes([(0, 0), (0, 1)]), FullySync(), FirstById())
    triangle = engine.run(
        from_nodes([(0, 0), (0, 1), (1, 0)]), FullySync(), FirstById()
    )
    ok = (
        pair.summary.steps == 2 and pair.summary.moves == 1
        and pair.records[0].expansions == ((1, "SE"),)
        and pair.records[1].contractions == ((1, (1, 0)),)
        and pair.records[-1].config_key == "0,0,.;1,0,."
        and triangle.summary.steps == 4 and triangle.summary.moves == 2
        and triangle.records[0].expansions == ((1, "SE"),)
        and triangle.records[1].expansions == ((2, "E"),)
        and triangle.records[2].contractions == ((2, (2, 0)),)
        and triangle.records[3].contractions == ((1, (1, 0)),)
        and triangle.records[-1].config_key == "0,0,.;1,0,.;2,0,."
        and not any(r.tie_breaks for r in triangle.records)
    )
    _record(
        acceptance_log, 6, ok,
        "pair: 2 rounds 1 move; triangle: 4 rounds 2 moves; exact structure",
    )
    assert ok


def test_criterion_7_determinism(acceptance_log, tmp_path):
    runner = CliRunner()
    replays_ok = 0
    for shape, n, gseed, sched, adv in DETERMINISM_TRIPLES:
        config = instances.generate(shape, n, gseed)
        paths = []
        for k in range(2):
            trace = engine.run(
                config, parse_scheduler(sched), parse_adversary(adv)
            )
            path = tmp_path / f"{shape}{n}-{k}.trace"
            tracefile.write_trace(trace, path)
            paths.append(path)
        assert paths[0].read_bytes() == paths[1].read_bytes(), (shape, n, sched)
        result = runner.invoke(cli_main, ["replay", str(paths[0])])
        assert result.exit_code == 0 and "replay: ok" in result.output, result.output
        replays_ok += 1
    _record(
        acceptance_log, 7, replays_ok == len(DETERMINISM_TRIPLES),
        f"{len(DETERMINISM_TRIPLES)} triples byte-identical across reruns, "
        f"all replays ok",
    )


def _send(client, message):
    message.setdefault("version", PROTOCOL_VERSION)
    r = client.post("/session", content=json.dumps(message) + "\n")
    return r.status_code, json.loads(r.text)


def test_criterion_8_session_fidelity(acceptance_log, tmp_path):
    """Session protocol half of the UI criterion (runs without the UI).

    A played-out session exports a trace the CLI replays cleanly, the one
    reachable tie-break flows through step messages verbatim, and node
    predicates reported by the server match CLI inspect output. The
    3-particle start never produces a conflict under this rule (only one
    particle is ever enabled), so the tie-break leg uses a pusher
    instance where two movers converge on one node.
    """
    client = TestClient(create_app())
    runner = CliRunner()

    # triangle, played like the sync button: activate everyone each round
    _, body = _send(client, {"type": "new", "instance": "0 0\n0 1\n1 0\n"})
    sid = body["session"]
    rounds = 0
    while not body["metrics"]["final"]:
        _, body = _send(client, {"type": "step", "session": sid, "ids": [0, 1, 2]})
        assert body["applied"] is True
        rounds += 1
    triangle_ok = rounds == 4 and body["metrics"]["moves"] == 2
    _, body = _send(client, {"type": "export", "session": sid})
    exported = tmp_path / "triangle-session.trace"
    exported.write_text(body["trace"])
    result = runner.invoke(cli_main, ["replay", str(exported)])
    triangle_ok = triangle_ok and result.exit_code == 0

    # tie-break leg: two particles converge on (1,0); the human picks id 2
    _, body = _send(client, {"type": "new", "instance": "-1 0 E\n0 0\n0 1\n"})
    sid2 = body["session"]
    _send(client, {"type": "step", "session": sid2, "ids": [1, 2]})
    _, body = _send(client, {"type": "step", "session": sid2, "ids": [1, 2]})
    saw_conflict = body["applied"] is False and body["conflicts"] == [
        {"kind": "node", "site": [1, 0], "group": [1, 2]}
    ]
    _, body = _send(client, {
        "type": "step", "session": sid2, "ids": [1, 2],
        "tie_breaks": [{"site": [1, 0], "chosen": 2}],
    })
    _, body = _send(client, {"type": "export", "session": sid2})
    tie_trace = tmp_path / "tiebreak-session.trace"
    tie_trace.write_text(body["trace"])
    recorded = tracefile.read_trace(tie_trace)
    tie_ok = (
        saw_conflict
        and any(
            tb.chosen == 2 and tb.site == (1, 0)
            for rec in recorded.records for tb in rec.tie_breaks
        )
        and runner.invoke(cli_main, ["replay", str(tie_trace)]).exit_code == 0
    )

    # predicate fidelity: mid-session server state vs CLI inspect, 20 nodes
    _, body = _send(client, {"type": "new", "instance": "0 0\n0 1\n1 0\n"})
    sid3 = body["session"]
    _, body = _send(client, {"type": "step", "session": sid3, "ids": [1]})
    lines = []
    for p in body["config"]["particles"]:
        q, r = p["node"]
        lines.append(f"{q} {r}" if p["state"] == "." else f"{q} {r} {p['state']}")
    mid_instance = tmp_path / "mid.txt"
    mid_instance.write_text("\n".join(lines) + "\n")
    nodes = body["nodes"]
    step_size = max(1, len(nodes) // 20)
    sampled = nodes[::step_size][:20]
    args = [f"{e['node'][0]},{e['node'][1]}" for e in sampled]
    result = runner.invoke(cli_main, ["inspect", str(mid_instance), "--", *args])
    cli_entries = [json.loads(ln) for ln in result.output.splitlines()]
    predicates_ok = len(sampled) == 20 and cli_entries == sampled

    ok = triangle_ok and tie_ok and predicates_ok
    _record(
        acceptance_log, 8, ok,
        "session exports replay ok, tie-break recorded verbatim, "
        "20/20 node predicates match CLI inspect",
    )
    assert triangle_ok
    assert tie_ok
    assert predicates_ok
