"""Trace checkers: the run-level guarantees, verified record by record.

Each checker is a pure function of a trace (initial configuration plus
applied contractions/expansions per round); none of them consult engine
internals. A failing report always carries a witness with the first
offending round.

The checks, in terms of what they assert over a run:
  - uniqueness: no configuration ever repeats, neither on the same nodes
    nor anywhere else (translated), no-op rounds exempt;
  - bbox: particles never move W or NE (q_min non-decreasing, r_max
    non-increasing, the floor row constant) and eastward growth of the
    union bounding box stays within n edge lengths;
  - progress: a non-final reached configuration always has some enabled
    particle (no deadlock short of completion);
  - connectivity: initially adjacent particles may drift into different
    components mid-run, but every separation is healed within the trace,
    and a terminated run ends contracted, connected, and on the floor;
  - moves: at most 2n(n-1) completed moves overall, and per particle at
    most n-1 east moves and n-1 southeast moves.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import grid, rule
from .engine import Trace
from .model import CONTRACTED, Configuration, components


@dataclass
class CheckReport:
    name: str
    status: str                    # "pass" | "fail" | "inconclusive"
    witness: Optional[dict] = None
    metrics: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def line(self) -> str:
        parts = [f"{self.name}: {self.status}"]
        if self.metrics:
            parts.append(
                " ".join(f"{k}={v}" for k, v in sorted(self.metrics.items()))
            )
        if self.witness:
            parts.append(f"witness={self.witness}")
        return "  ".join(parts)


class _Facts:
    """Everything the checkers need, computed in one pass over a trace."""

    def __init__(self, trace: Trace):
        self.trace = trace
        self.n = trace.n
        self.floor = trace.floor
        summary = trace.summary
        self.terminated = summary.terminated if summary else False
        self._fold()

    def _fold(self) -> None:
        trace = self.trace
        particles = dict(trace.initial.particles)
        positions = sorted(particles)
        box = grid.bounding_box(positions)
        self.initial_box = box
        self.union_box = box
        self.abs_keys: list[tuple[int, str]] = [(0, trace.initial.canonical_key())]
        self.trans_keys: list[tuple[int, str]] = [
            (0, _translated_key(particles))
        ]
        self.monotonicity_breach: Optional[dict] = None
        self.total_moves = 0
        self.e_moves = [0] * self.n
        self.se_moves = [0] * self.n
        self.bad_moves: list[dict] = []

        adjacent_pairs = [
            (a, b)
            for a in range(self.n)
            for b in range(a + 1, self.n)
            if grid.distance(positions[a], positions[b]) == 1
        ]
        comp_of = _component_ids(particles.keys(), positions)
        separated_since: dict[tuple[int, int], int] = {}
        self.separation_witness: Optional[dict] = None
        self.recoveries = 0

        prev_box = box
        for rec in trace.records:
            if not rec.changed:
                continue
            moved = False
            for pid, target in rec.contractions:
                v = positions[pid]
                d = (target[0] - v[0], target[1] - v[1])
                if d == grid.OFFSETS[grid.E]:
                    self.e_moves[pid] += 1
                elif d == grid.OFFSETS[grid.SE]:
                    self.se_moves[pid] += 1
                else:
                    self.bad_moves.append(
                        {"round": rec.round, "particle": pid, "offset": d}
                    )
                self.total_moves += 1
                del particles[v]
                particles[target] = None
                positions[pid] = target
                moved = True
            for pid, d in rec.expansions:
                particles[positions[pid]] = d

            self.abs_keys.append((rec.round, rec.config_key))
            self.trans_keys.append((rec.round, _translated_key(particles)))

            if moved:
                cur_box = grid.bounding_box(particles.keys())
                if self.monotonicity_breach is None:
                    if cur_box.q_min < prev_box.q_min:
                        self.monotonicity_breach = {
                            "round": rec.round, "kind": "q_min decreased"
                        }
                    elif cur_box.r_max > prev_box.r_max:
                        self.monotonicity_breach = {
                            "round": rec.round, "kind": "r_max increased"
                        }
                    elif cur_box.r_min != self.floor:
                        self.monotonicity_breach = {
                            "round": rec.round, "kind": "floor row changed"
                        }
                prev_box = cur_box
                self.union_box = self.union_box.union(cur_box)

                comp_of = _component_ids(particles.keys(), positions)
                for pair in adjacent_pairs:
                    a, b = pair
                    if comp_of[a] != comp_of[b]:
                        separated_since.setdefault(pair, rec.round)
                    elif pair in separated_since:
                        del separated_since[pair]
                        self.recoveries += 1

        self.open_separations = {
            pair: since for pair, since in separated_since.items()
        }
        self.end_config = Configuration(particles)
        self.end_positions = tuple(positions)
        self.distinct_configs = len({k for _, k in self.abs_keys})


def _translated_key(particles: dict) -> str:
    q0 = min(q for q, _ in particles)
    r0 = min(r for _, r in particles)
    entries = sorted(
        (q - q0, r - r0, s or CONTRACTED) for (q, r), s in particles.items()
    )
    return ";".join(f"{q},{r},{s}" for q, r, s in entries)


def _component_ids(bodies, positions) -> list[int]:
    label: dict = {}
    for i, comp in enumerate(components(bodies)):
        for v in comp:
            label[v] = i
    return [label[v] for v in positions]


def _first_repeat(keys: list[tuple[int, str]]) -> Optional[dict]:
    seen: dict[str, int] = {}
    for rnd, key in keys:
        if key in seen:
            return {"round": rnd, "first_seen_round": seen[key], "key": key}
        seen[key] = rnd
    return None


def check_uniqueness(trace: Trace, facts: Optional[_Facts] = None) -> CheckReport:
    facts = facts or _Facts(trace)
    repeat = _first_repeat(facts.abs_keys)
    mode = "absolute"
    if repeat is None:
        repeat = _first_repeat(facts.trans_keys)
        mode = "translated"
    metrics = {"distinct_configs": facts.distinct_configs}
    if repeat is not None:
        repeat["mode"] = mode
        return CheckReport("uniqueness", "fail", repeat, metrics)
    return CheckReport("uniqueness", "pass", None, metrics)


def check_bbox(trace: Trace, facts: Optional[_Facts] = None) -> CheckReport:
    facts = facts or _Facts(trace)
    init, union = facts.initial_box, facts.union_box
    metrics = {
        "initial_sides": (init.q_side, init.r_side),
        "union_sides": (union.q_side, union.r_side),
    }
    if facts.monotonicity_breach is not None:
        return CheckReport("bbox", "fail", facts.monotonicity_breach, metrics)
    if union.q_side > init.q_side + facts.n:
        return CheckReport(
            "bbox", "fail",
            {"kind": "eastward growth exceeds n",
             "grew": union.q_side - init.q_side},
            metrics,
        )
    if union.r_side > init.r_side:
        return CheckReport(
            "bbox", "fail", {"kind": "box grew along the SW-NE axis"}, metrics
        )
    return CheckReport("bbox", "pass", None, metrics)


def check_progress(trace: Trace, facts: Optional[_Facts] = None) -> CheckReport:
    """Nothing short of completion may be stuck.

    Only the last distinct configuration needs a direct enabled-particle
    probe: every earlier one was followed by a round that changed it, and
    the particle that made that change was enabled in it.
    """
    facts = facts or _Facts(trace)
    end = facts.end_config
    if end.is_final(facts.floor):
        return CheckReport("progress", "pass", None, {"final": True})
    enabled = [
        pid for pid, v in enumerate(facts.end_positions) if rule.enabled(end, v)
    ]
    if enabled:
        return CheckReport(
            "progress", "pass", None, {"final": False, "enabled": len(enabled)}
        )
    return CheckReport(
        "progress", "fail",
        {"round": trace.records[-1].round if trace.records else 0,
         "key": end.canonical_key()},
        {"final": False},
    )


def check_connectivity(trace: Trace, facts: Optional[_Facts] = None) -> CheckReport:
    facts = facts or _Facts(trace)
    end = facts.end_config
    metrics = {"recoveries": facts.recoveries}
    if facts.open_separations:
        pair, since = min(facts.open_separations.items(), key=lambda kv: kv[1])
        witness = {"pair": pair, "separated_since_round": since}
        if not facts.terminated:
            return CheckReport("connectivity", "inconclusive", witness, metrics)
        return CheckReport("connectivity", "fail", witness, metrics)
    if not facts.terminated:
        return CheckReport("connectivity", "inconclusive", None, metrics)
    bodies = sorted(end.bodies())
    flaws = []
    if end.expanded_count:
        flaws.append("not all contracted")
    if any(r != facts.floor for _, r in bodies):
        flaws.append("not on the floor row")
    if not end.is_connected():
        flaws.append("not connected")
    qs = [q for q, _ in bodies]
    if any(b - a != 1 for a, b in zip(qs, qs[1:])):
        flaws.append("line is not contiguous")
    if flaws:
        return CheckReport("connectivity", "fail", {"terminal": flaws}, metrics)
    return CheckReport("connectivity", "pass", None, metrics)


def check_moves(trace: Trace, facts: Optional[_Facts] = None) -> CheckReport:
    facts = facts or _Facts(trace)
    n = facts.n
    budget = 2 * n * (n - 1)
    metrics = {
        "moves": facts.total_moves,
        "budget": budget,
        "max_e": max(facts.e_moves, default=0),
        "max_se": max(facts.se_moves, default=0),
    }
    if not facts.terminated:
        return CheckReport("moves", "inconclusive", None, metrics)
    if facts.bad_moves:
        return CheckReport("moves", "fail", facts.bad_moves[0], metrics)
    if facts.total_moves > budget:
        return CheckReport(
            "moves", "fail", {"kind": "total moves exceed 2n(n-1)"}, metrics
        )
    for pid in range(n):
        if facts.e_moves[pid] > n - 1 or facts.se_moves[pid] > n - 1:
            return CheckReport(
                "moves", "fail",
                {"particle": pid, "e": facts.e_moves[pid],
                 "se": facts.se_moves[pid]},
                metrics,
            )
    return CheckReport("moves", "pass", None, metrics)


def check_all(trace: Trace) -> list[CheckReport]:
    """All checks over a single pass, preceded by the termination flag.

    A trace without a summary is an honest prefix (an exported session,
    say) and claims nothing about termination, so that report comes back
    inconclusive rather than failed.
    """
    facts = _Facts(trace)
    if trace.summary is None:
        status, witness = "inconclusive", {"stop": "no summary"}
    elif facts.terminated:
        status, witness = "pass", None
    else:
        status, witness = "fail", {"stop": trace.summary.stop}
    reports = [
        CheckReport(
            "terminated",
            status,
            witness,
            {"steps": trace.summary.steps if trace.summary else len(trace.records)},
        ),
        check_uniqueness(trace, facts),
        check_bbox(trace, facts),
        check_progress(trace, facts),
        check_connectivity(trace, facts),
        check_moves(trace, facts),
    ]
    return reports


def all_passed(reports: list[CheckReport]) -> bool:
    return all(r.passed for r in reports)
