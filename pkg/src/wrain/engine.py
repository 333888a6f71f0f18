"""Round-based execution: activation, conflicts, commitment, traces.

Each round takes a snapshot of the configuration, computes every activated
particle's decision against that snapshot, then applies the outcomes in
two phases:

  1. contractions: activated expanded particles whose target node was
     empty in the snapshot, grouped by target node; exactly one per group
     completes its move, the rest stay expanded (they are committed and
     cannot withdraw);
  2. expansions: activated contracted particles whose rule decision was an
     expansion, grouped by claimed edge; exactly one per edge succeeds,
     the rest stay contracted.

Group winners are picked by an adversary policy, or supplied explicitly
(interactive sessions). A "move" is a completed contraction; expansions
are counted separately.

Particle ids exist only at this layer, for schedulers, tie-breaks, and
replay. The decision rule itself never sees them.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping, Optional, Sequence

from . import grid, rule
from .grid import BoundingBox, Node
from .model import Configuration, View

TRACE_VERSION = 1

# decision strings recorded per activated particle
D_NOOP = "noop"
D_CONTRACT = "contract"
D_HOLD = "hold"


def d_expand(d: str) -> str:
    return f"expand:{d}"


class EngineError(Exception):
    pass


class FairnessError(EngineError):
    pass


class SchedulerError(EngineError):
    pass


class ConflictsPending(EngineError):
    """Raised when tie-breaks are needed but no policy was supplied."""

    def __init__(self, conflicts: list[dict]):
        self.conflicts = conflicts
        sites = ", ".join(str(c["site"]) for c in conflicts)
        super().__init__(f"unresolved conflicts at {sites}")


@dataclass(frozen=True)
class TieBreak:
    kind: str                      # "node" or "edge"
    site: tuple                    # Node, or (Node, Node) sorted for edges
    group: tuple[int, ...]
    chosen: int


@dataclass(frozen=True)
class StepRecord:
    round: int
    activated: tuple[int, ...]
    decisions: tuple[tuple[int, str], ...]
    tie_breaks: tuple[TieBreak, ...]
    contractions: tuple[tuple[int, Node], ...]   # (id, node moved into)
    expansions: tuple[tuple[int, str], ...]      # (id, direction)
    config_key: str

    @property
    def changed(self) -> bool:
        return bool(self.contractions or self.expansions)


@dataclass(frozen=True)
class RunSummary:
    steps: int
    moves: int
    expansions: int
    union_bbox: BoundingBox
    terminated: bool
    stop: str                      # "final" | "limit" | "deadlock"


@dataclass
class Trace:
    version: int
    n: int
    floor: int
    initial: Configuration
    records: list[StepRecord]
    summary: Optional[RunSummary] = None


@dataclass(frozen=True)
class RunState:
    config: Configuration
    floor: int
    positions: tuple[Node, ...]        # id -> body node
    step_count: int
    move_count: int
    expansion_count: int
    e_moves: tuple[int, ...]
    se_moves: tuple[int, ...]
    initial_bbox: BoundingBox
    union_bbox: BoundingBox
    last_active: tuple[int, ...]       # id -> round of latest activation
    fairness_window: int
    latched: tuple[Optional[str], ...]  # stale-view mode only

    @property
    def n(self) -> int:
        return len(self.positions)

    @property
    def ids(self) -> range:
        return range(len(self.positions))

    def state_of(self, pid: int) -> Optional[str]:
        return self.config.state(self.positions[pid])

    def is_final(self) -> bool:
        return self.config.is_final(self.floor)


def initial_state(
    config: Configuration,
    *,
    fairness_window: Optional[int] = None,
    strict: bool = True,
) -> RunState:
    """Set up a run: assign ids by sorted body node, fix the floor row."""
    problems = config.validate()
    if problems:
        raise EngineError("invalid configuration: " + "; ".join(problems))
    if strict and not config.is_initial():
        raise EngineError("initial configuration must be contracted and connected")
    positions = tuple(sorted(config.bodies()))
    n = len(positions)
    box = config.bounding_box()
    zeros = (0,) * n
    return RunState(
        config=config,
        floor=box.r_min,
        positions=positions,
        step_count=0,
        move_count=0,
        expansion_count=0,
        e_moves=zeros,
        se_moves=zeros,
        initial_bbox=box,
        union_bbox=box,
        last_active=zeros,
        fairness_window=fairness_window if fairness_window is not None else 2 * n,
        latched=(None,) * n,
    )


def enabled_set(state: RunState) -> tuple[int, ...]:
    """Ids whose activation would change the configuration."""
    return tuple(
        pid for pid in state.ids
        if rule.enabled(state.config, state.positions[pid])
    )


def _normalize_activated(state: RunState, activated: Sequence[int]) -> tuple[int, ...]:
    ids = sorted(set(activated))
    if not ids:
        raise EngineError("activation set is empty")
    if ids[0] < 0 or ids[-1] >= state.n:
        bad = [i for i in ids if not 0 <= i < state.n]
        raise EngineError(f"unknown particle ids: {bad}")
    return tuple(ids)


def _pick(
    kind: str,
    site: tuple,
    group: list[int],
    adversary,
    choices: Optional[Mapping],
    tie_breaks: list[TieBreak],
    pending: list[dict],
) -> Optional[int]:
    if len(group) == 1:
        return group[0]
    if choices is not None and site in choices:
        chosen = choices[site]
        if chosen not in group:
            raise EngineError(f"choice {chosen} is not in conflict group {group}")
    elif adversary is not None:
        if kind == "node":
            chosen = adversary.break_node_conflict(site, tuple(group))
        else:
            chosen = adversary.break_edge_conflict(site, tuple(group))
        if chosen not in group:
            raise EngineError(f"adversary chose {chosen} outside group {group}")
    else:
        pending.append({"kind": kind, "site": site, "group": tuple(group)})
        return None
    tie_breaks.append(TieBreak(kind, site, tuple(group), chosen))
    return chosen


def step_round(
    state: RunState,
    activated: Sequence[int],
    adversary=None,
    choices: Optional[Mapping] = None,
    stale: bool = False,
) -> tuple[RunState, StepRecord]:
    """Apply one round; returns the successor state and its record.

    choices maps conflict sites to the winning id and takes precedence
    over the adversary policy; with neither present, a conflict raises
    ConflictsPending listing every unresolved group.
    """
    ids = _normalize_activated(state, activated)
    config = state.config
    P = config.particles
    decisions: list[tuple[int, str]] = []
    contract_groups: dict[Node, list[int]] = {}
    expand_claims: dict[tuple[Node, Node], list[tuple[int, str]]] = {}
    new_latched = list(state.latched)

    for pid in ids:
        v = state.positions[pid]
        s = P[v]
        if stale:
            decisions.append(
                _stale_decide(state, pid, v, s, contract_groups, expand_claims,
                              new_latched)
            )
            continue
        if s is not None:
            target = grid.neighbor(v, s)
            if target in P:
                decisions.append((pid, D_HOLD))
            else:
                decisions.append((pid, D_CONTRACT))
                contract_groups.setdefault(target, []).append(pid)
        else:
            action = rule.decide(View.from_config(config, v))
            if action is None:
                decisions.append((pid, D_NOOP))
            else:
                decisions.append((pid, d_expand(action)))
                target = grid.neighbor(v, action)
                edge = (min(v, target), max(v, target))
                expand_claims.setdefault(edge, []).append((pid, action))

    tie_breaks: list[TieBreak] = []
    pending: list[dict] = []
    contraction_winners: list[tuple[int, Node]] = []
    for target in sorted(contract_groups):
        group = sorted(contract_groups[target])
        chosen = _pick("node", target, group, adversary, choices, tie_breaks, pending)
        if chosen is not None:
            contraction_winners.append((chosen, target))
    expansion_winners: list[tuple[int, str]] = []
    for edge in sorted(expand_claims):
        claims = sorted(expand_claims[edge])
        group = [pid for pid, _ in claims]
        chosen = _pick("edge", edge, group, adversary, choices, tie_breaks, pending)
        if chosen is not None:
            d = next(d for pid, d in claims if pid == chosen)
            expansion_winners.append((chosen, d))
    if pending:
        raise ConflictsPending(pending)

    new_particles = dict(P)
    positions = list(state.positions)
    e_moves = list(state.e_moves)
    se_moves = list(state.se_moves)
    union = state.union_bbox
    for pid, target in contraction_winners:
        v = positions[pid]
        d = P[v]
        del new_particles[v]
        new_particles[target] = None
        positions[pid] = target
        if d == grid.E:
            e_moves[pid] += 1
        elif d == grid.SE:
            se_moves[pid] += 1
        union = union.extend((target,))
        if stale:
            new_latched[pid] = None
    for pid, d in expansion_winners:
        new_particles[positions[pid]] = d
        if stale:
            new_latched[pid] = None

    new_config = Configuration(new_particles)
    round_no = state.step_count + 1
    last_active = list(state.last_active)
    for pid in ids:
        last_active[pid] = round_no

    record = StepRecord(
        round=round_no,
        activated=ids,
        decisions=tuple(decisions),
        tie_breaks=tuple(tie_breaks),
        contractions=tuple(sorted(contraction_winners)),
        expansions=tuple(sorted(expansion_winners)),
        config_key=new_config.canonical_key(),
    )
    new_state = replace(
        state,
        config=new_config,
        positions=tuple(positions),
        step_count=round_no,
        move_count=state.move_count + len(contraction_winners),
        expansion_count=state.expansion_count + len(expansion_winners),
        e_moves=tuple(e_moves),
        se_moves=tuple(se_moves),
        union_bbox=union,
        last_active=tuple(last_active),
        latched=tuple(new_latched),
    )
    return new_state, record


def _stale_decide(state, pid, v, s, contract_groups, expand_claims, new_latched):
    """Look/act split: latch a decision now, attempt it at next activation.

    Approximates executions where a particle's move happens well after its
    observation. The latched action is applied only if still feasible
    (edge unclaimed, or contraction target still empty); otherwise it is
    dropped and the next activation observes afresh.
    """
    latch = state.latched[pid]
    P = state.config.particles
    if latch is None:
        if s is not None:
            target = grid.neighbor(v, s)
            if target not in P:
                new_latched[pid] = D_CONTRACT
                return (pid, "look:contract")
            return (pid, "look:hold")
        action = rule.decide(View.from_config(state.config, v))
        if action is None:
            return (pid, "look:noop")
        new_latched[pid] = action
        return (pid, f"look:expand:{action}")
    if latch == D_CONTRACT:
        if s is None:
            new_latched[pid] = None
            return (pid, "act:drop")
        target = grid.neighbor(v, s)
        if target in P:
            new_latched[pid] = None
            return (pid, "act:drop")
        contract_groups.setdefault(target, []).append(pid)
        return (pid, "act:contract")
    # latched expansion; applies only if still contracted
    if s is not None:
        new_latched[pid] = None
        return (pid, "act:drop")
    target = grid.neighbor(v, latch)
    edge = (min(v, target), max(v, target))
    expand_claims.setdefault(edge, []).append((pid, latch))
    return (pid, f"act:expand:{latch}")


def run(
    config: Configuration,
    scheduler,
    adversary,
    *,
    max_steps: Optional[int] = None,
    max_moves: Optional[int] = None,
    fairness_window: Optional[int] = None,
    strict: bool = True,
    stale: bool = False,
) -> Trace:
    """Drive rounds until the configuration is final or a limit is hit.

    The scheduler provides each round's activation set and must satisfy
    the bounded-delay fairness contract; breaches abort the run. The
    summary's stop field is "final", "limit" (step or move budget), or
    "deadlock" (nothing enabled yet not final, which the rule is expected
    to never produce from a connected start).
    """
    state = initial_state(config, fairness_window=fairness_window, strict=strict)
    if adversary is None:
        raise EngineError("run requires a tie-break policy")
    if max_steps is None:
        max_steps = 64 * state.n * state.n
    records: list[StepRecord] = []
    unchanged_streak = 0
    min_last = 0

    def summary(stop: str) -> RunSummary:
        return RunSummary(
            steps=state.step_count,
            moves=state.move_count,
            expansions=state.expansion_count,
            union_bbox=state.union_bbox,
            terminated=(stop == "final"),
            stop=stop,
        )

    while True:
        if state.is_final():
            stop = "final"
            break
        if state.step_count >= max_steps or (
            max_moves is not None and state.move_count >= max_moves
        ):
            stop = "limit"
            break
        if unchanged_streak >= state.fairness_window:
            # every particle acted on this exact configuration and nothing
            # moved, so nothing is enabled
            if enabled_set(state):
                raise EngineError("no progress despite enabled particles")
            stop = "deadlock"
            break
        activated = scheduler.next_activation(state)
        if not activated:
            if enabled_set(state):
                raise SchedulerError(
                    "scheduler returned no activations while particles are enabled"
                )
            stop = "deadlock"
            break
        prev_latched = state.latched
        state, record = step_round(state, activated, adversary, stale=stale)
        records.append(record)
        changed = record.changed or state.latched != prev_latched
        unchanged_streak = 0 if changed else unchanged_streak + 1
        if state.step_count - min_last > state.fairness_window:
            min_last = min(state.last_active)
            if state.step_count - min_last > state.fairness_window:
                lagger = state.last_active.index(min_last)
                raise FairnessError(
                    f"particle {lagger} not activated for "
                    f"{state.step_count - min_last} rounds "
                    f"(window {state.fairness_window})"
                )

    return Trace(
        version=TRACE_VERSION,
        n=state.n,
        floor=state.floor,
        initial=config,
        records=records,
        summary=summary(stop),
    )


@dataclass(frozen=True)
class ReplayReport:
    ok: bool
    steps: int
    divergence: Optional[int] = None    # 1-based round of first mismatch
    detail: str = ""


def replay(trace: Trace, *, strict: bool = False) -> ReplayReport:
    """Re-execute a trace's recorded choices and compare configurations.

    Every record's activation set and tie-breaks are applied afresh; the
    resulting canonical keys must match the recorded ones. Stale-view
    traces are detected by their look/act decision labels.
    """
    stale = any(
        d.startswith(("look:", "act:"))
        for rec in trace.records
        for _, d in rec.decisions
    )
    try:
        state = initial_state(trace.initial, strict=strict)
    except EngineError as exc:
        return ReplayReport(False, 0, 0, f"bad initial configuration: {exc}")
    if trace.floor != state.floor:
        return ReplayReport(False, 0, 0, "declared floor does not match")
    for i, rec in enumerate(trace.records, start=1):
        choices = {tb.site: tb.chosen for tb in rec.tie_breaks}
        try:
            state, fresh = step_round(
                state, rec.activated, choices=choices, stale=stale
            )
        except EngineError as exc:
            return ReplayReport(False, i - 1, i, str(exc))
        if fresh.config_key != rec.config_key:
            return ReplayReport(
                False, i - 1, i,
                f"configuration diverged: {fresh.config_key} != {rec.config_key}",
            )
        if (fresh.contractions, fresh.expansions) != (rec.contractions, rec.expansions):
            return ReplayReport(False, i - 1, i, "applied moves diverged")
    if trace.summary is not None:
        s = trace.summary
        got = (state.step_count, state.move_count, state.expansion_count)
        want = (s.steps, s.moves, s.expansions)
        if got != want:
            return ReplayReport(
                False, len(trace.records), None,
                f"summary counters diverged: {got} != {want}",
            )
        if s.terminated != state.is_final():
            return ReplayReport(
                False, len(trace.records), None, "termination flag diverged"
            )
    return ReplayReport(True, len(trace.records))
