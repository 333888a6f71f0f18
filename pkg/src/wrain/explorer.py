"""Exhaustive exploration of every adversary behavior on small instances.

The global state graph (configurations in absolute coordinates, edges =
activation outcomes that change state) is finite and acyclic: every edge
strictly increases the potential (sum of body q's, number of expanded
particles) in lexicographic order, since moves only go E/SE and
expansions only add commitments. The explorer walks the whole graph and
verifies, over every maximal schedule:

  - every sink state is final (contracted, connected, on the floor);
  - no path revisits a configuration, absolutely or translated;
  - no path exceeds the 2n(n-1) move budget.

Serial mode branches over single-particle activations (no simultaneity,
so no tie-breaks); all_subsets mode branches over every nonempty
activation subset and every tie-break resolution.

Any violation is returned as a replayable counterexample trace.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Optional

from . import grid, rule
from .engine import TRACE_VERSION, Trace, initial_state, step_round
from .grid import Node
from .model import CONTRACTED, Configuration, View, from_nodes

MAX_SERIAL_N = 5
MAX_SUBSETS_N = 3
MAX_ENUM_N = 6

Shape = tuple[tuple[Node, Optional[str]], ...]   # sorted (node, state) pairs


class ExplorerError(Exception):
    pass


@dataclass
class ExploreResult:
    mode: str
    n: int
    states: int
    edges: int
    terminals: set[str]            # absolute keys of sink states
    terminal_shapes: set[str]      # the same sinks, translated
    max_moves: int                 # over all maximal paths
    max_depth: int                 # longest path, in changing rounds
    violations: list[dict] = field(default_factory=list)
    counterexample: Optional[Trace] = None
    budget_exhausted: bool = False

    @property
    def ok(self) -> bool:
        return not self.violations and not self.budget_exhausted

    def summary_line(self) -> str:
        status = "ok" if self.ok else ("budget exhausted"
                                       if self.budget_exhausted else "VIOLATION")
        return (
            f"mode={self.mode} n={self.n} states={self.states} "
            f"edges={self.edges} terminals={len(self.terminals)} "
            f"max_moves={self.max_moves} max_depth={self.max_depth} {status}"
        )


@dataclass(frozen=True)
class _Edge:
    succ: int
    moves: int
    activated: tuple[Node, ...]                  # bodies, not ids
    choices: tuple[tuple[object, Node], ...]     # (site, winning body)


def _shape(particles: dict) -> Shape:
    return tuple(sorted(particles.items()))


def _abs_key(shape: Shape) -> str:
    return ";".join(f"{q},{r},{s or CONTRACTED}" for (q, r), s in shape)


def _translated_key(shape: Shape) -> str:
    q0 = min(q for (q, _), _ in shape)
    r0 = min(r for (_, r), _ in shape)
    return ";".join(f"{q - q0},{r - r0},{s or CONTRACTED}" for (q, r), s in shape)


def _phi(shape: Shape) -> tuple[int, int]:
    return (
        sum(q for (q, _), _ in shape),
        sum(1 for _, s in shape if s is not None),
    )


def _decide_fast(particles: dict, v: Node):
    return rule.decide(View.from_config(Configuration(particles), v))


def _single_outcomes(particles: dict, v: Node):
    """The state change (if any) of activating only the particle at v."""
    s = particles[v]
    if s is not None:
        target = grid.neighbor(v, s)
        if target in particles:
            return None
        return ("contract", v, target)
    action = _decide_fast(particles, v)
    if action is None:
        return None
    return ("expand", v, action)


def _apply(particles: dict, contractions, expansions) -> dict:
    out = dict(particles)
    for v, target in contractions:
        del out[v]
        out[target] = None
    for v, d in expansions:
        out[v] = d
    return out


def explore(
    config: Configuration,
    mode: str = "serial",
    max_states: int = 10_000_000,
) -> ExploreResult:
    """Search every schedule from config and verify the path properties."""
    if mode not in ("serial", "all_subsets"):
        raise ExplorerError(f"unknown mode {mode!r}")
    bound = MAX_SERIAL_N if mode == "serial" else MAX_SUBSETS_N
    if config.n > bound:
        raise ExplorerError(
            f"{mode} exploration is limited to n <= {bound} (got n={config.n})"
        )
    if not config.is_initial():
        raise ExplorerError("exploration requires a contracted connected start")

    floor = config.bounding_box().r_min
    root = _shape(dict(config.particles))
    index: dict[Shape, int] = {root: 0}
    shapes: list[Shape] = [root]
    succ: list[list[_Edge]] = [[]]
    parent: list[Optional[tuple[int, _Edge]]] = [None]
    result = ExploreResult(
        mode=mode, n=config.n, states=1, edges=0,
        terminals=set(), terminal_shapes=set(), max_moves=0, max_depth=0,
    )

    def witness(state_idx: int, problem: dict, extra_edge: Optional[_Edge] = None):
        # first violation wins; a broken rule may have an unbounded state
        # space, so stop expanding the frontier
        result.violations.append(problem)
        stack.clear()
        if result.counterexample is None:
            edges = _tree_path(parent, state_idx)
            if extra_edge is not None:
                edges.append(extra_edge)
            result.counterexample = _trace_from_edges(config, edges)

    stack = [0]
    while stack:
        i = stack.pop()
        particles = dict(shapes[i])
        phi_here = _phi(shapes[i])
        outcomes = list(_branches(particles, mode))
        if not outcomes:
            key = _abs_key(shapes[i])
            result.terminals.add(key)
            result.terminal_shapes.add(_translated_key(shapes[i]))
            if not Configuration(particles).is_final(floor):
                witness(i, {"kind": "stuck non-final state", "state": key})
            continue
        for nxt, moves, activated, choices in outcomes:
            if result.violations:
                break
            shape = _shape(nxt)
            edge_to: Optional[int] = index.get(shape)
            if edge_to is None:
                if len(shapes) >= max_states:
                    result.budget_exhausted = True
                    stack.clear()
                    break
                edge_to = len(shapes)
                index[shape] = edge_to
                shapes.append(shape)
                succ.append([])
                edge = _Edge(edge_to, moves, activated, choices)
                parent.append((i, edge))
                stack.append(edge_to)
            else:
                edge = _Edge(edge_to, moves, activated, choices)
            succ[i].append(edge)
            result.edges += 1
            if _phi(shape) <= phi_here:
                witness(i, {
                    "kind": "potential did not increase",
                    "from": _abs_key(shapes[i]),
                    "to": _abs_key(shape),
                }, extra_edge=edge)
            if min(r for (_, r), _ in shape) != floor:
                witness(i, {
                    "kind": "floor row changed", "state": _abs_key(shape)
                }, extra_edge=edge)
    result.states = len(shapes)

    if not result.budget_exhausted and not result.violations:
        _check_paths(result, config, shapes, succ, parent, floor)
    return result


def _branches(particles: dict, mode: str):
    """Successor outcomes: (new particles, moves, activated bodies, choices)."""
    bodies = sorted(particles)
    if mode == "serial":
        for v in bodies:
            out = _single_outcomes(particles, v)
            if out is None:
                continue
            kind, v, x = out
            if kind == "contract":
                yield _apply(particles, [(v, x)], []), 1, (v,), ()
            else:
                yield _apply(particles, [], [(v, x)]), 0, (v,), ()
        return
    for k in range(1, len(bodies) + 1):
        for subset in itertools.combinations(bodies, k):
            yield from _subset_outcomes(particles, subset)


def _subset_outcomes(particles: dict, subset: tuple[Node, ...]):
    contract_groups: dict[Node, list[Node]] = {}
    expansions: dict[tuple[Node, Node], list[tuple[Node, str]]] = {}
    for v in subset:
        out = _single_outcomes(particles, v)
        if out is None:
            continue
        kind, v, x = out
        if kind == "contract":
            contract_groups.setdefault(x, []).append(v)
        else:
            target = grid.neighbor(v, x)
            edge = (min(v, target), max(v, target))
            expansions.setdefault(edge, []).append((v, x))
    if not contract_groups and not expansions:
        return
    node_sites = sorted(contract_groups)
    edge_sites = sorted(expansions)
    node_options = [sorted(contract_groups[t]) for t in node_sites]
    edge_options = [sorted(expansions[e]) for e in edge_sites]
    for node_pick in itertools.product(*node_options):
        for edge_pick in itertools.product(*edge_options):
            contractions = list(zip(node_pick, node_sites))
            expanded = list(edge_pick)
            nxt = _apply(particles, contractions, expanded)
            moves = len(contractions)
            choices = tuple(
                [(site, v) for site, v in zip(node_sites, node_pick)]
                + [(site, v) for site, (v, _) in zip(edge_sites, edge_pick)]
            )
            yield nxt, moves, subset, choices


def _check_paths(result, config, shapes, succ, parent, floor) -> None:
    """Longest-path accounting and translated-repeat detection (needs DAG)."""
    # the root has strictly minimal potential, so sorting by it is a
    # topological order
    order = sorted(range(len(shapes)), key=lambda i: _phi(shapes[i]))
    moves_dp = [-1] * len(shapes)
    depth_dp = [0] * len(shapes)
    best_pred: list[Optional[tuple[int, _Edge]]] = [None] * len(shapes)
    moves_dp[0] = 0
    for i in order:
        for e in succ[i]:
            if moves_dp[i] + e.moves > moves_dp[e.succ]:
                moves_dp[e.succ] = moves_dp[i] + e.moves
                best_pred[e.succ] = (i, e)
            if depth_dp[i] + 1 > depth_dp[e.succ]:
                depth_dp[e.succ] = depth_dp[i] + 1
    result.max_moves = max(moves_dp)
    result.max_depth = max(depth_dp)
    n = result.n
    if result.max_moves > 2 * n * (n - 1):
        worst = moves_dp.index(result.max_moves)
        result.violations.append({
            "kind": "move budget exceeded",
            "moves": result.max_moves,
            "budget": 2 * n * (n - 1),
        })
        if result.counterexample is None:
            result.counterexample = _trace_from_edges(
                config, _tree_path(best_pred, worst)
            )

    groups: dict[str, list[int]] = {}
    for i, shape in enumerate(shapes):
        groups.setdefault(_translated_key(shape), []).append(i)
    for key, members in groups.items():
        if len(members) < 2:
            continue
        members.sort(key=lambda i: _phi(shapes[i]))
        for a_pos, a in enumerate(members):
            for b in members[a_pos + 1:]:
                tail = _find_path(a, b, shapes, succ)
                if tail is not None:
                    result.violations.append({
                        "kind": "translated repeat on a path",
                        "shape": key,
                        "from": _abs_key(shapes[a]),
                        "to": _abs_key(shapes[b]),
                    })
                    if result.counterexample is None:
                        result.counterexample = _trace_from_edges(
                            config, _tree_path(parent, a) + tail
                        )
                    return


def _find_path(a: int, b: int, shapes, succ) -> Optional[list[_Edge]]:
    """Edge path a -> b in the state DAG, or None; prunes on potential."""
    target_phi = _phi(shapes[b])
    via: dict[int, tuple[int, _Edge]] = {}
    stack = [a]
    seen = {a}
    while stack:
        i = stack.pop()
        if i == b:
            edges = []
            while i != a:
                pred, edge = via[i]
                edges.append(edge)
                i = pred
            edges.reverse()
            return edges
        for e in succ[i]:
            j = e.succ
            if j not in seen and _phi(shapes[j]) <= target_phi:
                seen.add(j)
                via[j] = (i, e)
                stack.append(j)
    return None


def _tree_path(pred, state_idx: int) -> list[_Edge]:
    edges = []
    i = state_idx
    while pred[i] is not None:
        i, edge = pred[i]
        edges.append(edge)
    edges.reverse()
    return edges


def _trace_from_edges(config: Configuration, edges: list[_Edge]) -> Trace:
    """Replay an edge path through the engine to get a replayable witness."""
    state = initial_state(config)
    records = []
    for edge in edges:
        body_of = {v: pid for pid, v in enumerate(state.positions)}
        ids = sorted(body_of[v] for v in edge.activated)
        choices = {site: body_of[v] for site, v in edge.choices}
        state, rec = step_round(state, ids, choices=choices)
        records.append(rec)
    return Trace(TRACE_VERSION, config.n, state.floor, config, records)


def enumerate_initial(n: int) -> Iterator[Configuration]:
    """All connected n-particle contracted shapes, up to translation.

    Shapes are normalized so (q_min, r_min) = (0, 0) and yielded in
    sorted order; the counts grow quickly, hence the small-n guard.
    """
    if not 1 <= n <= MAX_ENUM_N:
        raise ExplorerError(f"shape enumeration is limited to n <= {MAX_ENUM_N}")
    shapes: set[frozenset[Node]] = {frozenset({(0, 0)})}
    for _ in range(n - 1):
        grown: set[frozenset[Node]] = set()
        for shape in shapes:
            for v in shape:
                for w in grid.neighbors(v):
                    if w not in shape:
                        grown.add(_normalize_nodes(shape | {w}))
        shapes = grown
    for shape in sorted(shapes, key=lambda s: tuple(sorted(s))):
        yield from_nodes(shape)


def _normalize_nodes(nodes: frozenset[Node]) -> frozenset[Node]:
    q0 = min(q for q, _ in nodes)
    r0 = min(r for _, r in nodes)
    return frozenset((q - q0, r - r0) for q, r in nodes)
