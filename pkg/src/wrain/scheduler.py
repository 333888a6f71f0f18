"""Activation schedulers and tie-break policies: the adversary's two dials.

Schedulers decide who acts each round, policies decide who wins a
simultaneous-move conflict. All randomness is splitmix64-seeded, so a
(scheduler spec, seed) pair pins the whole run.

Fairness contract: every scheduler here, given the run state, keeps each
particle's activation gap within the run's fairness window. SerialRandom
does it structurally (shuffled epochs); SubsetRandom force-includes any
particle about to fall out of the window.
"""

from __future__ import annotations

from typing import Optional, Sequence

from .engine import RunState
from .rng import SplitMix64


class FullySync:
    """Activate every particle every round."""

    spec = "sync"

    def next_activation(self, state: RunState) -> tuple[int, ...]:
        return tuple(state.ids)


class SerialRandom:
    """One particle per round, a fresh random permutation each epoch.

    The gap between two activations of the same particle is at most
    2n - 1 rounds (first slot of one epoch, last slot of the next), well
    inside the default fairness window of 2n.
    """

    def __init__(self, seed: int):
        self.seed = seed
        self.spec = f"serial:{seed}"
        self._rng = SplitMix64(seed)
        self._queue: list[int] = []

    def next_activation(self, state: RunState) -> tuple[int, ...]:
        if not self._queue:
            self._queue = list(state.ids)
            self._rng.shuffle(self._queue)
        return (self._queue.pop(),)


class SubsetRandom:
    """Each particle independently with probability p, never empty.

    Particles whose activation gap would exceed the fairness window are
    added regardless of the coin, keeping the schedule fair without
    biasing small gaps.
    """

    def __init__(self, seed: int, p: float = 0.5):
        if not 0.0 < p <= 1.0:
            raise ValueError(f"activation probability out of range: {p}")
        self.seed = seed
        self.p = p
        self.spec = f"subset:{seed}:{p:g}"
        self._rng = SplitMix64(seed)

    def next_activation(self, state: RunState) -> tuple[int, ...]:
        window = state.fairness_window
        upcoming = state.step_count + 1
        while True:
            picked = [pid for pid in state.ids if self._rng.random() < self.p]
            forced = [
                pid for pid in state.ids
                if upcoming - state.last_active[pid] >= window
            ]
            merged = sorted(set(picked) | set(forced))
            if merged:
                return tuple(merged)


class External:
    """Placeholder for interactively driven runs; never self-activates."""

    spec = "external"

    def next_activation(self, state: RunState) -> tuple[int, ...]:
        raise RuntimeError("external scheduler must be driven step by step")


class FirstById:
    """Deterministic tie-breaks: lowest particle id wins."""

    spec = "first"

    def break_node_conflict(self, site, group: Sequence[int]) -> int:
        return min(group)

    def break_edge_conflict(self, edge, group: Sequence[int]) -> int:
        return min(group)


class RandomChoice:
    """Seeded random tie-breaks."""

    def __init__(self, seed: int):
        self.seed = seed
        self.spec = f"random:{seed}"
        self._rng = SplitMix64(seed)

    def break_node_conflict(self, site, group: Sequence[int]) -> int:
        return self._rng.choice(sorted(group))

    def break_edge_conflict(self, edge, group: Sequence[int]) -> int:
        return self._rng.choice(sorted(group))


def parse_scheduler(spec: str, default_seed: int = 0):
    """Build a scheduler from its textual form.

    Forms: "sync", "serial", "serial:SEED", "subset", "subset:SEED",
    "subset:SEED:P", "external". Omitted seeds fall back to default_seed.
    """
    parts = spec.split(":")
    kind = parts[0]
    if kind == "sync" and len(parts) == 1:
        return FullySync()
    if kind == "serial" and len(parts) <= 2:
        seed = int(parts[1]) if len(parts) == 2 else default_seed
        return SerialRandom(seed)
    if kind == "subset" and len(parts) <= 3:
        seed = int(parts[1]) if len(parts) >= 2 else default_seed
        p = float(parts[2]) if len(parts) == 3 else 0.5
        return SubsetRandom(seed, p)
    if kind == "external" and len(parts) == 1:
        return External()
    raise ValueError(f"unknown scheduler spec: {spec!r}")


def parse_adversary(spec: str, default_seed: int = 0):
    """Build a tie-break policy: "first", "random", or "random:SEED"."""
    parts = spec.split(":")
    if parts[0] == "first" and len(parts) == 1:
        return FirstById()
    if parts[0] == "random" and len(parts) <= 2:
        seed = int(parts[1]) if len(parts) == 2 else default_seed
        return RandomChoice(seed)
    raise ValueError(f"unknown tie-break policy: {spec!r}")
