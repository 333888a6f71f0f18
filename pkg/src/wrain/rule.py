"""The westward-rain decision rule.

A contracted particle looks at its 2-hop view and picks one of three
actions: expand E, expand SE, or nothing.

  - If any adjacent empty node is semi-occupied (near), it holds still;
    someone else is already moving into its neighborhood.
  - If a neighbor is expanded along an edge ending on this particle's own
    node (pointed), it expands E, stepping aside eastward for the pusher.
  - Otherwise, if the upper-west trapezoid of its view is empty and the
    lower-east trapezoid is not, it expands SE, sliding down the slope.

Expansion may target an occupied node; the expansion then acts as a push
and the mover waits, committed, until that node empties. The E and SE
moves are the only ones the rule ever emits.
"""

from __future__ import annotations

from typing import Optional

from .grid import E, SE, Node
from .model import CONTRACTED, Configuration, View

Action = Optional[str]  # None, "E", or "SE"


def decide(view: View) -> Action:
    """Action for the contracted particle at the view's center."""
    if view.center_state != CONTRACTED:
        raise ValueError(
            f"decision requires a contracted particle at {view.center}, "
            f"found {view.center_state!r}"
        )
    if view.near():
        return None
    if view.pointed():
        return E
    if not view.upper() and view.lower():
        return SE
    return None


def decide_at(config: Configuration, v: Node) -> Action:
    return decide(View.from_config(config, v))


def enabled(config: Configuration, v: Node) -> bool:
    """Whether activating the particle at v would change the configuration.

    Contracted: its decision is an expansion. Expanded: its target node is
    empty, so activation completes the move by contracting into it.
    """
    state = config.state(v)
    if state is None:
        return decide(View.from_config(config, v)) is not None
    return not config.occupied(config.expansion_target(v))
