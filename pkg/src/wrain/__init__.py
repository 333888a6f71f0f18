"""Executable model of anonymous particles forming a line on a triangular grid.

Contracted/expanded particles with 2-hop visibility run a fixed local
rule under adversarial activation schedules. The package provides the
execution engine, schedulers and tie-break policies, trace recording and
replay, correctness checkers, an exhaustive schedule explorer, SVG
rendering, a CLI, and a step-session HTTP service.
"""

from .checkers import check_all
from .engine import Trace, replay, run
from .explorer import ExploreResult, enumerate_initial, explore
from .grid import BoundingBox, Node, bounding_box, distance, neighbor, neighbors
from .instances import generate, load_instance, parse_instance
from .model import Configuration, View, from_nodes
from .rule import decide, decide_at, enabled
from .scheduler import parse_adversary, parse_scheduler
from .service import create_app
from .tracefile import loads_trace, read_trace, write_trace

__version__ = "0.1.0"

__all__ = [
    "BoundingBox",
    "Configuration",
    "ExploreResult",
    "Node",
    "Trace",
    "View",
    "bounding_box",
    "check_all",
    "create_app",
    "decide",
    "decide_at",
    "distance",
    "enabled",
    "enumerate_initial",
    "explore",
    "from_nodes",
    "generate",
    "load_instance",
    "loads_trace",
    "neighbor",
    "neighbors",
    "parse_adversary",
    "parse_instance",
    "parse_scheduler",
    "read_trace",
    "replay",
    "run",
    "write_trace",
    "__version__",
]
