"""Line-delimited JSON trace files.

Layout: line 1 is a header {version, n, floor, particles}; each following
line is one round's record; a final summary line closes terminated or
limit-stopped runs. Keys are sorted and separators fixed, so identical
runs serialize to identical bytes.

Particles in the header appear in id order (sorted by body node), as
[q, r] when contracted or [q, r, direction] when expanded.
"""

from __future__ import annotations

import json
from typing import IO, Iterable, Optional

from .engine import RunSummary, StepRecord, TieBreak, Trace
from .grid import BoundingBox, Node
from .model import Configuration


class TraceFormatError(ValueError):
    pass


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def _node(v: Node) -> list[int]:
    return [v[0], v[1]]


def header_json(trace: Trace) -> dict:
    particles = []
    for v in sorted(trace.initial.bodies()):
        s = trace.initial.state(v)
        particles.append(_node(v) if s is None else [v[0], v[1], s])
    return {
        "version": trace.version,
        "n": trace.n,
        "floor": trace.floor,
        "particles": particles,
    }


def site_json(kind: str, site: tuple) -> list:
    return [_node(n) for n in site] if kind == "edge" else _node(site)


def record_json(rec: StepRecord) -> dict:
    return {
        "round": rec.round,
        "activated": list(rec.activated),
        "decisions": {str(pid): d for pid, d in rec.decisions},
        "tie_breaks": [
            {
                "kind": tb.kind,
                "site": site_json(tb.kind, tb.site),
                "group": list(tb.group),
                "chosen": tb.chosen,
            }
            for tb in rec.tie_breaks
        ],
        "contractions": [[pid, _node(v)] for pid, v in rec.contractions],
        "expansions": [[pid, d] for pid, d in rec.expansions],
        "config_key": rec.config_key,
    }


def summary_json(summary: RunSummary) -> dict:
    return {
        "summary": {
            "steps": summary.steps,
            "moves": summary.moves,
            "expansions": summary.expansions,
            "union_bbox": list(summary.union_bbox),
            "terminated": summary.terminated,
            "stop": summary.stop,
        }
    }


def dump_trace(trace: Trace, fp: IO[str]) -> None:
    fp.write(_dumps(header_json(trace)))
    for rec in trace.records:
        fp.write(_dumps(record_json(rec)))
    if trace.summary is not None:
        fp.write(_dumps(summary_json(trace.summary)))


def dumps_trace(trace: Trace) -> str:
    out = [_dumps(header_json(trace))]
    out.extend(_dumps(record_json(r)) for r in trace.records)
    if trace.summary is not None:
        out.append(_dumps(summary_json(trace.summary)))
    return "".join(out)


def write_trace(trace: Trace, path) -> None:
    with open(path, "w", newline="\n") as fp:
        dump_trace(trace, fp)


def _parse_header(obj: dict) -> Trace:
    try:
        version = obj["version"]
        n = obj["n"]
        floor = obj["floor"]
        raw = obj["particles"]
    except KeyError as exc:
        raise TraceFormatError(f"header is missing {exc}") from None
    particles = {}
    for entry in raw:
        if len(entry) == 2:
            particles[(entry[0], entry[1])] = None
        elif len(entry) == 3:
            particles[(entry[0], entry[1])] = entry[2]
        else:
            raise TraceFormatError(f"bad particle entry: {entry!r}")
    if len(particles) != n:
        raise TraceFormatError("particle count does not match n")
    return Trace(version, n, floor, Configuration(particles), [])


def _parse_tie_break(obj: dict) -> TieBreak:
    kind = obj["kind"]
    if kind == "edge":
        site = tuple(tuple(v) for v in obj["site"])
    elif kind == "node":
        site = tuple(obj["site"])
    else:
        raise TraceFormatError(f"bad tie-break kind: {kind!r}")
    return TieBreak(kind, site, tuple(obj["group"]), obj["chosen"])


def _parse_record(obj: dict) -> StepRecord:
    try:
        return StepRecord(
            round=obj["round"],
            activated=tuple(obj["activated"]),
            decisions=tuple(
                sorted((int(pid), d) for pid, d in obj["decisions"].items())
            ),
            tie_breaks=tuple(_parse_tie_break(tb) for tb in obj["tie_breaks"]),
            contractions=tuple(
                (pid, (v[0], v[1])) for pid, v in obj["contractions"]
            ),
            expansions=tuple((pid, d) for pid, d in obj["expansions"]),
            config_key=obj["config_key"],
        )
    except (KeyError, TypeError, AttributeError) as exc:
        raise TraceFormatError(f"bad step record: {exc}") from None


def _parse_summary(obj: dict) -> RunSummary:
    s = obj["summary"]
    try:
        return RunSummary(
            steps=s["steps"],
            moves=s["moves"],
            expansions=s["expansions"],
            union_bbox=BoundingBox(*s["union_bbox"]),
            terminated=s["terminated"],
            stop=s["stop"],
        )
    except (KeyError, TypeError) as exc:
        raise TraceFormatError(f"bad summary: {exc}") from None


def parse_trace(lines: Iterable[str]) -> Trace:
    trace: Optional[Trace] = None
    for i, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise TraceFormatError(f"line {i} is not JSON: {exc}") from None
        if trace is None:
            trace = _parse_header(obj)
        elif "summary" in obj:
            if trace.summary is not None:
                raise TraceFormatError(f"line {i}: duplicate summary")
            trace.summary = _parse_summary(obj)
        elif trace.summary is not None:
            raise TraceFormatError(f"line {i}: record after summary")
        else:
            trace.records.append(_parse_record(obj))
    if trace is None:
        raise TraceFormatError("empty trace file")
    return trace


def loads_trace(text: str) -> Trace:
    return parse_trace(text.splitlines())


def read_trace(path) -> Trace:
    with open(path) as fp:
        return parse_trace(fp)
