import json

import pytest

from wrain.engine import Trace, replay, run
from wrain.model import Configuration, from_nodes
from wrain.scheduler import FirstById, FullySync, SerialRandom
from wrain.tracefile import (
    TraceFormatError,
    dumps_trace,
    loads_trace,
    read_trace,
    write_trace,
)


def roundtrip(trace):
    return loads_trace(dumps_trace(trace))


def test_header_and_summary_fields(triangle_config):
    trace = run(triangle_config, FullySync(), FirstById())
    lines = dumps_trace(trace).splitlines()
    header = json.loads(lines[0])
    assert header == {
        "version": 1,
        "n": 3,
        "floor": 0,
        "particles": [[0, 0], [0, 1], [1, 0]],
    }
    summary = json.loads(lines[-1])["summary"]
    assert summary["steps"] == 4
    assert summary["moves"] == 2
    assert summary["terminated"] is True
    assert summary["stop"] == "final"
    assert summary["union_bbox"] == [0, 2, 0, 1]
    assert len(lines) == 1 + 4 + 1


def test_dump_is_one_json_object_per_line(pair_config):
    trace = run(pair_config, FullySync(), FirstById())
    for line in dumps_trace(trace).splitlines():
        json.loads(line)


def test_roundtrip_preserves_everything(triangle_config):
    trace = run(triangle_config, SerialRandom(3), FirstById())
    back = roundtrip(trace)
    assert back.version == trace.version
    assert back.n == trace.n
    assert back.floor == trace.floor
    assert back.initial == trace.initial
    assert back.records == trace.records
    assert back.summary == trace.summary
    assert dumps_trace(back) == dumps_trace(trace)
    assert replay(back).ok


def test_roundtrip_with_tie_breaks():
    config = Configuration({(-1, 0): "E", (0, 0): None, (0, 1): None})
    from wrain.engine import initial_state, step_round

    s = initial_state(config, strict=False)
    s, r1 = step_round(s, [1, 2], FirstById())
    s, r2 = step_round(s, [1, 2], FirstById())
    trace = Trace(1, 3, 0, config, [r1, r2])
    back = roundtrip(trace)
    assert back.records[1].tie_breaks == r2.tie_breaks
    assert back.initial.state((-1, 0)) == "E"
    assert back.summary is None
    assert replay(back).ok


def test_file_io(tmp_path, pair_config):
    trace = run(pair_config, FullySync(), FirstById())
    path = tmp_path / "run.jsonl"
    write_trace(trace, path)
    assert read_trace(path).records == trace.records
    assert path.read_bytes().decode().count("\n") == len(trace.records) + 2


def test_parse_rejects_garbage():
    with pytest.raises(TraceFormatError):
        loads_trace("")
    with pytest.raises(TraceFormatError):
        loads_trace("not json\n")
    with pytest.raises(TraceFormatError):
        loads_trace('{"version":1}\n')
    with pytest.raises(TraceFormatError):
        loads_trace('{"version":1,"n":2,"floor":0,"particles":[[0,0]]}\n')
    good_header = '{"version":1,"n":1,"floor":0,"particles":[[0,0]]}\n'
    with pytest.raises(TraceFormatError):
        loads_trace(good_header + '{"round":1}\n')
    summary = '{"summary":{"steps":0,"moves":0,"expansions":0,' \
              '"union_bbox":[0,0,0,0],"terminated":true,"stop":"final"}}\n'
    with pytest.raises(TraceFormatError):
        loads_trace(good_header + summary + summary)


def test_records_after_summary_rejected(pair_config):
    trace = run(pair_config, FullySync(), FirstById())
    lines = dumps_trace(trace).splitlines(keepends=True)
    shuffled = [lines[0], lines[-1]] + lines[1:-1]
    with pytest.raises(TraceFormatError):
        loads_trace("".join(shuffled))


def test_header_only_trace_is_valid():
    trace = loads_trace('{"version":1,"n":1,"floor":0,"particles":[[0,0]]}\n')
    assert trace.n == 1
    assert trace.records == []
    assert trace.summary is None
    assert replay(trace).ok


def test_expanded_particles_in_header():
    line = '{"version":1,"n":2,"floor":0,"particles":[[0,0,"E"],[2,0]]}\n'
    trace = loads_trace(line)
    assert trace.initial.state((0, 0)) == "E"
    assert trace.initial.state((2, 0)) is None


def test_byte_stability(pair_config):
    a = dumps_trace(run(pair_config, SerialRandom(9), FirstById()))
    b = dumps_trace(run(pair_config, SerialRandom(9), FirstById()))
    assert a == b
    c = dumps_trace(run(pair_config, SerialRandom(10), FirstById()))
    assert a != c
