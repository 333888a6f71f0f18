#!/usr/bin/env python3
"""Record protocol fixtures for the frontend tests.

Captures real request/response exchanges from the session service so the
TypeScript tests replay exact server output without running Python. Each
fixture lists exchanges in order: the parsed request object, the HTTP
status, and the raw response line. Requests are compared structurally on
replay, so serialization details (key order, spacing) do not matter.

Re-run after changing the service and commit the diff:

    python3 scripts/record_fixtures.py
"""

import json
from pathlib import Path

from fastapi.testclient import TestClient

from wrain.service import create_app

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

PAIR = "0 0\n0 1\n"
# a pusher forces (0,0) east while (0,1) slides southeast; both head for
# node (1,0), setting up a contraction tie-break
CONVERGE = "-1 0 E\n0 0\n0 1\n"


class Recorder:
    def __init__(self):
        self.client = TestClient(create_app())
        self.exchanges = []
        self.sid = None

    def send(self, request):
        body = json.dumps(request) + "\n"
        res = self.client.post("/session", content=body)
        line = res.text.splitlines()[0]
        self.exchanges.append(
            {"request": request, "status": res.status_code, "response": line}
        )
        payload = json.loads(line)
        if payload.get("type") == "new":
            self.sid = payload["session"]
        return payload

    def req(self, type_, **fields):
        request = {"version": 1, "type": type_}
        if type_ != "new":
            request["session"] = self.sid
        request.update(fields)
        return self.send(request)


def write(name, description, exchanges):
    OUT.mkdir(parents=True, exist_ok=True)
    path = OUT / f"{name}.json"
    with open(path, "w", newline="\n") as fp:
        json.dump(
            {"description": description, "exchanges": exchanges},
            fp, indent=2, sort_keys=True,
        )
        fp.write("\n")
    print(f"wrote {path} ({len(exchanges)} exchanges)")


def record_pair():
    r = Recorder()
    r.req("new", instance=PAIR)
    r.req("export")                # zero steps: header-only trace
    r.req("enabled")
    r.req("step", ids=[1])         # expand SE
    r.req("enabled")
    final = r.req("step", ids=[1])  # contract: line is done
    assert final["metrics"]["final"] is True
    r.req("state")
    r.req("export")                # finished run: summary line present
    write(
        "pair_session",
        "two-particle session stepped to the final line",
        r.exchanges,
    )


def record_converge():
    r = Recorder()
    r.req("new", instance=CONVERGE)
    r.req("step", ids=[1, 2])      # both expand toward (1,0)
    r.req("step", ids=[1, 2])      # contraction conflict comes back
    r.req("step", ids=[1, 2], tie_breaks=[{"site": [1, 0], "chosen": 2}])
    r.req("undo")
    done = r.req("auto", scheduler="sync", rounds=20, adversary="first")
    assert done["metrics"]["final"] is True
    r.req("export")
    write(
        "converge_session",
        "converging movers: conflict, explicit tie-break, undo, auto run",
        r.exchanges,
    )


def record_errors():
    r = Recorder()
    r.send({"version": 1, "type": "state", "session": "nope"})
    r.send({"version": 1, "type": "bogus"})
    r.send({"type": "state", "session": "nope"})   # version missing
    r.send({"version": 1, "type": "new", "instance": "0 0\n0 0\n"})
    write("errors", "in-band error responses", r.exchanges)


if __name__ == "__main__":
    record_pair()
    record_converge()
    record_errors()
