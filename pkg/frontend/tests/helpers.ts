/** Shared plumbing for fixture-driven tests.
 *
 * Fixtures are recorded from the real service by scripts/record_fixtures.py;
 * each one is an ordered list of {request, status, response} exchanges with
 * the response kept as the raw line the server produced.
 */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { expect } from "vitest";
import { Transport } from "../src/client.js";

const here = dirname(fileURLToPath(import.meta.url));

export interface Exchange {
  request: Record<string, unknown>;
  status: number;
  response: string;
}

export interface Fixture {
  description: string;
  exchanges: Exchange[];
}

export function loadFixture(name: string): Fixture {
  const text = readFileSync(join(here, "fixtures", `${name}.json`), "utf8");
  return JSON.parse(text) as Fixture;
}

export function parsedResponse<T>(fixture: Fixture, index: number): T {
  return JSON.parse(fixture.exchanges[index].response) as T;
}

export interface ReplayTransport extends Transport {
  done(): void;
}

/** Replay recorded exchanges in order, checking every outgoing request
 * against the recorded one structurally (key order and spacing do not
 * matter, field values do). */
export function fixtureTransport(exchanges: Exchange[]): ReplayTransport {
  let cursor = 0;
  const transport = async (body: string): Promise<string> => {
    const lines = body.split("\n").filter((line) => line.trim());
    expect(lines.length, "client sends one message per request").toBe(1);
    expect(cursor, `unexpected extra request: ${body}`).toBeLessThan(
      exchanges.length,
    );
    const exchange = exchanges[cursor];
    cursor += 1;
    expect(JSON.parse(lines[0])).toEqual(exchange.request);
    return exchange.response + "\n";
  };
  const replay = transport as ReplayTransport;
  replay.done = () => {
    expect(cursor, "all recorded exchanges consumed").toBe(exchanges.length);
  };
  return replay;
}
