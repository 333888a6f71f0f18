import { describe, expect, it } from "vitest";

import { nodeIndex, renderBoard } from "../src/board.js";
import { StatePayload, StepApplied } from "../src/protocol.js";
import { loadFixture, parsedResponse } from "./helpers.js";

const pair = loadFixture("pair_session");
const newState = parsedResponse<StatePayload>(pair, 0);
const midState = parsedResponse<StepApplied>(pair, 3);

function count(haystack: string, needle: string): number {
  return haystack.split(needle).length - 1;
}

describe("renderBoard", () => {
  it("draws one dot per reported node and one disc per particle", () => {
    const svg = renderBoard(newState);
    expect(count(svg, 'class="lattice')).toBe(newState.nodes.length);
    expect(svg).toContain('data-id="0"');
    expect(svg).toContain('data-id="1"');
    expect(count(svg, 'class="pid"')).toBe(2);
  });

  it("tags every dot with its axial coordinates", () => {
    const svg = renderBoard(newState);
    for (const entry of newState.nodes) {
      expect(svg).toContain(`data-node="${entry.node[0]},${entry.node[1]}"`);
    }
  });

  it("puts the floor line on the floor row", () => {
    // floor row r=0 maps to y=0 in the shared layout
    const svg = renderBoard(newState);
    expect(svg).toMatch(/<line class="floor-line" x1="[-\d.]+" y1="0\.00"/);
    expect(count(svg, "floor-row")).toBeGreaterThan(0);
  });

  it("outlines the reported bounding box", () => {
    // boxes track bodies only: the semi-occupied target stays outside
    expect(midState.bbox).toEqual([0, 0, 0, 1]);
    const svg = renderBoard(midState);
    const m = svg.match(/<polygon class="bbox" points="([^"]+)"/);
    expect(m).not.toBeNull();
    expect(m![1]).toBe("0.00,0.00 0.00,0.00 20.00,-34.64 20.00,-34.64");
  });

  it("marks semi-occupied targets", () => {
    expect(midState.semi_occupied).toEqual([[1, 0]]);
    const svg = renderBoard(midState);
    expect(svg).toMatch(/class="semi" data-node="1,0"/);
    expect(count(svg, 'class="semi"')).toBe(1);
    expect(count(renderBoard(newState), 'class="semi"')).toBe(0);
  });

  it("draws the committed expansion edge body to target", () => {
    const svg = renderBoard(midState);
    expect(svg).toContain(
      '<line x1="20.00" y1="-34.64" x2="40.00" y2="0.00" class="commit"/>',
    );
  });

  it("hints the pending expansion of a contracted body", () => {
    const svg = renderBoard(newState); // particle 1 decides expand:SE
    expect(count(svg, 'class="intent"')).toBe(1);
  });

  it("decorates enabled, activated and selected", () => {
    const svg = renderBoard(newState, {
      activation: new Set([1]),
      enabled: [1],
      selected: [0, 0],
    });
    expect(svg).toMatch(/class="particle contracted enabled activated"[^>]*data-id="1"/);
    expect(svg).toMatch(/class="particle contracted"[^>]*data-id="0"/);
    expect(svg).toContain('class="selected-ring"');
  });

  it("skips the selection ring outside the reported region", () => {
    // the embedded stylesheet always names the class; count real rings
    const svg = renderBoard(newState, { selected: [99, 99] });
    expect(count(svg, 'class="selected-ring"')).toBe(0);
    const ringed = renderBoard(newState, { selected: [0, 0] });
    expect(count(ringed, 'class="selected-ring"')).toBe(1);
  });

  it("renders the payload's claims, not recomputed rules", () => {
    const doctored = structuredClone(newState);
    // claim particle 0 is expanded with a commitment it could never have
    doctored.config.particles[0].state = "E";
    doctored.config.particles[0].target = [1, 0];
    // silence particle 1's real decision
    doctored.config.particles[1].decision = "noop";
    const svg = renderBoard(doctored);
    expect(svg).toMatch(/class="particle expanded"[^>]*data-id="0"/);
    expect(svg).toContain('class="commit"');
    expect(count(svg, 'class="intent"')).toBe(0);
  });
});

describe("nodeIndex", () => {
  it("indexes every reported entry by its key", () => {
    const index = nodeIndex(newState);
    expect(index.size).toBe(newState.nodes.length);
    expect(index.get("0,0")?.occupied).toBe(true);
    expect(index.get("1,0")?.occupied).toBe(false);
  });
});
