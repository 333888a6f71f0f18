/** Board renderer: one SVG string per server state payload.
 *
 * Pure string building so it is testable without a DOM. Every visible
 * fact (occupancy, expansion, semi-occupancy, decisions) is read from
 * the payload; the renderer adds geometry and nothing else. Particles
 * carry data-id and nodes data-node for event delegation in the app.
 */

import { NodeRef, NodeEntry, StatePayload, nodeKey, sameNode } from "./protocol.js";
import { UNIT, fmt, neighborOf, nodeXY, viewBoxFor } from "./geometry.js";

export interface BoardOptions {
  selected?: NodeRef | null;
  activation?: ReadonlySet<number>;
  enabled?: readonly number[];
}

const STYLE = `
  .lattice { fill: #c9ced6; }
  .lattice.floor-row { fill: #8d949e; }
  .floor-line { stroke: #8d949e; stroke-width: 1.5; stroke-dasharray: 6 4; }
  .bbox { fill: rgba(90, 140, 220, 0.07); stroke: #5a8cdc; stroke-width: 1; }
  .commit { stroke: #e08840; stroke-width: 7; stroke-linecap: round; opacity: 0.55; }
  .intent { stroke: #7aa0d4; stroke-width: 2; }
  .semi { fill: none; stroke: #e08840; stroke-width: 2; stroke-dasharray: 3 3; }
  .particle { fill: #3a6ea5; stroke: #1d3a57; stroke-width: 1.5; }
  .particle.expanded { fill: #e08840; stroke: #8a4d1a; }
  .particle.enabled { stroke: #2c9c5a; stroke-width: 3; }
  .particle.activated { stroke: #d43d3d; stroke-width: 3; }
  .pid { font: 11px sans-serif; fill: #ffffff; text-anchor: middle; dominant-baseline: central; pointer-events: none; }
  .selected-ring { fill: none; stroke: #d43d3d; stroke-width: 2; }
`;

function circle(v: NodeRef, r: number, attrs: string): string {
  const [x, y] = nodeXY(v);
  return `<circle cx="${fmt(x)}" cy="${fmt(y)}" r="${fmt(r)}" ${attrs}/>`;
}

function line(a: NodeRef, b: NodeRef, cls: string): string {
  const [x1, y1] = nodeXY(a);
  const [x2, y2] = nodeXY(b);
  return (
    `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}"` +
    ` class="${cls}"/>`
  );
}

function lerp(a: NodeRef, b: NodeRef, t: number): [number, number] {
  const [x1, y1] = nodeXY(a);
  const [x2, y2] = nodeXY(b);
  return [x1 + (x2 - x1) * t, y1 + (y2 - y1) * t];
}

export function renderBoard(state: StatePayload, opts: BoardOptions = {}): string {
  const activation = opts.activation ?? new Set<number>();
  const enabled = new Set(opts.enabled ?? []);
  const refs = state.nodes.map((e) => e.node);
  const vb = viewBoxFor(refs);
  const floor = state.config.floor;
  const parts: string[] = [];

  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="` +
      `${fmt(vb.x)} ${fmt(vb.y)} ${fmt(vb.width)} ${fmt(vb.height)}">`,
  );
  parts.push(`<style>${STYLE}</style>`);

  const [qMin, qMax, rMin, rMax] = state.bbox;
  const corners: NodeRef[] = [
    [qMin, rMin],
    [qMax, rMin],
    [qMax, rMax],
    [qMin, rMax],
  ];
  const points = corners
    .map((c) => nodeXY(c).map(fmt).join(","))
    .join(" ");
  parts.push(`<polygon class="bbox" points="${points}"/>`);

  const floorY = nodeXY([0, floor])[1];
  parts.push(
    `<line class="floor-line" x1="${fmt(vb.x)}" y1="${fmt(floorY)}"` +
      ` x2="${fmt(vb.x + vb.width)}" y2="${fmt(floorY)}"/>`,
  );

  for (const entry of state.nodes) {
    const cls = entry.node[1] === floor ? "lattice floor-row" : "lattice";
    parts.push(
      circle(entry.node, 3, `class="${cls}" data-node="${nodeKey(entry.node)}"`),
    );
  }

  // committed edges first so discs draw over them
  for (const p of state.config.particles) {
    if (p.target !== null) {
      parts.push(line(p.node, p.target, "commit"));
    }
  }

  // intent arrows for contracted bodies about to expand
  for (const p of state.config.particles) {
    const d = p.decision;
    if (p.target === null && d !== null && d.startsWith("expand:")) {
      const to = neighborOf(p.node, d.slice("expand:".length));
      const [x1, y1] = lerp(p.node, to, 0.35);
      const [x2, y2] = lerp(p.node, to, 0.65);
      parts.push(
        `<line class="intent" x1="${fmt(x1)}" y1="${fmt(y1)}"` +
          ` x2="${fmt(x2)}" y2="${fmt(y2)}"/>`,
      );
    }
  }

  for (const v of state.semi_occupied) {
    parts.push(circle(v, UNIT * 0.22, `class="semi" data-node="${nodeKey(v)}"`));
  }

  for (const p of state.config.particles) {
    const classes = ["particle"];
    classes.push(p.state === "." ? "contracted" : "expanded");
    if (enabled.has(p.id)) classes.push("enabled");
    if (activation.has(p.id)) classes.push("activated");
    const attrs =
      `class="${classes.join(" ")}" data-id="${p.id}"` +
      ` data-node="${nodeKey(p.node)}"`;
    parts.push(`<g ${attrs}>`);
    parts.push(circle(p.node, UNIT * 0.3, ""));
    const [x, y] = nodeXY(p.node);
    parts.push(`<text class="pid" x="${fmt(x)}" y="${fmt(y)}">${p.id}</text>`);
    parts.push("</g>");
  }

  const sel = opts.selected;
  if (sel) {
    const onBoard = state.nodes.some((e) => sameNode(e.node, sel));
    if (onBoard) {
      parts.push(circle(sel, UNIT * 0.42, `class="selected-ring"`));
    }
  }

  parts.push("</svg>");
  return parts.join("\n");
}

/** Index the payload's node entries by "q,r" for constant-time lookup. */
export function nodeIndex(state: StatePayload): Map<string, NodeEntry> {
  const index = new Map<string, NodeEntry>();
  for (const entry of state.nodes) {
    index.set(nodeKey(entry.node), entry);
  }
  return index;
}
