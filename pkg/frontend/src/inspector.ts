/** Node inspector: the server's two-hop story for one selected node.
 *
 * Predicates and the decision are printed exactly as the payload
 * states them. The overlay draws the 18 enumerated positions around
 * the node with occupancy looked up from the same payload; the shaded
 * upper/lower position sets are fixed presentation, the truth values
 * next to them are the server's.
 */

import { NodeRef, StatePayload, nodeKey, sameNode } from "./protocol.js";
import {
  LOWER_POSITIONS,
  UNIT,
  UPPER_POSITIONS,
  fmt,
  nodeXY,
  twoHopPosition,
  viewBoxFor,
} from "./geometry.js";
import { nodeIndex } from "./board.js";

const OVERLAY_STYLE = `
  .cell { fill: #e7e9ee; stroke: #aab0ba; }
  .cell.occupied { fill: #3a6ea5; stroke: #1d3a57; }
  .cell.unknown { fill: #ffffff; stroke: #ccc; stroke-dasharray: 2 2; }
  .cell.upper-set { stroke: #7a5ac0; stroke-width: 2.5; }
  .cell.lower-set { stroke: #2c9c5a; stroke-width: 2.5; }
  .cell.center { fill: #d43d3d; stroke: #7c1f1f; }
  .pos { font: 8px sans-serif; fill: #555; text-anchor: middle; dominant-baseline: central; pointer-events: none; }
`;

function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;");
}

function predBadge(name: string, value: boolean): string {
  const cls = value ? "pred on" : "pred off";
  return `<span class="${cls}" data-pred="${name}">${name}: ${value}</span>`;
}

function overlay(state: StatePayload, center: NodeRef): string {
  const index = nodeIndex(state);
  const refs: NodeRef[] = [center];
  for (let k = 1; k <= 18; k++) refs.push(twoHopPosition(center, k));
  const vb = viewBoxFor(refs, UNIT * 0.45);
  const parts: string[] = [];
  parts.push(
    `<svg class="two-hop" xmlns="http://www.w3.org/2000/svg" viewBox="` +
      `${fmt(vb.x)} ${fmt(vb.y)} ${fmt(vb.width)} ${fmt(vb.height)}">`,
  );
  parts.push(`<style>${OVERLAY_STYLE}</style>`);
  for (let k = 1; k <= 18; k++) {
    const v = twoHopPosition(center, k);
    const entry = index.get(nodeKey(v));
    const classes = ["cell"];
    if (entry === undefined) classes.push("unknown");
    else if (entry.occupied) classes.push("occupied");
    if (UPPER_POSITIONS.has(k)) classes.push("upper-set");
    if (LOWER_POSITIONS.has(k)) classes.push("lower-set");
    const [x, y] = nodeXY(v);
    parts.push(
      `<circle class="${classes.join(" ")}" data-pos="${k}"` +
        ` cx="${fmt(x)}" cy="${fmt(y)}" r="${fmt(UNIT * 0.3)}"/>`,
    );
    parts.push(`<text class="pos" x="${fmt(x)}" y="${fmt(y)}">${k}</text>`);
  }
  const [cx, cy] = nodeXY(center);
  parts.push(
    `<circle class="cell center" cx="${fmt(cx)}" cy="${fmt(cy)}"` +
      ` r="${fmt(UNIT * 0.3)}"/>`,
  );
  parts.push("</svg>");
  return parts.join("\n");
}

function describeState(state: string | null, occupied: boolean): string {
  if (!occupied) return "empty";
  if (state === ".") return "contracted body";
  return `expanded toward ${state}`;
}

export function renderInspector(
  state: StatePayload,
  selected: NodeRef | null,
): string {
  if (!selected) {
    return `<p class="hint">click a node or particle to inspect it</p>`;
  }
  const entry = nodeIndex(state).get(nodeKey(selected));
  const label = `(${selected[0]}, ${selected[1]})`;
  if (!entry) {
    return `<p class="hint">node ${label} is outside the reported region</p>`;
  }
  const parts: string[] = [];
  parts.push(`<h3>node ${label}</h3>`);
  parts.push(
    `<p class="occupancy">${esc(describeState(entry.state, entry.occupied))}` +
      (entry.semi_occupied ? ` <span class="semi-flag">semi-occupied</span>` : "") +
      `</p>`,
  );
  const particle = state.config.particles.find((p) => sameNode(p.node, selected));
  if (particle) {
    const target =
      particle.target === null
        ? ""
        : `, committed to (${particle.target[0]}, ${particle.target[1]})`;
    parts.push(
      `<p class="particle-info">particle ${particle.id}` +
        `${target}, idle for ${particle.fairness_gap} of ` +
        `${state.metrics.fairness_window} rounds</p>`,
    );
  }
  const preds = entry.predicates;
  parts.push(
    `<p class="predicates">` +
      predBadge("upper", preds.upper) +
      predBadge("lower", preds.lower) +
      predBadge("pointed", preds.pointed) +
      predBadge("near", preds.near) +
      `</p>`,
  );
  parts.push(
    `<p class="decision">decision: <code>${esc(entry.decision ?? "none")}</code></p>`,
  );
  parts.push(overlay(state, selected));
  return parts.join("\n");
}
