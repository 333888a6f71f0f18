/** Axial-to-pixel layout for the triangular lattice.
 *
 * Matches the server's SVG renderer: q runs along W-E, r along SW-NE,
 * one edge is UNIT pixels, y grows downward (screen coordinates).
 * Everything here is presentation; the semantic content of the board
 * comes from the server payload untouched.
 */

import { NodeRef } from "./protocol.js";

export const UNIT = 40;
const SQ3_2 = Math.sqrt(3) / 2;

export function nodeXY(v: NodeRef): [number, number] {
  const [q, r] = v;
  return [UNIT * (q + r / 2), -UNIT * r * SQ3_2];
}

export const DIRECTIONS = ["E", "W", "NE", "SW", "NW", "SE"] as const;

export const OFFSETS: Record<string, NodeRef> = {
  E: [1, 0],
  W: [-1, 0],
  NE: [0, 1],
  SW: [0, -1],
  NW: [-1, 1],
  SE: [1, -1],
};

export function neighborOf(v: NodeRef, d: string): NodeRef {
  const off = OFFSETS[d];
  if (!off) throw new Error(`unknown direction ${d}`);
  return [v[0] + off[0], v[1] + off[1]];
}

/** The 18 visible positions around a node, in enumeration order:
 * row-major from the top row down, west to east within a row. Index
 * k-1 holds position k. */
export const TWO_HOP_OFFSETS: NodeRef[] = [
  [-2, 2], [-1, 2], [0, 2],
  [-2, 1], [-1, 1], [0, 1], [1, 1],
  [-2, 0], [-1, 0], [1, 0], [2, 0],
  [-1, -1], [0, -1], [1, -1], [2, -1],
  [0, -2], [1, -2], [2, -2],
];

/** Position sets behind the upper/lower predicates, shown as shaded
 * trapezoids in the inspector overlay. */
export const UPPER_POSITIONS = new Set([1, 2, 4, 5, 6]);
export const LOWER_POSITIONS = new Set([13, 14, 15, 17, 18]);

export function twoHopPosition(v: NodeRef, k: number): NodeRef {
  const off = TWO_HOP_OFFSETS[k - 1];
  if (!off) throw new Error(`two-hop position out of range: ${k}`);
  return [v[0] + off[0], v[1] + off[1]];
}

export interface ViewBox {
  x: number;
  y: number;
  width: number;
  height: number;
}

export function viewBoxFor(nodes: NodeRef[], pad = UNIT * 0.6): ViewBox {
  if (nodes.length === 0) {
    return { x: -pad, y: -pad, width: 2 * pad, height: 2 * pad };
  }
  let xMin = Infinity;
  let xMax = -Infinity;
  let yMin = Infinity;
  let yMax = -Infinity;
  for (const v of nodes) {
    const [x, y] = nodeXY(v);
    xMin = Math.min(xMin, x);
    xMax = Math.max(xMax, x);
    yMin = Math.min(yMin, y);
    yMax = Math.max(yMax, y);
  }
  return {
    x: xMin - pad,
    y: yMin - pad,
    width: xMax - xMin + 2 * pad,
    height: yMax - yMin + 2 * pad,
  };
}

/** Fixed-point formatting so snapshots are stable across platforms. */
export function fmt(x: number): string {
  const s = x.toFixed(2);
  return s === "-0.00" ? "0.00" : s;
}
