/** Wire types and line codec for the session protocol.
 *
 * The service speaks newline-delimited JSON over a single POST endpoint;
 * every line is one message. These types mirror the server payloads
 * field for field. The UI never recomputes anything they carry:
 * predicates, decisions, metrics and check statuses are rendered
 * verbatim.
 */

export const PROTOCOL_VERSION = 1;

export type NodeRef = [number, number];
export type EdgeRef = [NodeRef, NodeRef];
export type Site = NodeRef | EdgeRef;

export interface Predicates {
  upper: boolean;
  lower: boolean;
  pointed: boolean;
  near: boolean;
}

/** One lattice node as the server describes it.
 *
 * `state` is "." for a contracted body, the expansion direction for an
 * expanded one, null for an empty node. `decision` is what the rule
 * would do there: "noop" | "expand:E" | "expand:SE" for contracted
 * bodies, "hold" | "contract" for expanded ones, null off-body.
 */
export interface NodeEntry {
  node: NodeRef;
  occupied: boolean;
  state: string | null;
  semi_occupied: boolean;
  predicates: Predicates;
  decision: string | null;
}

export interface Particle {
  id: number;
  node: NodeRef;
  state: string | null;
  target: NodeRef | null;
  predicates: Predicates;
  decision: string | null;
  fairness_gap: number;
}

export interface Metrics {
  n: number;
  rounds: number;
  moves: number;
  move_budget: number;
  expansions: number;
  e_moves: number[];
  se_moves: number[];
  per_particle_budget: number;
  distinct_configs: number;
  connected: boolean;
  final: boolean;
  fairness_window: number;
}

/** Bounding box as [q_min, q_max, r_min, r_max]. */
export type Box = [number, number, number, number];

export interface StatePayload {
  version: number;
  type: string;
  session: string;
  round: number;
  config: {
    key: string;
    floor: number;
    n: number;
    particles: Particle[];
  };
  semi_occupied: NodeRef[];
  nodes: NodeEntry[];
  bbox: Box;
  union_bbox: Box;
  metrics: Metrics;
  checks: Record<string, string>;
}

export interface TieBreakJson {
  kind: "node" | "edge";
  site: Site;
  group: number[];
  chosen: number;
}

export interface StepRecordJson {
  round: number;
  activated: number[];
  decisions: Record<string, string | null>;
  tie_breaks: TieBreakJson[];
  contractions: [number, NodeRef][];
  expansions: [number, string][];
  config_key: string;
}

export interface Conflict {
  kind: "node" | "edge";
  site: Site;
  group: number[];
}

/** Client-side tie-break choice; `kind` is optional on the wire. */
export interface TieBreak {
  site: Site;
  chosen: number;
}

export interface StepApplied extends StatePayload {
  applied: true;
  record: StepRecordJson;
}

export interface StepConflicts {
  version: number;
  type: "step";
  session: string;
  applied: false;
  conflicts: Conflict[];
}

export type StepResponse = StepApplied | StepConflicts;

export interface EnabledResponse {
  version: number;
  type: "enabled";
  session: string;
  round: number;
  enabled: number[];
}

export interface ExportResponse {
  version: number;
  type: "export";
  session: string;
  trace: string;
}

export interface ErrorResponse {
  version: number;
  type: "error";
  error: string;
}

export interface AutoResponse extends StatePayload {
  rounds_applied: number;
}

export interface NewRequest {
  version: number;
  type: "new";
  instance: string;
}

export interface StateRequest {
  version: number;
  type: "state";
  session: string;
}

export interface EnabledRequest {
  version: number;
  type: "enabled";
  session: string;
}

export interface StepRequest {
  version: number;
  type: "step";
  session: string;
  ids: number[];
  tie_breaks?: TieBreak[];
}

export interface AutoRequest {
  version: number;
  type: "auto";
  session: string;
  scheduler?: string;
  rounds?: number;
  adversary?: string;
}

export interface UndoRequest {
  version: number;
  type: "undo";
  session: string;
}

export interface ExportRequest {
  version: number;
  type: "export";
  session: string;
}

export type AnyRequest =
  | NewRequest
  | StateRequest
  | EnabledRequest
  | StepRequest
  | AutoRequest
  | UndoRequest
  | ExportRequest;

export class ProtocolError extends Error {}

/** Raised when the server answers with an in-band error message. */
export class ServiceError extends Error {}

export function encodeLines(messages: object[]): string {
  return messages.map((m) => JSON.stringify(m) + "\n").join("");
}

export function decodeLines(text: string): unknown[] {
  const out: unknown[] = [];
  for (const line of text.split("\n")) {
    if (!line.trim()) continue;
    try {
      out.push(JSON.parse(line));
    } catch (exc) {
      throw new ProtocolError(`response line is not JSON: ${line}`);
    }
  }
  return out;
}

/** Validate one decoded response: version, in-band errors, expected type.
 *
 * "step" responses are the one case where two shapes share a type tag;
 * callers discriminate on `applied` afterwards.
 */
export function expectMessage<T>(raw: unknown, type: string): T {
  if (typeof raw !== "object" || raw === null) {
    throw new ProtocolError(`expected a JSON object, got ${JSON.stringify(raw)}`);
  }
  const msg = raw as Record<string, unknown>;
  if (msg.type === "error") {
    throw new ServiceError(String(msg.error ?? "unknown server error"));
  }
  if (msg.version !== PROTOCOL_VERSION) {
    throw new ProtocolError(`unsupported protocol version ${msg.version}`);
  }
  if (msg.type !== type) {
    throw new ProtocolError(`expected a ${type} message, got ${msg.type}`);
  }
  return raw as T;
}

export function nodeKey(v: NodeRef): string {
  return `${v[0]},${v[1]}`;
}

export function sameNode(a: NodeRef, b: NodeRef): boolean {
  return a[0] === b[0] && a[1] === b[1];
}

export function siteLabel(site: Site): string {
  if (Array.isArray(site[0])) {
    const [a, b] = site as EdgeRef;
    return `edge (${a[0]},${a[1]})-(${b[0]},${b[1]})`;
  }
  const [q, r] = site as NodeRef;
  return `node (${q},${r})`;
}
