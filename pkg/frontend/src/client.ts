/** Session client: typed wrappers over the line protocol.
 *
 * The transport is injected so tests can replay recorded exchanges and
 * the app can point at any host. Requests are serialized through a
 * queue; the protocol has no request ids, so ordering is the contract.
 */

import {
  AnyRequest,
  AutoResponse,
  EnabledResponse,
  ExportResponse,
  PROTOCOL_VERSION,
  StatePayload,
  StepRequest,
  StepResponse,
  TieBreak,
  decodeLines,
  expectMessage,
  ProtocolError,
} from "./protocol.js";

export type Transport = (body: string) => Promise<string>;

/** POST to a running service; in-band errors arrive in the body even
 * on 4xx, so the status code is ignored here. */
export function httpTransport(baseUrl: string): Transport {
  const url = baseUrl.replace(/\/$/, "") + "/session";
  return async (body: string) => {
    const res = await fetch(url, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body,
    });
    return res.text();
  };
}

export class SessionClient {
  private transport: Transport;
  private sid: string | null = null;
  private queue: Promise<unknown> = Promise.resolve();

  constructor(transport: Transport) {
    this.transport = transport;
  }

  get sessionId(): string | null {
    return this.sid;
  }

  private send<T>(message: AnyRequest, type: string): Promise<T> {
    const run = async (): Promise<T> => {
      const text = await this.transport(JSON.stringify(message) + "\n");
      const lines = decodeLines(text);
      if (lines.length !== 1) {
        throw new ProtocolError(
          `expected one response line, got ${lines.length}`,
        );
      }
      return expectMessage<T>(lines[0], type);
    };
    // chain after the previous request whether or not it failed
    const next = this.queue.then(run, run);
    this.queue = next.catch(() => undefined);
    return next;
  }

  private session(): string {
    if (this.sid === null) {
      throw new ProtocolError("no session: call newSession first");
    }
    return this.sid;
  }

  async newSession(instance: string): Promise<StatePayload> {
    const state = await this.send<StatePayload>(
      { version: PROTOCOL_VERSION, type: "new", instance },
      "new",
    );
    this.sid = state.session;
    return state;
  }

  async state(): Promise<StatePayload> {
    return this.send<StatePayload>(
      { version: PROTOCOL_VERSION, type: "state", session: this.session() },
      "state",
    );
  }

  async enabled(): Promise<EnabledResponse> {
    return this.send<EnabledResponse>(
      { version: PROTOCOL_VERSION, type: "enabled", session: this.session() },
      "enabled",
    );
  }

  async step(ids: number[], tieBreaks: TieBreak[] = []): Promise<StepResponse> {
    const request: StepRequest = {
      version: PROTOCOL_VERSION,
      type: "step",
      session: this.session(),
      ids,
    };
    if (tieBreaks.length > 0) {
      request.tie_breaks = tieBreaks;
    }
    return this.send<StepResponse>(request, "step");
  }

  async auto(
    scheduler: string,
    rounds: number,
    adversary: string,
  ): Promise<AutoResponse> {
    return this.send<AutoResponse>(
      {
        version: PROTOCOL_VERSION,
        type: "auto",
        session: this.session(),
        scheduler,
        rounds,
        adversary,
      },
      "auto",
    );
  }

  async undo(): Promise<StatePayload> {
    return this.send<StatePayload>(
      { version: PROTOCOL_VERSION, type: "undo", session: this.session() },
      "undo",
    );
  }

  async exportTrace(): Promise<ExportResponse> {
    return this.send<ExportResponse>(
      { version: PROTOCOL_VERSION, type: "export", session: this.session() },
      "export",
    );
  }
}
