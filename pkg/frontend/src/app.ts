/** Playground controller: wires DOM events to the session client.
 *
 * The client is the adversary here: it picks which particles to
 * activate each round and, when the engine reports conflicts, which
 * particle wins each contested site. All rendering goes through the
 * pure modules; this file only moves strings into containers and
 * reads form state back out.
 */

import {
  Conflict,
  NodeRef,
  ServiceError,
  StatePayload,
  StepRecordJson,
  TieBreak,
  siteLabel,
} from "./protocol.js";
import { SessionClient } from "./client.js";
import { renderBoard } from "./board.js";
import { renderInspector } from "./inspector.js";
import { renderMetrics } from "./metrics.js";

export interface AppElements {
  board: HTMLElement;
  inspector: HTMLElement;
  metrics: HTMLElement;
  status: HTMLElement;
  conflicts: HTMLElement;
  instanceInput: HTMLTextAreaElement;
  newButton: HTMLButtonElement;
  stepButton: HTMLButtonElement;
  allButton: HTMLButtonElement;
  clearButton: HTMLButtonElement;
  undoButton: HTMLButtonElement;
  autoButton: HTMLButtonElement;
  schedulerInput: HTMLSelectElement;
  roundsInput: HTMLInputElement;
  adversaryInput: HTMLSelectElement;
  exportButton: HTMLButtonElement;
}

export class PlaygroundApp {
  private client: SessionClient;
  private el: AppElements;
  private state: StatePayload | null = null;
  private enabledIds: number[] = [];
  private activation = new Set<number>();
  private selected: NodeRef | null = null;
  private pendingConflicts: Conflict[] | null = null;

  constructor(client: SessionClient, elements: AppElements) {
    this.client = client;
    this.el = elements;
  }

  bind(): void {
    this.el.newButton.addEventListener("click", () => {
      void this.guard(() => this.newSession());
    });
    this.el.stepButton.addEventListener("click", () => {
      void this.guard(() => this.step([]));
    });
    this.el.allButton.addEventListener("click", () => {
      this.activation = new Set(this.enabledIds);
      this.render();
    });
    this.el.clearButton.addEventListener("click", () => {
      this.activation.clear();
      this.render();
    });
    this.el.undoButton.addEventListener("click", () => {
      void this.guard(() => this.undo());
    });
    this.el.autoButton.addEventListener("click", () => {
      void this.guard(() => this.auto());
    });
    this.el.exportButton.addEventListener("click", () => {
      void this.guard(() => this.exportTrace());
    });
    this.el.board.addEventListener("click", (ev) => {
      this.onBoardClick(ev);
    });
    this.el.conflicts.addEventListener("click", (ev) => {
      const target = ev.target as HTMLElement | null;
      if (target && target.matches("button.resolve")) {
        void this.guard(() => this.resolveConflicts());
      }
    });
  }

  /** Run an action, routing service errors to the status line. */
  private async guard(action: () => Promise<void>): Promise<void> {
    try {
      await action();
      this.el.status.classList.remove("error");
    } catch (exc) {
      if (exc instanceof ServiceError) {
        this.setStatus(`server: ${exc.message}`, true);
        return;
      }
      this.setStatus(exc instanceof Error ? exc.message : String(exc), true);
    }
  }

  private setStatus(text: string, isError = false): void {
    this.el.status.textContent = text;
    this.el.status.classList.toggle("error", isError);
  }

  async newSession(): Promise<void> {
    const instance = this.el.instanceInput.value;
    this.state = await this.client.newSession(instance);
    this.activation.clear();
    this.selected = null;
    this.pendingConflicts = null;
    await this.refreshEnabled();
    this.setStatus(
      `session ${this.state.session}: n=${this.state.config.n}, ` +
        `move budget ${this.state.metrics.move_budget}`,
    );
    this.render();
  }

  private async refreshEnabled(): Promise<void> {
    const res = await this.client.enabled();
    this.enabledIds = res.enabled;
  }

  private describeRecord(record: StepRecordJson): string {
    const moved = record.contractions.length;
    const grew = record.expansions.length;
    return `round ${record.round}: ${grew} expansions, ${moved} moves`;
  }

  private async step(tieBreaks: TieBreak[]): Promise<void> {
    if (!this.state) return;
    const ids = [...this.activation].sort((a, b) => a - b);
    if (ids.length === 0) {
      this.setStatus("activate at least one particle first", true);
      return;
    }
    const res = await this.client.step(ids, tieBreaks);
    if (!res.applied) {
      this.pendingConflicts = res.conflicts;
      this.setStatus(
        `round needs ${res.conflicts.length} tie-break` +
          `${res.conflicts.length === 1 ? "" : "s"}`,
      );
      this.render();
      return;
    }
    this.state = res;
    this.pendingConflicts = null;
    await this.refreshEnabled();
    this.setStatus(this.describeRecord(res.record));
    this.render();
  }

  private async resolveConflicts(): Promise<void> {
    const conflicts = this.pendingConflicts;
    if (!conflicts) return;
    const tieBreaks: TieBreak[] = [];
    for (let i = 0; i < conflicts.length; i++) {
      const picked = this.el.conflicts.querySelector<HTMLInputElement>(
        `input[name="conflict-${i}"]:checked`,
      );
      if (!picked) {
        this.setStatus(`pick a winner for ${siteLabel(conflicts[i].site)}`, true);
        return;
      }
      tieBreaks.push({
        site: conflicts[i].site,
        chosen: Number(picked.value),
      });
    }
    await this.step(tieBreaks);
  }

  private async undo(): Promise<void> {
    this.state = await this.client.undo();
    this.pendingConflicts = null;
    await this.refreshEnabled();
    this.setStatus(`rewound to round ${this.state.round}`);
    this.render();
  }

  private async auto(): Promise<void> {
    const scheduler = this.el.schedulerInput.value;
    const adversary = this.el.adversaryInput.value;
    const rounds = Number(this.el.roundsInput.value) || 1;
    const res = await this.client.auto(scheduler, rounds, adversary);
    this.state = res;
    this.pendingConflicts = null;
    await this.refreshEnabled();
    this.setStatus(`applied ${res.rounds_applied} scheduled rounds`);
    this.render();
  }

  private async exportTrace(): Promise<void> {
    const res = await this.client.exportTrace();
    const blob = new Blob([res.trace], { type: "application/jsonl" });
    const url = URL.createObjectURL(blob);
    const a = document.createElement("a");
    a.href = url;
    a.download = `${res.session}.trace`;
    a.click();
    URL.revokeObjectURL(url);
    this.setStatus(`exported ${res.trace.split("\n").length - 1} lines`);
  }

  private onBoardClick(ev: MouseEvent): void {
    const target = ev.target as Element | null;
    if (!target) return;
    const particle = target.closest("[data-id]");
    if (particle) {
      const pid = Number(particle.getAttribute("data-id"));
      if (this.activation.has(pid)) this.activation.delete(pid);
      else this.activation.add(pid);
    }
    const node = (particle ?? target).closest("[data-node]");
    if (node) {
      const [q, r] = (node.getAttribute("data-node") ?? "0,0").split(",");
      this.selected = [Number(q), Number(r)];
    }
    if (particle || node) this.render();
  }

  private conflictHtml(conflicts: Conflict[]): string {
    const parts: string[] = [`<h3>tie-breaks</h3>`];
    conflicts.forEach((c, i) => {
      const what = c.kind === "node" ? "contraction into" : "expansion onto";
      const options = c.group
        .map(
          (pid) =>
            `<label><input type="radio" name="conflict-${i}"` +
            ` value="${pid}"> ${pid}</label>`,
        )
        .join(" ");
      parts.push(
        `<div class="conflict" data-conflict="${i}">` +
          `<span>${what} ${siteLabel(c.site)}:</span> ${options}</div>`,
      );
    });
    parts.push(`<button class="resolve">apply winners</button>`);
    return parts.join("\n");
  }

  render(): void {
    const state = this.state;
    if (!state) return;
    this.el.board.innerHTML = renderBoard(state, {
      selected: this.selected,
      activation: this.activation,
      enabled: this.enabledIds,
    });
    this.el.inspector.innerHTML = renderInspector(state, this.selected);
    this.el.metrics.innerHTML = renderMetrics(state);
    this.el.conflicts.innerHTML = this.pendingConflicts
      ? this.conflictHtml(this.pendingConflicts)
      : "";
  }
}
