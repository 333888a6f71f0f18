/** Entry point: look up the page elements and start the app.
 *
 * The service host defaults to the local development port and can be
 * overridden with ?service=http://host:port in the page URL.
 */

import { AppElements, PlaygroundApp } from "./app.js";
import { SessionClient, httpTransport } from "./client.js";

function must<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing page element #${id}`);
  return el as T;
}

const elements: AppElements = {
  board: must("board"),
  inspector: must("inspector"),
  metrics: must("metrics"),
  status: must("status"),
  conflicts: must("conflicts"),
  instanceInput: must<HTMLTextAreaElement>("instance"),
  newButton: must<HTMLButtonElement>("new-session"),
  stepButton: must<HTMLButtonElement>("step"),
  allButton: must<HTMLButtonElement>("activate-all"),
  clearButton: must<HTMLButtonElement>("clear-activation"),
  undoButton: must<HTMLButtonElement>("undo"),
  autoButton: must<HTMLButtonElement>("auto"),
  schedulerInput: must<HTMLSelectElement>("scheduler"),
  roundsInput: must<HTMLInputElement>("rounds"),
  adversaryInput: must<HTMLSelectElement>("adversary"),
  exportButton: must<HTMLButtonElement>("export"),
};

const params = new URLSearchParams(window.location.search);
const base = params.get("service") ?? "http://127.0.0.1:8787";

const app = new PlaygroundApp(new SessionClient(httpTransport(base)), elements);
app.bind();
