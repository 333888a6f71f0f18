/** Metrics panel: counters, budgets and check statuses, verbatim.
 *
 * Every number is lifted from the payload's metrics block; the only
 * arithmetic here is formatting ratios for the progress bars.
 */

import { StatePayload } from "./protocol.js";

function pct(used: number, budget: number): string {
  if (budget <= 0) return "0";
  const clamped = Math.max(0, Math.min(1, used / budget));
  return (clamped * 100).toFixed(1);
}

function bar(label: string, used: number, budget: number, cls: string): string {
  const over = used > budget ? " over" : "";
  return (
    `<div class="bar ${cls}${over}" data-used="${used}" data-budget="${budget}">` +
    `<span class="bar-label">${label}: ${used} / ${budget}</span>` +
    `<span class="bar-fill" style="width:${pct(used, budget)}%"></span>` +
    `</div>`
  );
}

function badge(name: string, on: boolean): string {
  return `<span class="badge ${on ? "on" : "off"}" data-badge="${name}">${name}</span>`;
}

export function renderMetrics(state: StatePayload): string {
  const m = state.metrics;
  const parts: string[] = [];
  parts.push(`<h3>run</h3>`);
  parts.push(
    `<p class="counters">round ${m.rounds}, ` +
      `${m.expansions} expansions, ` +
      `${m.distinct_configs} distinct configurations</p>`,
  );
  parts.push(badge("connected", m.connected) + badge("final", m.final));
  parts.push(bar("moves", m.moves, m.move_budget, "moves"));

  parts.push(`<h3>per-particle moves (budget ${m.per_particle_budget})</h3>`);
  const rows: string[] = [];
  for (const p of state.config.particles) {
    const e = m.e_moves[p.id] ?? 0;
    const se = m.se_moves[p.id] ?? 0;
    const over =
      e > m.per_particle_budget || se > m.per_particle_budget ? " over" : "";
    rows.push(
      `<tr class="particle-row${over}" data-id="${p.id}">` +
        `<td>${p.id}</td><td>${e}</td><td>${se}</td>` +
        `<td>${p.fairness_gap} / ${m.fairness_window}</td></tr>`,
    );
  }
  parts.push(
    `<table class="per-particle">` +
      `<thead><tr><th>id</th><th>E</th><th>SE</th><th>idle</th></tr></thead>` +
      `<tbody>${rows.join("")}</tbody></table>`,
  );

  parts.push(`<h3>checks</h3>`);
  const checks = Object.keys(state.checks)
    .sort()
    .map(
      (name) =>
        `<li class="check ${state.checks[name]}" data-check="${name}">` +
        `${name}: ${state.checks[name]}</li>`,
    );
  parts.push(`<ul class="checks">${checks.join("")}</ul>`);
  return parts.join("\n");
}
