/**
 * HTML rendering. Pure string builders so the queue can be tested
 * without a browser; the app shell owns event wiring.
 */

import type { Candidate, Histograms, SessionSummary, Suggestions } from './api.js';
import type { ExportView } from './state.js';
import { fmtP, fmtStat, resolvedLabel, sparklineSvg } from './state.js';

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

export function renderSessionList(sessions: SessionSummary[]): string {
  if (sessions.length === 0) {
    return '<p class="muted">No sessions yet. Create one with the service API or CLI.</p>';
  }
  const rows = sessions
    .map(
      (s) =>
        '<tr>' +
        `<td><a href="?session=${encodeURIComponent(s.id)}"><code>${escapeHtml(s.id)}</code></a></td>` +
        `<td>${escapeHtml(s.base_release)} -&gt; ${escapeHtml(s.new_release)}</td>` +
        `<td>${s.decided} / ${s.total} decided</td>` +
        '</tr>'
    )
    .join('');
  return (
    '<table class="sessions"><thead><tr><th>Session</th><th>Releases</th><th>Progress</th></tr></thead>' +
    `<tbody>${rows}</tbody></table>`
  );
}

function candidateCell(
  base: string,
  cand: Candidate,
  highlighted: boolean,
  hist: Histograms | null
): string {
  const spark = sparklineSvg(hist?.new[cand.new_column] ?? null);
  const cls = highlighted ? 'cand highlight' : 'cand';
  return (
    `<div class="${cls}" data-base="${escapeHtml(base)}" data-new="${escapeHtml(cand.new_column)}">` +
    `<div class="cand-name"><code>${escapeHtml(cand.new_column)}</code> <span class="rank">#${cand.rank}</span></div>` +
    `<div class="cand-stats">p=${fmtP(cand.p_value)} stat=${fmtStat(cand.statistic)}</div>` +
    spark +
    `<button class="btn" data-action="accept" data-base="${escapeHtml(base)}" data-new="${escapeHtml(cand.new_column)}">Accept</button>` +
    '</div>'
  );
}

export interface QueueState {
  suggestions: Suggestions;
  histograms: Histograms | null;
  highlight: Record<string, number>;
  focusedRow: number;
}

export function renderQueue(state: QueueState): string {
  const bases = Object.keys(state.suggestions);
  if (bases.length === 0) {
    return '<p class="muted">Every column is decided. Export the mapping below.</p>';
  }
  const rows = bases
    .map((base, rowIndex) => {
      const cands = state.suggestions[base] ?? [];
      const highlightAt = state.highlight[base] ?? 0;
      const cells = cands
        .map((c, i) => candidateCell(base, c, i === highlightAt, state.histograms))
        .join('');
      const focused = rowIndex === state.focusedRow ? ' focused' : '';
      const baseSpark = sparklineSvg(state.histograms?.base[base] ?? null);
      return (
        `<div class="row${focused}" data-row="${rowIndex}" data-base="${escapeHtml(base)}">` +
        `<div class="base"><code>${escapeHtml(base)}</code>${baseSpark}` +
        `<button class="btn ghost" data-action="mark_removed" data-base="${escapeHtml(base)}">No data</button></div>` +
        `<div class="cands">${cells || '<span class="muted">no candidates left</span>'}</div>` +
        '</div>'
      );
    })
    .join('');
  return rows;
}

export function renderResolved(view: ExportView): string {
  if (view.decided.length === 0) {
    return '<p class="muted">Nothing decided yet.</p>';
  }
  const items = view.decided
    .map((row) => `<li><span class="tag">${escapeHtml(row.change)}</span> ${escapeHtml(resolvedLabel(row))}</li>`)
    .join('');
  return `<ul class="resolved">${items}</ul>`;
}

export function renderNewColumns(view: ExportView): string {
  if (view.undecidedNew.length === 0) return '';
  const chips = view.undecidedNew
    .map(
      (name) =>
        `<span class="chip"><code>${escapeHtml(name)}</code>` +
        `<button class="btn ghost" data-action="mark_new" data-new="${escapeHtml(name)}">Mark new</button></span>`
    )
    .join('');
  return `<div class="new-cols"><span class="muted">Unclaimed new columns:</span> ${chips}</div>`;
}

export function renderExportWarning(view: ExportView): string {
  const pending = view.undecidedBase.length + view.undecidedNew.length;
  if (pending === 0) return '';
  return `<div class="warn">${pending} column(s) still undecided; the export will flag them.</div>`;
}

export function renderError(message: string | null): string {
  if (!message) return '';
  return (
    `<div class="error">${escapeHtml(message)} ` +
    '<button class="btn" data-action="retry">Retry</button></div>'
  );
}
