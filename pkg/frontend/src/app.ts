/**
 * App shell: fetch service state, render, translate clicks and keys
 * into decision posts. Every mutation round-trips to the service and
 * re-renders from the response, so the page is always a view of the
 * stored session.
 */

import { ApiError, ReviewApi } from './api.js';
import type { Histograms, Suggestions } from './api.js';
import { parseExport } from './state.js';
import type { ExportView } from './state.js';
import {
  renderError,
  renderExportWarning,
  renderNewColumns,
  renderQueue,
  renderResolved,
  renderSessionList,
} from './render.js';

const K = 3;

interface AppState {
  sessionId: string | null;
  suggestions: Suggestions;
  histograms: Histograms | null;
  exportView: ExportView;
  highlight: Record<string, number>;
  focusedRow: number;
  error: string | null;
}

const state: AppState = {
  sessionId: null,
  suggestions: {},
  histograms: null,
  exportView: { decided: [], undecidedBase: [], undecidedNew: [] },
  highlight: {},
  focusedRow: 0,
  error: null,
};

const api = new ReviewApi();

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

function render(): void {
  el('error').innerHTML = renderError(state.error);
  if (!state.sessionId) return;
  el('queue').innerHTML = renderQueue(state);
  el('resolved').innerHTML = renderResolved(state.exportView);
  el('new-cols').innerHTML = renderNewColumns(state.exportView);
  el('export-warning').innerHTML = renderExportWarning(state.exportView);
}

async function refresh(): Promise<void> {
  if (!state.sessionId) return;
  const [suggestions, csv] = await Promise.all([
    api.suggestions(state.sessionId, K),
    api.exportCsv(state.sessionId),
  ]);
  applySuggestions(suggestions);
  state.exportView = parseExport(csv);
  state.error = null;
  render();
}

function applySuggestions(suggestions: Suggestions): void {
  state.suggestions = suggestions;
  // keep highlights in range after pools shrink
  for (const base of Object.keys(suggestions)) {
    const level = state.highlight[base] ?? 0;
    const count = suggestions[base]?.length ?? 0;
    state.highlight[base] = count === 0 ? 0 : Math.min(level, count - 1);
  }
  const rows = Object.keys(suggestions).length;
  state.focusedRow = rows === 0 ? 0 : Math.min(state.focusedRow, rows - 1);
}

async function decide(body: {
  action: 'accept' | 'mark_removed' | 'mark_new' | 'undo';
  base_column?: string;
  new_column?: string;
}): Promise<void> {
  if (!state.sessionId) return;
  try {
    const updated = await api.decide(state.sessionId, body, K);
    applySuggestions(updated);
    state.exportView = parseExport(await api.exportCsv(state.sessionId));
    state.error = null;
  } catch (err) {
    if (err instanceof ApiError && err.status === 409) {
      // stale view: someone consumed the column first, re-pull the truth
      await refresh();
      return;
    }
    state.error = err instanceof Error ? err.message : String(err);
  }
  render();
}

function handleClick(event: Event): void {
  const target = (event.target as HTMLElement).closest('[data-action]');
  if (!(target instanceof HTMLElement)) return;
  const action = target.dataset.action;
  const base = target.dataset.base;
  const newColumn = target.dataset.new;
  if (action === 'accept' && base && newColumn) {
    void decide({ action: 'accept', base_column: base, new_column: newColumn });
  } else if (action === 'mark_removed' && base) {
    void decide({ action: 'mark_removed', base_column: base });
  } else if (action === 'mark_new' && newColumn) {
    void decide({ action: 'mark_new', new_column: newColumn });
  } else if (action === 'undo') {
    void decide({ action: 'undo' });
  } else if (action === 'retry') {
    void refresh().catch((err) => {
      state.error = err instanceof Error ? err.message : String(err);
      render();
    });
  }
}

function handleKey(event: KeyboardEvent): void {
  const bases = Object.keys(state.suggestions);
  if (bases.length === 0) return;
  const base = bases[state.focusedRow];
  if (base === undefined) return;
  const cands = state.suggestions[base] ?? [];
  const level = state.highlight[base] ?? 0;
  switch (event.key) {
    case 'ArrowDown':
      state.focusedRow = Math.min(state.focusedRow + 1, bases.length - 1);
      break;
    case 'ArrowUp':
      state.focusedRow = Math.max(state.focusedRow - 1, 0);
      break;
    case 'ArrowRight':
      if (cands.length) state.highlight[base] = Math.min(level + 1, cands.length - 1);
      break;
    case 'ArrowLeft':
      if (cands.length) state.highlight[base] = Math.max(level - 1, 0);
      break;
    case 'Enter': {
      const cand = cands[level];
      if (cand) void decide({ action: 'accept', base_column: base, new_column: cand.new_column });
      return;
    }
    case 'r':
      void decide({ action: 'mark_removed', base_column: base });
      return;
    case 'u':
      void decide({ action: 'undo' });
      return;
    default:
      return;
  }
  event.preventDefault();
  render();
}

function downloadExport(): void {
  if (!state.sessionId) return;
  void api.exportCsv(state.sessionId).then((csv) => {
    const blob = new Blob([csv], { type: 'text/csv' });
    const link = document.createElement('a');
    link.href = URL.createObjectURL(blob);
    link.download = 'mapping.csv';
    link.click();
    URL.revokeObjectURL(link.href);
  });
}

async function boot(): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  const sessionId = params.get('session');
  if (!sessionId) {
    const sessions = await api.listSessions();
    el('queue').innerHTML = renderSessionList(sessions);
    return;
  }
  state.sessionId = sessionId;
  state.histograms = await api.histograms(sessionId);
  await refresh();
}

export function start(): Promise<void> {
  document.addEventListener('click', handleClick);
  document.addEventListener('keydown', handleKey);
  el('export-btn').addEventListener('click', downloadExport);
  el('undo-btn').addEventListener('click', () => void decide({ action: 'undo' }));
  return boot().catch((err) => {
    state.error = err instanceof Error ? err.message : String(err);
    render();
  });
}
