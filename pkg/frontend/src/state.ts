/**
 * Pure view-model helpers: export parsing, display formatting, sparklines.
 */

import type { HistogramData } from './api.js';

export interface ResolvedRow {
  base: string | null;
  newColumn: string | null;
  change: string;
}

export interface ExportView {
  decided: ResolvedRow[];
  undecidedBase: string[];
  undecidedNew: string[];
}

// Minimal CSV field splitter; handles the quoting csv.writer emits.
function splitCsvLine(line: string): string[] {
  const fields: string[] = [];
  let current = '';
  let quoted = false;
  for (let i = 0; i < line.length; i++) {
    const ch = line[i];
    if (quoted) {
      if (ch === '"') {
        if (line[i + 1] === '"') {
          current += '"';
          i++;
        } else {
          quoted = false;
        }
      } else {
        current += ch;
      }
    } else if (ch === '"' && current === '') {
      quoted = true;
    } else if (ch === ',') {
      fields.push(current);
      current = '';
    } else {
      current += ch;
    }
  }
  fields.push(current);
  return fields;
}

const UNDECIDED_BASE = '# undecided base: ';
const UNDECIDED_NEW = '# undecided new: ';

/**
 * Parse the service's ground-truth export: decided rows plus the
 * undecided trailer comments.
 */
export function parseExport(csv: string): ExportView {
  const view: ExportView = { decided: [], undecidedBase: [], undecidedNew: [] };
  const lines = csv.split(/\r?\n/).filter((l) => l.length > 0);
  for (const line of lines.slice(1)) {
    const fields = splitCsvLine(line);
    const first = fields[0] ?? '';
    if (first.startsWith(UNDECIDED_BASE)) {
      view.undecidedBase.push(first.slice(UNDECIDED_BASE.length));
      continue;
    }
    if (first.startsWith(UNDECIDED_NEW)) {
      view.undecidedNew.push(first.slice(UNDECIDED_NEW.length));
      continue;
    }
    if (first.startsWith('#')) continue;
    if (fields.length !== 3) continue;
    view.decided.push({
      base: fields[0] === '' ? null : fields[0]!,
      newColumn: fields[1] === '' ? null : fields[1]!,
      change: fields[2] ?? '',
    });
  }
  return view;
}

export function fmtP(value: number | null): string {
  return value === null ? 'n/a' : value.toFixed(3);
}

export function fmtStat(value: number | null): string {
  return value === null ? 'n/a' : value.toPrecision(4);
}

export function resolvedLabel(row: ResolvedRow): string {
  switch (row.change) {
    case 'same':
      return `${row.base} kept`;
    case 'renamed':
      return `${row.base} -> ${row.newColumn}`;
    case 'removed':
      return `${row.base}: no data`;
    case 'added':
      return `${row.newColumn} is new`;
    default:
      return `${row.base ?? row.newColumn}`;
  }
}

const SPARK_WIDTH = 120;
const SPARK_HEIGHT = 28;

/** Inline SVG bar chart of normalized bin weights. */
export function sparklineSvg(hist: HistogramData | null): string {
  if (hist === null || hist.counts.length === 0) {
    return `<svg class="spark" width="${SPARK_WIDTH}" height="${SPARK_HEIGHT}"></svg>`;
  }
  const max = Math.max(...hist.counts);
  const barWidth = SPARK_WIDTH / hist.counts.length;
  const bars = hist.counts
    .map((c, i) => {
      const h = max > 0 ? Math.max(1, Math.round((c / max) * (SPARK_HEIGHT - 2))) : 1;
      const x = (i * barWidth).toFixed(1);
      const y = SPARK_HEIGHT - h;
      return `<rect x="${x}" y="${y}" width="${(barWidth - 1).toFixed(1)}" height="${h}"></rect>`;
    })
    .join('');
  return `<svg class="spark" width="${SPARK_WIDTH}" height="${SPARK_HEIGHT}">${bars}</svg>`;
}
