import { describe, expect, it } from 'vitest';

import type { Candidate, Histograms, Suggestions } from '../src/api.js';
import {
  escapeHtml,
  renderError,
  renderExportWarning,
  renderNewColumns,
  renderQueue,
  renderResolved,
  renderSessionList,
} from '../src/render.js';

function candidate(name: string, p: number, rank: number): Candidate {
  return { new_column: name, p_value: p, statistic: 0.1, rank };
}

/** Five bases, three ranked candidates each, mirroring a fresh session. */
function freshSuggestions(): Suggestions {
  const out: Suggestions = {};
  for (let i = 0; i < 5; i++) {
    const base = `c${i}`;
    out[base] = [
      candidate(`n${i}`, 0.98, 1),
      candidate(`n${(i + 1) % 5}`, 0.1, 2),
      candidate(`n${(i + 2) % 5}`, 0.01, 3),
    ];
  }
  return out;
}

const NO_HISTOGRAMS: Histograms = { base: {}, new: {} };

describe('renderQueue', () => {
  it('renders one row per undecided base column', () => {
    const html = renderQueue({
      suggestions: freshSuggestions(),
      histograms: NO_HISTOGRAMS,
      highlight: {},
      focusedRow: 0,
    });
    expect(html.match(/class="row/g)).toHaveLength(5);
    expect(html.match(/data-action="accept"/g)).toHaveLength(15);
    expect(html).toContain('data-action="mark_removed" data-base="c0"');
  });

  it('marks the focused row and the highlighted candidate', () => {
    const html = renderQueue({
      suggestions: freshSuggestions(),
      histograms: NO_HISTOGRAMS,
      highlight: { c1: 2 },
      focusedRow: 1,
    });
    expect(html.match(/row focused/g)).toHaveLength(1);
    const focused = html.split('data-row="1"')[1]!.split('data-row="2"')[0]!;
    const highlighted = focused.split('cand highlight')[1]!;
    expect(highlighted).toContain('data-new="n3"');
  });

  it('drops a consumed candidate from every remaining row', () => {
    // what the queue looks like one refresh after accepting c0 -> n0
    const after = freshSuggestions();
    delete after.c0;
    for (const base of Object.keys(after)) {
      after[base] = after[base]!.filter((c) => c.new_column !== 'n0');
    }
    const html = renderQueue({
      suggestions: after,
      histograms: NO_HISTOGRAMS,
      highlight: {},
      focusedRow: 0,
    });
    expect(html.match(/class="row/g)).toHaveLength(4);
    expect(html).not.toContain('data-new="n0"');
  });

  it('reports completion when nothing is left', () => {
    const html = renderQueue({
      suggestions: {},
      histograms: NO_HISTOGRAMS,
      highlight: {},
      focusedRow: 0,
    });
    expect(html).toContain('Every column is decided');
  });

  it('escapes markup in column names', () => {
    const html = renderQueue({
      suggestions: { '<b>x</b>': [candidate('a"b', 0.5, 1)] },
      histograms: NO_HISTOGRAMS,
      highlight: {},
      focusedRow: 0,
    });
    expect(html).toContain('&lt;b&gt;x&lt;/b&gt;');
    expect(html).toContain('data-new="a&quot;b"');
    expect(html).not.toContain('<b>x</b>');
  });
});

describe('panels', () => {
  it('lists resolved rows with their change tag', () => {
    const html = renderResolved({
      decided: [
        { base: 'a', newColumn: 'b', change: 'renamed' },
        { base: 'c', newColumn: null, change: 'removed' },
      ],
      undecidedBase: [],
      undecidedNew: [],
    });
    expect(html.match(/<li>/g)).toHaveLength(2);
    expect(html).toContain('a -&gt; b');
    expect(html).toContain('c: no data');
  });

  it('offers mark-new buttons for unclaimed columns', () => {
    const html = renderNewColumns({
      decided: [],
      undecidedBase: [],
      undecidedNew: ['extra'],
    });
    expect(html).toContain('data-action="mark_new" data-new="extra"');
  });

  it('warns about pending columns before export', () => {
    const view = { decided: [], undecidedBase: ['a', 'b'], undecidedNew: ['c'] };
    expect(renderExportWarning(view)).toContain('3 column(s) still undecided');
    expect(renderExportWarning({ decided: [], undecidedBase: [], undecidedNew: [] })).toBe('');
  });

  it('renders errors with a retry control', () => {
    expect(renderError('boom & bust')).toContain('boom &amp; bust');
    expect(renderError('x')).toContain('data-action="retry"');
    expect(renderError(null)).toBe('');
  });

  it('links each session in the list', () => {
    const html = renderSessionList([
      { id: 'abc123', base_release: '2013', new_release: '2014', decided: 2, total: 9 },
    ]);
    expect(html).toContain('?session=abc123');
    expect(html).toContain('2 / 9 decided');
    expect(renderSessionList([])).toContain('No sessions yet');
  });
});

describe('escapeHtml', () => {
  it('escapes the four risky characters', () => {
    expect(escapeHtml('<a href="x">&</a>')).toBe('&lt;a href=&quot;x&quot;&gt;&amp;&lt;/a&gt;');
  });
});
