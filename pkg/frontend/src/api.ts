/**
 * Typed client for the review-session HTTP API.
 *
 * All state lives on the service; this module only moves JSON. Numbers
 * are passed through untouched so the view formats exactly what the
 * service computed.
 */

export interface Candidate {
  new_column: string;
  p_value: number | null;
  statistic: number | null;
  rank: number;
}

export type Suggestions = Record<string, Candidate[]>;

export interface SessionSummary {
  id: string;
  base_release: string;
  new_release: string;
  decided: number;
  total: number;
}

export interface HistogramData {
  edges: number[];
  counts: number[];
}

export interface Histograms {
  base: Record<string, HistogramData | null>;
  new: Record<string, HistogramData | null>;
}

export type Action = 'accept' | 'mark_removed' | 'mark_new' | 'undo';

export interface DecisionBody {
  action: Action;
  base_column?: string;
  new_column?: string;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string
  ) {
    super(message);
    this.name = 'ApiError';
  }
}

async function parseError(res: Response): Promise<ApiError> {
  let code = 'unknown';
  let message = res.statusText;
  try {
    const body = await res.json();
    if (body && body.error) {
      code = body.error.code ?? code;
      message = body.error.message ?? message;
    }
  } catch {
    // non-JSON error body, keep the status text
  }
  return new ApiError(res.status, code, message);
}

export class ReviewApi {
  constructor(private readonly baseUrl: string = '') {}

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await fetch(this.baseUrl + path, {
      headers: { 'content-type': 'application/json' },
      ...init,
    });
    if (!res.ok) throw await parseError(res);
    return res.json() as Promise<T>;
  }

  listSessions(): Promise<SessionSummary[]> {
    return this.json('/api/sessions');
  }

  async createSession(basePath: string, newPath: string): Promise<string> {
    const body = JSON.stringify({ base_path: basePath, new_path: newPath });
    const created = await this.json<{ id: string }>('/api/sessions', {
      method: 'POST',
      body,
    });
    return created.id;
  }

  suggestions(sessionId: string, k = 3): Promise<Suggestions> {
    return this.json(`/api/sessions/${encodeURIComponent(sessionId)}/suggestions?k=${k}`);
  }

  decide(sessionId: string, decision: DecisionBody, k = 3): Promise<Suggestions> {
    return this.json(
      `/api/sessions/${encodeURIComponent(sessionId)}/decisions?k=${k}`,
      { method: 'POST', body: JSON.stringify(decision) }
    );
  }

  histograms(sessionId: string): Promise<Histograms> {
    return this.json(`/api/sessions/${encodeURIComponent(sessionId)}/histograms`);
  }

  async exportCsv(sessionId: string): Promise<string> {
    const res = await fetch(
      `${this.baseUrl}/api/sessions/${encodeURIComponent(sessionId)}/export`
    );
    if (!res.ok) throw await parseError(res);
    return res.text();
  }
}
