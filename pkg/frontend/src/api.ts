// Typed client for the prodkb HTTP endpoints. The UI talks to the service
// exclusively through this module.

import type {
  ArticleQueueEntry,
  DecisionChoice,
  IngestResult,
  MentionsView,
  NeighborhoodGraph,
  PendingItem,
  QueryResult,
} from './types.js';

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

export class ApiClient {
  constructor(private readonly baseUrl: string = '') {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.baseUrl + path, init);
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const body = await response.json();
        if (body && typeof body.detail === 'string') detail = body.detail;
      } catch {
        // keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.request<T>(path, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(body),
    });
  }

  ingest(payload: string, sourceUrl = '', date?: string): Promise<IngestResult> {
    return this.post('/documents', { payload, sourceUrl, date });
  }

  queue(): Promise<ArticleQueueEntry[]> {
    return this.request('/queue');
  }

  pending(documentId: string): Promise<PendingItem[]> {
    return this.request(`/documents/${encodeURIComponent(documentId)}/pending`);
  }

  decide(tripleKey: string, decision: DecisionChoice,
         iri?: string): Promise<ArticleQueueEntry> {
    return this.post(`/triples/${encodeURIComponent(tripleKey)}/decision`,
                     iri === undefined ? { decision } : { decision, iri });
  }

  entities(type: string, initial?: string): Promise<Record<string, string[]>> {
    const params = new URLSearchParams({ type });
    if (initial) params.set('initial', initial);
    return this.request(`/entities?${params}`);
  }

  graph(iri: string, depth = 1): Promise<NeighborhoodGraph> {
    return this.request(`/graph/${encodeURIComponent(iri)}?depth=${depth}`);
  }

  query(text: string): Promise<QueryResult> {
    return this.post('/query', { query: text });
  }

  mentions(documentId: string): Promise<MentionsView> {
    return this.request(`/documents/${encodeURIComponent(documentId)}/mentions`);
  }
}
