/**
 * Typed client for the schema service HTTP API.
 *
 * The console never interprets queries itself; every query is sent to
 * POST /schemas/{id}/query and the answer is used as-is.
 */

import { decodeGraphPayload, type GraphPayload } from './graphjson.js';

export interface SchemaSummary {
  schemaId: string;
  name: string;
  kind: string;
  typeCounts: { entityTypes: number; relationshipTypes: number };
}

/** Structured body of a 422 response: a query the service rejected. */
export interface QueryIssue {
  kind: 'lex' | 'parse' | 'semantic';
  line: number;
  column: number;
  message: string;
}

export class QueryRejected extends Error {
  constructor(readonly issue: QueryIssue) {
    super(`[${issue.line}:${issue.column}] ${issue.message}`);
    this.name = 'QueryRejected';
  }
}

export class ServiceError extends Error {
  constructor(
    readonly status: number,
    detail: string,
  ) {
    super(detail);
    this.name = 'ServiceError';
  }
}

export interface GraphAnswer {
  graph: GraphPayload;
  elapsedMs: number | null;
}

function issueFrom(body: unknown): QueryIssue {
  const raw = body as Partial<QueryIssue> | null;
  if (
    raw &&
    (raw.kind === 'lex' || raw.kind === 'parse' || raw.kind === 'semantic') &&
    typeof raw.line === 'number' &&
    typeof raw.column === 'number' &&
    typeof raw.message === 'string'
  ) {
    return { kind: raw.kind, line: raw.line, column: raw.column, message: raw.message };
  }
  return { kind: 'semantic', line: 0, column: 0, message: 'query rejected' };
}

export class ServiceClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: typeof fetch = fetch,
  ) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    return this.fetchImpl(this.baseUrl + path, init);
  }

  private async jsonOrThrow(response: Response): Promise<unknown> {
    const body: unknown = await response.json().catch(() => null);
    if (response.status === 422) {
      throw new QueryRejected(issueFrom(body));
    }
    if (!response.ok) {
      const detail =
        body && typeof (body as { detail?: unknown }).detail === 'string'
          ? (body as { detail: string }).detail
          : `request failed with status ${response.status}`;
      throw new ServiceError(response.status, detail);
    }
    return body;
  }

  async listSchemas(): Promise<SchemaSummary[]> {
    const response = await this.request('/schemas');
    return (await this.jsonOrThrow(response)) as SchemaSummary[];
  }

  /** Upload a schema document; resolves to the new schema id. */
  async registerDocument(document: unknown): Promise<string> {
    const response = await this.request('/schemas', {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ document }),
    });
    const body = (await this.jsonOrThrow(response)) as { schemaId: string };
    return body.schemaId;
  }

  /** Run a query and decode the graph wire format. */
  async submitQuery(schemaId: string, query: string): Promise<GraphAnswer> {
    const response = await this.request(
      `/schemas/${encodeURIComponent(schemaId)}/query`,
      {
        method: 'POST',
        headers: { 'content-type': 'application/json' },
        body: JSON.stringify({ query, format: 'graphjson' }),
      },
    );
    const body = (await this.jsonOrThrow(response)) as { result: unknown };
    const header = response.headers.get('x-elapsed-ms');
    const elapsed = header === null ? null : Number(header);
    return {
      graph: decodeGraphPayload(body.result),
      elapsedMs: Number.isFinite(elapsed) ? elapsed : null,
    };
  }

  /** Run a query in the plain-text table format. */
  async submitQueryTable(schemaId: string, query: string): Promise<string> {
    const response = await this.request(
      `/schemas/${encodeURIComponent(schemaId)}/query`,
      {
        method: 'POST',
        headers: { 'content-type': 'application/json' },
        body: JSON.stringify({ query, format: 'table' }),
      },
    );
    const body = (await this.jsonOrThrow(response)) as { result: string };
    return body.result;
  }
}
