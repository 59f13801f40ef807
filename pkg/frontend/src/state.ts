/**
 * Console session state and the submit operation.
 *
 * submitQuery talks to the service and returns an updated state; it never
 * inspects the query text beyond checking that it is non-empty. All query
 * semantics, including error positions, come from the service.
 */

import { QueryRejected, type GraphAnswer, type QueryIssue } from './api.js';
import { FormatVersionError, type GraphPayload } from './graphjson.js';
import { QueryHistory } from './history.js';

/** The slice of the service client submitQuery needs; ServiceClient fits. */
export interface QueryPort {
  submitQuery(schemaId: string, query: string): Promise<GraphAnswer>;
  submitQueryTable(schemaId: string, query: string): Promise<string>;
}

export type ViewMode = 'graph' | 'table';

export interface ConsoleState {
  selectedSchemaId: string | null;
  queryText: string;
  viewMode: ViewMode;
  /** Last good graph answer; kept on screen while errors are shown. */
  lastResult: GraphPayload | null;
  lastTable: string | null;
  /** Rejection reported by the service for the current query, if any. */
  issue: QueryIssue | null;
  /** Transport-level trouble (service down, bad payload). */
  banner: string | null;
  elapsedMs: number | null;
  history: QueryHistory;
}

export function initialState(): ConsoleState {
  return {
    selectedSchemaId: null,
    queryText: '',
    viewMode: 'graph',
    lastResult: null,
    lastTable: null,
    issue: null,
    banner: null,
    elapsedMs: null,
    history: new QueryHistory(),
  };
}

/**
 * Run the current query against the selected schema.
 *
 * On success the result fields are replaced and the query is appended to
 * the history. On a 422 the issue is recorded and the previous result kept.
 * On transport failure only the banner changes.
 */
export async function submitQuery(
  state: ConsoleState,
  client: QueryPort,
): Promise<ConsoleState> {
  if (!state.selectedSchemaId) {
    return { ...state, banner: 'select a schema first' };
  }
  if (state.queryText.trim() === '') {
    return { ...state, banner: 'empty query' };
  }

  state.history.push(state.queryText);
  try {
    if (state.viewMode === 'table') {
      const table = await client.submitQueryTable(
        state.selectedSchemaId,
        state.queryText,
      );
      return { ...state, lastTable: table, issue: null, banner: null, elapsedMs: null };
    }
    const answer = await client.submitQuery(state.selectedSchemaId, state.queryText);
    return {
      ...state,
      lastResult: answer.graph,
      issue: null,
      banner: null,
      elapsedMs: answer.elapsedMs,
    };
  } catch (err) {
    if (err instanceof QueryRejected) {
      return { ...state, issue: err.issue, banner: null };
    }
    if (err instanceof FormatVersionError) {
      // the service speaks a newer wire format than this console
      return { ...state, banner: err.message };
    }
    const reason = err instanceof Error ? err.message : String(err);
    return { ...state, banner: `service unreachable: ${reason}` };
  }
}
