/** Page wiring: editor, schema picker, view toggle, result pane. */

import { ServiceClient } from './api.js';
import { CanvasRenderer } from './canvas.js';
import { caretSnippet, errorOffset } from './highlight.js';
import { SubmissionGate } from './inflight.js';
import { initialState, submitQuery, type ConsoleState } from './state.js';

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
}

function caretOnFirstLine(area: HTMLTextAreaElement): boolean {
  return !area.value.slice(0, area.selectionStart).includes('\n');
}

function caretOnLastLine(area: HTMLTextAreaElement): boolean {
  return !area.value.slice(area.selectionEnd).includes('\n');
}

function boot(): void {
  const schemaSelect = byId<HTMLSelectElement>('schema-select');
  const queryInput = byId<HTMLTextAreaElement>('query-input');
  const runButton = byId<HTMLButtonElement>('run-button');
  const errorBox = byId<HTMLPreElement>('error-box');
  const banner = byId<HTMLDivElement>('banner');
  const statusLine = byId<HTMLSpanElement>('status-line');
  const tableOutput = byId<HTMLPreElement>('table-output');
  const canvas = byId<HTMLCanvasElement>('graph-canvas');
  const tooltip = byId<HTMLDivElement>('tooltip');
  const viewButtons = {
    graph: byId<HTMLButtonElement>('view-graph'),
    table: byId<HTMLButtonElement>('view-table'),
  };

  const client = new ServiceClient('');
  const renderer = new CanvasRenderer(canvas, tooltip);
  const gate = new SubmissionGate();
  let state: ConsoleState = initialState();

  function apply(next: ConsoleState): void {
    state = next;

    banner.textContent = state.banner ?? '';
    banner.style.display = state.banner ? 'block' : 'none';

    if (state.issue) {
      errorBox.textContent = caretSnippet(state.queryText, state.issue);
      errorBox.style.display = 'block';
      const at = errorOffset(state.queryText, state.issue.line, state.issue.column);
      if (at >= 0) {
        queryInput.focus();
        queryInput.setSelectionRange(at, Math.min(at + 1, state.queryText.length));
      }
    } else {
      errorBox.textContent = '';
      errorBox.style.display = 'none';
    }

    viewButtons.graph.classList.toggle('active', state.viewMode === 'graph');
    viewButtons.table.classList.toggle('active', state.viewMode === 'table');
    canvas.style.display = state.viewMode === 'graph' ? 'block' : 'none';
    tableOutput.style.display = state.viewMode === 'table' ? 'block' : 'none';

    if (state.viewMode === 'table') {
      tableOutput.textContent = state.lastTable ?? '';
    } else if (state.lastResult) {
      renderer.show(state.lastResult);
    } else {
      renderer.showMessage('run a query to see its subschema');
    }

    statusLine.textContent =
      state.elapsedMs === null ? '' : `${state.elapsedMs.toFixed(1)} ms`;
  }

  function submit(): void {
    const prepared: ConsoleState = {
      ...state,
      selectedSchemaId: schemaSelect.value || null,
      queryText: queryInput.value,
    };
    void gate.submit(async () => {
      apply(await submitQuery(prepared, client));
    });
  }

  runButton.addEventListener('click', submit);

  queryInput.addEventListener('keydown', (ev) => {
    if (ev.key === 'Enter' && (ev.ctrlKey || ev.metaKey)) {
      ev.preventDefault();
      submit();
      return;
    }
    if (ev.key === 'ArrowUp' && caretOnFirstLine(queryInput)) {
      const recalled = state.history.recallBack(queryInput.value);
      if (recalled !== null) {
        ev.preventDefault();
        queryInput.value = recalled;
      }
      return;
    }
    if (ev.key === 'ArrowDown' && caretOnLastLine(queryInput)) {
      const recalled = state.history.recallForward();
      if (recalled !== null) {
        ev.preventDefault();
        queryInput.value = recalled;
      }
    }
  });

  for (const mode of ['graph', 'table'] as const) {
    viewButtons[mode].addEventListener('click', () => {
      if (state.viewMode === mode) return;
      state = { ...state, viewMode: mode };
      apply(state);
      if (queryInput.value.trim() !== '') submit();
    });
  }

  client
    .listSchemas()
    .then((schemas) => {
      schemaSelect.replaceChildren(
        ...schemas.map((schema) => {
          const option = document.createElement('option');
          option.value = schema.schemaId;
          option.textContent = `${schema.name} (${schema.kind})`;
          return option;
        }),
      );
      if (schemas.length === 0) {
        apply({ ...state, banner: 'no schemas registered on the service' });
      } else {
        apply(state);
      }
    })
    .catch((err: unknown) => {
      const reason = err instanceof Error ? err.message : String(err);
      apply({ ...state, banner: `service unreachable: ${reason}` });
    });
}

document.addEventListener('DOMContentLoaded', boot);
