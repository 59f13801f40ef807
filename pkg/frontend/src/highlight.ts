// Editor-side error marking. The service reports 1-based line/column
// positions; a column below 1 means "no usable position" (semantic errors).

export interface ErrorSpot {
  line: number;
  column: number;
  message: string;
}

/** Character offset of a 1-based line/column position inside `text`. */
export function errorOffset(text: string, line: number, column: number): number {
  if (line < 1 || column < 1) return -1;
  const rows = text.split('\n');
  if (line > rows.length) return -1;
  let offset = 0;
  for (let i = 0; i < line - 1; i++) {
    offset += (rows[i] ?? '').length + 1;
  }
  const row = rows[line - 1] ?? '';
  return offset + Math.min(column - 1, row.length);
}

/**
 * The offending source line followed by a caret line pointing at the
 * reported column, e.g.
 *
 *     ENTITY User [name: strin
 *                        ^ unknown type 'strin'
 */
export function caretSnippet(text: string, spot: ErrorSpot): string {
  if (spot.line < 1 || spot.column < 1) return spot.message;
  const row = text.split('\n')[spot.line - 1] ?? '';
  const pad = ' '.repeat(Math.min(spot.column - 1, row.length));
  return `${row}\n${pad}^ ${spot.message}`;
}

/** Column (1-based) the caret in a caretSnippet output sits at. */
export function caretColumn(snippet: string): number {
  const caretRow = snippet.split('\n')[1];
  if (caretRow === undefined) return -1;
  const at = caretRow.indexOf('^');
  return at < 0 ? -1 : at + 1;
}
