/**
 * Graph wire format, version 1: the shape returned by
 * POST /schemas/{id}/query with format "graphjson".
 */

export const GRAPH_FORMAT_VERSION = 1;

export const NODE_KINDS = [
  'entityTypeRoot',
  'entityTypeAggregate',
  'relationshipType',
  'variation',
  'junction',
  'message',
] as const;

export const EDGE_STYLES = [
  'typeToVariation',
  'aggregation',
  'reference',
  'featuring',
] as const;

export type NodeKind = (typeof NODE_KINDS)[number];
export type EdgeStyle = (typeof EDGE_STYLES)[number];

export interface GraphNode {
  id: string;
  kind: NodeKind;
  title: string;
  lines: string[];
  color: string;
}

export interface GraphEdge {
  from: string;
  to: string;
  style: EdgeStyle;
  label: string;
}

export interface GraphPayload {
  formatVersion: number;
  nodes: GraphNode[];
  edges: GraphEdge[];
}

export class FormatVersionError extends Error {
  constructor(readonly got: unknown) {
    super(`unsupported formatVersion ${String(got)}`);
    this.name = 'FormatVersionError';
  }
}

export class MalformedPayloadError extends Error {
  constructor(detail: string) {
    super(`malformed graph payload: ${detail}`);
    this.name = 'MalformedPayloadError';
  }
}

function isRecord(value: unknown): value is Record<string, unknown> {
  return typeof value === 'object' && value !== null && !Array.isArray(value);
}

function asStringList(value: unknown, where: string): string[] {
  if (!Array.isArray(value) || value.some((v) => typeof v !== 'string')) {
    throw new MalformedPayloadError(`${where} must be a list of strings`);
  }
  return value as string[];
}

function decodeNode(raw: unknown, index: number): GraphNode {
  if (!isRecord(raw)) {
    throw new MalformedPayloadError(`nodes[${index}] is not an object`);
  }
  const { id, kind, title, lines, color } = raw;
  if (typeof id !== 'string' || id === '') {
    throw new MalformedPayloadError(`nodes[${index}].id missing`);
  }
  if (!(NODE_KINDS as readonly string[]).includes(kind as string)) {
    throw new MalformedPayloadError(
      `nodes[${index}].kind ${JSON.stringify(kind)} is not a known kind`,
    );
  }
  if (typeof title !== 'string' || typeof color !== 'string') {
    throw new MalformedPayloadError(`nodes[${index}] title/color must be strings`);
  }
  return {
    id,
    kind: kind as NodeKind,
    title,
    lines: asStringList(lines, `nodes[${index}].lines`),
    color,
  };
}

function decodeEdge(raw: unknown, index: number): GraphEdge {
  if (!isRecord(raw)) {
    throw new MalformedPayloadError(`edges[${index}] is not an object`);
  }
  const { from, to, style, label } = raw;
  if (typeof from !== 'string' || typeof to !== 'string') {
    throw new MalformedPayloadError(`edges[${index}] endpoints must be strings`);
  }
  if (!(EDGE_STYLES as readonly string[]).includes(style as string)) {
    throw new MalformedPayloadError(
      `edges[${index}].style ${JSON.stringify(style)} is not a known style`,
    );
  }
  if (typeof label !== 'string') {
    throw new MalformedPayloadError(`edges[${index}].label must be a string`);
  }
  return { from, to, style: style as EdgeStyle, label };
}

/**
 * Validate a decoded JSON value against the version-1 wire format.
 *
 * Throws FormatVersionError on a version mismatch (so callers can show the
 * dedicated message) and MalformedPayloadError on any structural problem.
 */
export function decodeGraphPayload(raw: unknown): GraphPayload {
  if (!isRecord(raw)) {
    throw new MalformedPayloadError('payload is not an object');
  }
  if (raw.formatVersion !== GRAPH_FORMAT_VERSION) {
    throw new FormatVersionError(raw.formatVersion);
  }
  if (!Array.isArray(raw.nodes) || !Array.isArray(raw.edges)) {
    throw new MalformedPayloadError('nodes and edges must be lists');
  }
  const nodes = raw.nodes.map(decodeNode);
  const edges = raw.edges.map(decodeEdge);
  const ids = new Set(nodes.map((n) => n.id));
  if (ids.size !== nodes.length) {
    throw new MalformedPayloadError('node ids are not unique');
  }
  for (const [i, edge] of edges.entries()) {
    if (!ids.has(edge.from) || !ids.has(edge.to)) {
      throw new MalformedPayloadError(`edges[${i}] points at an unknown node`);
    }
  }
  return { formatVersion: GRAPH_FORMAT_VERSION, nodes, edges };
}
