/**
 * Turns a graph payload into drawable boxes and edge sketches.
 *
 * Pure geometry and styling, no DOM: the canvas layer only strokes what
 * this module computed, which keeps the visual mapping testable.
 */

import type { EdgeStyle, GraphPayload, NodeKind } from './graphjson.js';
import { DEFAULT_LAYOUT_SEED, initialLayout } from './layout.js';

export type NodeShape = 'header' | 'record' | 'point' | 'card';

export interface NodePaint {
  shape: NodeShape;
  fill: string;
  stereotype: string;
}

// One distinct treatment per node kind. Type boxes carry a stereotype
// label, variations are records listing their features, junctions are
// bare connector dots, messages are borderless cards.
const NODE_PAINT: Record<NodeKind, NodePaint> = {
  entityTypeRoot: { shape: 'header', fill: '#FFFFE0', stereotype: '«entity type»' },
  entityTypeAggregate: { shape: 'header', fill: '#D3D3D3', stereotype: '«entity type»' },
  relationshipType: { shape: 'header', fill: '#ADD8E6', stereotype: '«relationship type»' },
  variation: { shape: 'record', fill: '#FFFFFF', stereotype: '' },
  junction: { shape: 'point', fill: '#000000', stereotype: '' },
  message: { shape: 'card', fill: '#FFFFFF', stereotype: '' },
};

export function nodePaint(kind: NodeKind): NodePaint {
  return NODE_PAINT[kind];
}

export interface EdgePaint {
  color: string;
  dashed: boolean;
  head: 'vee' | 'none';
  tailDiamond: boolean;
}

const EDGE_PAINT: Record<EdgeStyle, EdgePaint> = {
  typeToVariation: { color: '#444444', dashed: true, head: 'vee', tailDiamond: false },
  aggregation: { color: 'red', dashed: false, head: 'vee', tailDiamond: true },
  reference: { color: 'blue', dashed: false, head: 'vee', tailDiamond: false },
  featuring: { color: '#444444', dashed: true, head: 'vee', tailDiamond: false },
};

export function edgePaint(style: EdgeStyle): EdgePaint {
  return EDGE_PAINT[style];
}

export interface NodeBox {
  id: string;
  kind: NodeKind;
  title: string;
  lines: string[];
  paint: NodePaint;
  // Center coordinates; boxes are dragged by mutating these.
  x: number;
  y: number;
  w: number;
  h: number;
}

export interface EdgeSketch {
  from: string;
  to: string;
  style: EdgeStyle;
  label: string;
  paint: EdgePaint;
}

export interface Scene {
  nodes: NodeBox[];
  edges: EdgeSketch[];
  byId: Map<string, NodeBox>;
}

// Rough text metrics for a 12px monospace face; real measurement would need
// a canvas context and the sizes only seed the layout anyway.
const CHAR_W = 7.2;
const LINE_H = 16;
const HEADER_H = 22;
const PAD = 10;
const POINT_SIZE = 8;

function boxSize(kind: NodeKind, title: string, lines: string[]): { w: number; h: number } {
  if (kind === 'junction') return { w: POINT_SIZE, h: POINT_SIZE };
  const widest = Math.max(title.length, ...lines.map((l) => l.length), 8);
  const w = Math.min(420, widest * CHAR_W + 2 * PAD);
  if (kind === 'variation') {
    return { w, h: HEADER_H + lines.length * LINE_H + PAD };
  }
  if (kind === 'message') {
    return { w, h: HEADER_H + PAD };
  }
  // Type headers show the stereotype above the name.
  return { w, h: 2 * HEADER_H };
}

export function buildScene(
  payload: GraphPayload,
  width: number,
  height: number,
  seed: number = DEFAULT_LAYOUT_SEED,
): Scene {
  const positions = initialLayout(payload, width, height, seed);
  const junctionIds = new Set(
    payload.nodes.filter((n) => n.kind === 'junction').map((n) => n.id),
  );

  const nodes: NodeBox[] = payload.nodes.map((node) => {
    const paintBase = nodePaint(node.kind);
    const paint: NodePaint = {
      ...paintBase,
      fill: node.color || paintBase.fill,
    };
    const { w, h } = boxSize(node.kind, node.title, node.lines);
    const at = positions.get(node.id) ?? { x: width / 2, y: height / 2 };
    return {
      id: node.id,
      kind: node.kind,
      title: node.title,
      lines: [...node.lines],
      paint,
      x: at.x,
      y: at.y,
      w,
      h,
    };
  });

  const edges: EdgeSketch[] = payload.edges.map((edge) => {
    const paint = { ...edgePaint(edge.style) };
    // A reference entering a junction continues on the far side, so the
    // arrowhead sits on the continuation edge only.
    if (edge.style === 'reference' && junctionIds.has(edge.to)) {
      paint.head = 'none';
    }
    return { from: edge.from, to: edge.to, style: edge.style, label: edge.label, paint };
  });

  return { nodes, edges, byId: new Map(nodes.map((n) => [n.id, n])) };
}

/** Topmost node whose box contains (x, y), or null. */
export function nodeAt(scene: Scene, x: number, y: number): NodeBox | null {
  for (let i = scene.nodes.length - 1; i >= 0; i--) {
    const node = scene.nodes[i]!;
    const hw = Math.max(node.w, POINT_SIZE * 2) / 2;
    const hh = Math.max(node.h, POINT_SIZE * 2) / 2;
    if (Math.abs(x - node.x) <= hw && Math.abs(y - node.y) <= hh) {
      return node;
    }
  }
  return null;
}
