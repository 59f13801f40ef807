/**
 * Deterministic initial layout for result graphs.
 *
 * A seeded PRNG scatters the nodes, then a fixed number of force-directed
 * relaxation steps untangles them. Everything is a pure function of
 * (payload, width, height, seed), so two renders of the same answer put
 * every node in the same place and screenshots stay comparable.
 */

import type { GraphPayload } from './graphjson.js';

export const DEFAULT_LAYOUT_SEED = 11;

export interface Point {
  x: number;
  y: number;
}

/** Small fast PRNG; good enough for scatter, never used for anything else. */
export function mulberry32(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state + 0x6d2b79f5) >>> 0;
    let t = state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

const ITERATIONS = 80;
const MARGIN = 60;

export function initialLayout(
  payload: GraphPayload,
  width: number,
  height: number,
  seed: number = DEFAULT_LAYOUT_SEED,
): Map<string, Point> {
  const nodes = payload.nodes;
  const positions = new Map<string, Point>();
  if (nodes.length === 0) return positions;
  if (nodes.length === 1) {
    const only = nodes[0];
    if (only) positions.set(only.id, { x: width / 2, y: height / 2 });
    return positions;
  }

  const rand = mulberry32(seed);
  const margin = Math.min(MARGIN, width / 4, height / 4);
  const innerW = Math.max(1, width - 2 * margin);
  const innerH = Math.max(1, height - 2 * margin);
  const pts: Point[] = nodes.map(() => ({
    x: margin + rand() * innerW,
    y: margin + rand() * innerH,
  }));

  const index = new Map(nodes.map((node, i) => [node.id, i]));
  const springs: Array<[number, number]> = [];
  for (const edge of payload.edges) {
    const a = index.get(edge.from);
    const b = index.get(edge.to);
    if (a !== undefined && b !== undefined && a !== b) springs.push([a, b]);
  }

  const ideal = Math.sqrt((innerW * innerH) / nodes.length);
  let temperature = Math.max(innerW, innerH) / 8;
  const cooling = temperature / (ITERATIONS + 1);

  const disp: Point[] = nodes.map(() => ({ x: 0, y: 0 }));
  for (let step = 0; step < ITERATIONS; step++) {
    for (const d of disp) {
      d.x = 0;
      d.y = 0;
    }
    // Pairwise repulsion; coincident points get an index-based nudge so the
    // result stays deterministic.
    for (let i = 0; i < pts.length; i++) {
      const pi = pts[i]!;
      const di = disp[i]!;
      for (let j = i + 1; j < pts.length; j++) {
        const pj = pts[j]!;
        const dj = disp[j]!;
        let dx = pi.x - pj.x;
        let dy = pi.y - pj.y;
        let dist = Math.hypot(dx, dy);
        if (dist < 1e-6) {
          const angle = (i * 31 + j * 17) % 360;
          dx = Math.cos(angle);
          dy = Math.sin(angle);
          dist = 1;
        }
        const force = (ideal * ideal) / dist;
        const fx = (dx / dist) * force;
        const fy = (dy / dist) * force;
        di.x += fx;
        di.y += fy;
        dj.x -= fx;
        dj.y -= fy;
      }
    }
    // Spring attraction along edges.
    for (const [a, b] of springs) {
      const pa = pts[a]!;
      const pb = pts[b]!;
      const dx = pa.x - pb.x;
      const dy = pa.y - pb.y;
      const dist = Math.max(1e-6, Math.hypot(dx, dy));
      const force = (dist * dist) / ideal;
      const fx = (dx / dist) * force;
      const fy = (dy / dist) * force;
      disp[a]!.x -= fx;
      disp[a]!.y -= fy;
      disp[b]!.x += fx;
      disp[b]!.y += fy;
    }
    // Move, capped by the cooling temperature, and keep inside the box.
    for (let i = 0; i < pts.length; i++) {
      const p = pts[i]!;
      const d = disp[i]!;
      const len = Math.hypot(d.x, d.y);
      if (len > 1e-9) {
        const cap = Math.min(len, temperature);
        p.x += (d.x / len) * cap;
        p.y += (d.y / len) * cap;
      }
      p.x = Math.min(width - margin, Math.max(margin, p.x));
      p.y = Math.min(height - margin, Math.max(margin, p.y));
    }
    temperature = Math.max(1, temperature - cooling);
  }

  nodes.forEach((node, i) => {
    const p = pts[i]!;
    positions.set(node.id, { x: p.x, y: p.y });
  });
  return positions;
}
