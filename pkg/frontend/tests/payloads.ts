// Synthetic payload builder shared by the layout and scene tests.

import { NODE_KINDS, type GraphPayload, type GraphNode } from '../src/graphjson.js';

export function syntheticPayload(nodeCount: number): GraphPayload {
  const nodes: GraphNode[] = [];
  for (let i = 0; i < nodeCount; i++) {
    const kind = NODE_KINDS[i % (NODE_KINDS.length - 1)]!; // skip "message"
    nodes.push({
      id: `n${i}`,
      kind,
      title: `Node ${i}`,
      lines: kind === 'variation' ? [`+field${i}: String`] : [],
      color: '#FFFFFF',
    });
  }
  const edges = [];
  for (let i = 1; i < nodeCount; i++) {
    edges.push({
      from: `n${i - 1}`,
      to: `n${i}`,
      style: 'reference' as const,
      label: '',
    });
  }
  return { formatVersion: 1, nodes, edges };
}
