import { describe, expect, it } from 'vitest';

import {
  FormatVersionError,
  MalformedPayloadError,
  decodeGraphPayload,
} from '../src/graphjson.js';

const SAMPLE = {
  formatVersion: 1,
  nodes: [
    {
      id: 'type:entity:User',
      kind: 'entityTypeRoot',
      title: 'User',
      lines: [],
      color: '#FFFFE0',
    },
    {
      id: 'var:entity:User:2',
      kind: 'variation',
      title: 'User[2]',
      lines: ['+name: String', '- -- [0..*] favoriteMovies'],
      color: '#FFFFFF',
    },
  ],
  edges: [
    {
      from: 'type:entity:User',
      to: 'var:entity:User:2',
      style: 'typeToVariation',
      label: '',
    },
  ],
};

describe('decodeGraphPayload', () => {
  it('accepts a well-formed version-1 payload', () => {
    const payload = decodeGraphPayload(SAMPLE);
    expect(payload.nodes).toHaveLength(2);
    expect(payload.edges).toHaveLength(1);
    expect(payload.nodes[1]?.kind).toBe('variation');
    expect(payload.edges[0]?.style).toBe('typeToVariation');
  });

  it('rejects other format versions with the dedicated error', () => {
    expect(() => decodeGraphPayload({ ...SAMPLE, formatVersion: 2 })).toThrow(
      FormatVersionError,
    );
    expect(() => decodeGraphPayload({ ...SAMPLE, formatVersion: 2 })).toThrow(
      'unsupported formatVersion 2',
    );
    expect(() => decodeGraphPayload({ nodes: [], edges: [] })).toThrow(
      FormatVersionError,
    );
  });

  it('rejects non-objects', () => {
    for (const bad of [null, 7, 'graph', [SAMPLE]]) {
      expect(() => decodeGraphPayload(bad)).toThrow(MalformedPayloadError);
    }
  });

  it('rejects unknown node kinds and edge styles', () => {
    const badKind = structuredClone(SAMPLE) as Record<string, unknown>;
    (badKind.nodes as Array<Record<string, unknown>>)[0]!.kind = 'banana';
    expect(() => decodeGraphPayload(badKind)).toThrow(/not a known kind/);

    const badStyle = structuredClone(SAMPLE) as Record<string, unknown>;
    (badStyle.edges as Array<Record<string, unknown>>)[0]!.style = 'composition';
    expect(() => decodeGraphPayload(badStyle)).toThrow(/not a known style/);
  });

  it('rejects dangling edges and duplicate node ids', () => {
    const dangling = structuredClone(SAMPLE) as Record<string, unknown>;
    (dangling.edges as Array<Record<string, unknown>>)[0]!.to = 'var:entity:User:9';
    expect(() => decodeGraphPayload(dangling)).toThrow(/unknown node/);

    const duplicated = structuredClone(SAMPLE);
    duplicated.nodes.push({ ...SAMPLE.nodes[0]! });
    expect(() => decodeGraphPayload(duplicated)).toThrow(/not unique/);
  });

  it('rejects lines that are not strings', () => {
    const bad = structuredClone(SAMPLE) as Record<string, unknown>;
    (bad.nodes as Array<Record<string, unknown>>)[1]!.lines = ['+name: String', 3];
    expect(() => decodeGraphPayload(bad)).toThrow(/list of strings/);
  });
});
