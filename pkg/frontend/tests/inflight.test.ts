import { describe, expect, it } from 'vitest';

import { SubmissionGate } from '../src/inflight.js';

function deferred(): { promise: Promise<void>; resolve: () => void } {
  let resolve!: () => void;
  const promise = new Promise<void>((r) => {
    resolve = r;
  });
  return { promise, resolve };
}

describe('SubmissionGate', () => {
  it('runs a lone task immediately', async () => {
    const gate = new SubmissionGate();
    const ran: string[] = [];
    await gate.submit(async () => {
      ran.push('a');
    });
    expect(ran).toEqual(['a']);
    expect(gate.busy).toBe(false);
  });

  it('queues during flight and only the latest queued task runs', async () => {
    const gate = new SubmissionGate();
    const ran: string[] = [];
    const first = deferred();

    const p1 = gate.submit(async () => {
      ran.push('one');
      await first.promise;
    });
    const p2 = gate.submit(async () => {
      ran.push('two');
    });
    const p3 = gate.submit(async () => {
      ran.push('three');
    });

    expect(gate.busy).toBe(true);
    await expect(p2).resolves.toBe('superseded');
    first.resolve();
    await expect(p1).resolves.toBe('ran');
    await expect(p3).resolves.toBe('ran');
    expect(ran).toEqual(['one', 'three']);
  });

  it('keeps accepting work after a task failed', async () => {
    const gate = new SubmissionGate();
    await expect(
      gate.submit(async () => {
        throw new Error('boom');
      }),
    ).rejects.toThrow('boom');
    await expect(gate.submit(async () => {})).resolves.toBe('ran');
  });

  it('runs the queued task even when the running one fails', async () => {
    const gate = new SubmissionGate();
    const first = deferred();
    const ran: string[] = [];

    const p1 = gate.submit(async () => {
      await first.promise;
      throw new Error('boom');
    });
    const p2 = gate.submit(async () => {
      ran.push('follow-up');
    });

    first.resolve();
    await expect(p1).rejects.toThrow('boom');
    await expect(p2).resolves.toBe('ran');
    expect(ran).toEqual(['follow-up']);
  });
});
