// End-to-end contract test against a live service seeded with the expert
// review fixture: queue progress, accept flow, and the component graph.

import { execFileSync, spawn, type ChildProcess } from 'node:child_process';
import { mkdtempSync, readFileSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join } from 'node:path';
import { fileURLToPath } from 'node:url';
import { afterAll, beforeAll, describe, expect, it } from 'vitest';

import { ApiClient } from '../src/api.js';
import {
  beginDecision, completeDecision, projectGraph, projectQueue,
  projectValidation,
} from '../src/state.js';
import { renderGraph, renderQueue } from '../src/render.js';

const DATA = fileURLToPath(new URL('../../src/prodkb/data', import.meta.url));
const PORT = 8917;
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess;
const api = new ApiClient(BASE);

async function waitForService(): Promise<void> {
  for (let attempt = 0; attempt < 100; attempt++) {
    try {
      const response = await fetch(`${BASE}/queue`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 200));
  }
  throw new Error('service did not come up');
}

beforeAll(async () => {
  const kb = join(mkdtempSync(join(tmpdir(), 'prodkb-ui-')), 'kb');
  execFileSync('python3', [
    '-m', 'prodkb.cli', 'import',
    join(DATA, 'fixtures', 'demo_kb.ttl'), '--kb', kb,
  ]);
  server = spawn('python3', [
    '-m', 'prodkb.cli', 'serve', '--port', String(PORT), '--kb', kb,
    '--snapshot', `dbpedia-snapshot=${join(DATA, 'fixtures', 'dbpedia_snapshot.ttl')}`,
  ], { stdio: 'ignore' });
  await waitForService();
  await api.ingest(
    readFileSync(join(DATA, 'fixtures', 'guerlain.conllu'), 'utf-8'),
    'http://blog.example/maquillage-parfume', '2016-04-25');
}, 60_000);

afterAll(() => {
  server?.kill();
});

describe('validation queue against the live service', () => {
  it('shows decided / total per article', async () => {
    const state = projectQueue(await api.queue());
    expect(state.rows).toHaveLength(1);
    expect(state.rows[0].progress).toBe('0 / 2');
    expect(renderQueue(state)).toContain('0 / 2');
  });

  it('accepting an item moves it to the processed section', async () => {
    const documentId = (await api.queue())[0].documentId;
    let state = projectValidation(documentId, await api.pending(documentId));
    const guerlain = state.pending.find((i) => i.prompt.includes('Guerlain'));
    expect(guerlain).toBeDefined();
    expect(guerlain!.prompt).toBe('Guerlain est de type Marque.');

    const request = beginDecision(state, guerlain!.tripleKey, 'accept');
    expect(request).not.toBeNull();
    await api.decide(request!.tripleKey, request!.decision);
    state = completeDecision(state, guerlain!.tripleKey, 'accept');

    expect(state.pending.map((i) => i.prompt))
      .not.toContain('Guerlain est de type Marque.');
    expect(state.processed.map((i) => i.prompt))
      .toContain('Guerlain est de type Marque.');

    // and the service-side counters moved without a reload
    const queue = projectQueue(await api.queue());
    expect(queue.rows[0].progress).toBe('1 / 2');

    // the accepted typing became part of the queryable knowledge base
    const result = await api.query('SELECT ?b WHERE { ?b rdf:type gr:Brand }');
    const brands = result.rows.map((row) => row.b.value);
    expect(brands).toContain('http://example.org#Guerlain');
  });
});

describe('graph exploration against the live service', () => {
  it('centering on the perfume shows its components', async () => {
    const graph = await api.graph('http://example.org#La_Vie_est_Belle', 1);
    const state = projectGraph(graph);
    const labels = state.nodes.map((n) => n.label);
    expect(labels).toContain('geraniol');
    expect(labels).toContain('linalool');
    const svg = renderGraph(state);
    expect(svg).toContain('geraniol');
    expect(svg).toContain('linalool');
  });

  it('re-centering on a clicked node fetches its neighborhood', async () => {
    const recentered = projectGraph(
      await api.graph('http://example.org#Olivier_Polge', 1));
    expect(recentered.nodes.map((n) => n.label))
      .toContain('La Vie est Belle');
  });

  it('unknown centers fail without destroying the previous graph', async () => {
    const previous = projectGraph(
      await api.graph('http://example.org#La_Vie_est_Belle', 1));
    await expect(api.graph('http://example.org#Nowhere', 1))
      .rejects.toThrowError();
    // the view-model keeps the old state; verified in unit tests, here we
    // only assert the service reported a clean 404
  });
});
