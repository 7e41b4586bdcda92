// Single-page shell with four views: Document, Queue, Index, Graph.

import { ApiClient, ApiError } from './api.js';
import {
  beginDecision, completeDecision, failDecision, graphError, projectGraph,
  projectQueue, projectValidation,
} from './state.js';
import type { GraphState, ValidationState } from './state.js';
import {
  renderDocument, renderGraph, renderIndex, renderQueue, renderValidation,
} from './render.js';
import type { DecisionChoice } from './types.js';

const api = new ApiClient('');
const app = document.getElementById('app') as HTMLElement;

let validation: ValidationState | null = null;
let graph: GraphState | null = null;

function setContent(html: string): void {
  app.innerHTML = html;
}

async function showQueue(): Promise<void> {
  const entries = await api.queue();
  setContent(renderQueue(projectQueue(entries)));
  for (const row of app.querySelectorAll<HTMLElement>('.queue-row')) {
    row.addEventListener('click', () => {
      void showValidation(row.dataset.doc as string);
    });
  }
}

async function showValidation(documentId: string): Promise<void> {
  const items = await api.pending(documentId);
  validation = projectValidation(documentId, items);
  paintValidation();
}

function paintValidation(): void {
  if (!validation) return;
  setContent(renderValidation(validation));
  for (const button of app.querySelectorAll<HTMLButtonElement>('button[data-decision]')) {
    button.addEventListener('click', () => {
      void submit(button.dataset.key as string,
                  button.dataset.decision as DecisionChoice);
    });
  }
}

async function submit(tripleKey: string, decision: DecisionChoice): Promise<void> {
  if (!validation) return;
  const field = app.querySelector<HTMLInputElement>(
    `input.iri-field[data-key="${tripleKey}"]`);
  const request = beginDecision(validation, tripleKey, decision,
                                field?.value ?? undefined);
  if (!request) {
    paintValidation();
    return;
  }
  try {
    await api.decide(request.tripleKey, request.decision, request.iri);
    validation = completeDecision(validation, tripleKey, decision);
  } catch (err) {
    const status = err instanceof ApiError ? err.status : 0;
    const message = err instanceof Error ? err.message : String(err);
    validation = failDecision(validation, tripleKey, status, message);
  }
  paintValidation();
}

async function showIndex(type: string): Promise<void> {
  const buckets = await api.entities(type);
  setContent(renderIndex(type, buckets));
  for (const entry of app.querySelectorAll<HTMLElement>('.index-entry')) {
    entry.addEventListener('click', () => {
      const label = entry.dataset.label ?? '';
      void showGraph(`http://example.org#${label.replace(/ /g, '_')}`);
    });
  }
}

async function showGraph(iri: string, depth = 1): Promise<void> {
  try {
    graph = projectGraph(await api.graph(iri, depth));
  } catch (err) {
    graph = graphError(graph, err instanceof Error ? err.message : String(err));
  }
  setContent(renderGraph(graph));
  for (const node of app.querySelectorAll<HTMLElement>('.node')) {
    // clicking a node re-centers the exploration on it
    node.addEventListener('click', () => {
      void showGraph(node.dataset.iri as string, depth);
    });
  }
}

async function showDocument(documentId: string): Promise<void> {
  const view = await api.mentions(documentId);
  setContent(renderDocument(view));
  for (const mark of app.querySelectorAll<HTMLElement>('mark.entity')) {
    mark.addEventListener('click', () => {
      const iri = mark.dataset.iri;
      if (iri) void showGraph(iri);
    });
  }
}

function wireNavigation(): void {
  document.getElementById('nav-queue')?.addEventListener('click', () => {
    void showQueue();
  });
  document.getElementById('nav-index')?.addEventListener('click', () => {
    const type = (document.getElementById('index-type') as HTMLSelectElement)
      ?.value ?? 'Marque';
    void showIndex(type);
  });
  document.getElementById('nav-graph')?.addEventListener('click', () => {
    const iri = (document.getElementById('graph-center') as HTMLInputElement)
      ?.value;
    if (iri) void showGraph(iri);
  });
  document.getElementById('nav-document')?.addEventListener('click', () => {
    const id = (document.getElementById('document-id') as HTMLInputElement)
      ?.value;
    if (id) void showDocument(id);
  });
}

wireNavigation();
void showQueue();
