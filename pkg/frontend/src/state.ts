// Pure view-model layer: every screen state is a projection of service
// responses, so a full reload always reproduces the same screen. No DOM
// access here.

import type {
  ArticleQueueEntry,
  DecisionChoice,
  GraphNode,
  NeighborhoodGraph,
  PendingItem,
} from './types.js';

// ---------------------------------------------------------------------------
// Queue screen
// ---------------------------------------------------------------------------

export interface QueueRow {
  documentId: string;
  excerpt: string;
  progress: string;   // rendered as in the validation queue: "decided / total"
  sourceUrl: string;
  date: string;
  complete: boolean;
}

export interface QueueState {
  rows: QueueRow[];
  empty: boolean;
}

export function projectQueue(entries: ArticleQueueEntry[]): QueueState {
  const rows = entries.map((e) => ({
    documentId: e.documentId,
    excerpt: e.excerpt,
    progress: `${e.decided} / ${e.total}`,
    sourceUrl: e.sourceUrl,
    date: e.date,
    complete: e.total > 0 && e.decided === e.total,
  }));
  return { rows, empty: rows.length === 0 };
}

// ---------------------------------------------------------------------------
// Validation screen
// ---------------------------------------------------------------------------

export interface ProcessedItem {
  tripleKey: string;
  prompt: string;
  decision: DecisionChoice;
}

export interface ValidationState {
  documentId: string;
  pending: PendingItem[];
  processed: ProcessedItem[];
  inFlight: Set<string>;
  error: string | null;
}

export function projectValidation(documentId: string,
                                  items: PendingItem[]): ValidationState {
  return { documentId, pending: items, processed: [], inFlight: new Set(),
           error: null };
}

export interface DecisionRequest {
  tripleKey: string;
  decision: DecisionChoice;
  iri?: string;
}

/** Validate a decision and mark it in flight.  Returns the request to send,
 * or null when nothing must be sent (double submit, missing IRI). */
export function beginDecision(state: ValidationState, tripleKey: string,
                              decision: DecisionChoice,
                              iri?: string): DecisionRequest | null {
  if (state.inFlight.has(tripleKey)) {
    return null;
  }
  const item = state.pending.find((i) => i.tripleKey === tripleKey);
  if (!item) {
    state.error = 'item is no longer pending';
    return null;
  }
  if (decision === 'propose-other-iri' && (!iri || !iri.trim())) {
    state.error = 'une URI de remplacement est requise';
    return null;
  }
  state.error = null;
  state.inFlight.add(tripleKey);
  return iri === undefined ? { tripleKey, decision }
                           : { tripleKey, decision, iri };
}

/** Move a decided item into the processed section (no full reload). */
export function completeDecision(state: ValidationState, tripleKey: string,
                                 decision: DecisionChoice): ValidationState {
  const item = state.pending.find((i) => i.tripleKey === tripleKey);
  return {
    documentId: state.documentId,
    pending: state.pending.filter((i) => i.tripleKey !== tripleKey),
    processed: item
      ? [...state.processed, { tripleKey, prompt: item.prompt, decision }]
      : state.processed,
    inFlight: new Set([...state.inFlight].filter((k) => k !== tripleKey)),
    error: null,
  };
}

/** A conflict (someone already decided) also retires the item, with a notice. */
export function failDecision(state: ValidationState, tripleKey: string,
                             status: number, message: string): ValidationState {
  const inFlight = new Set([...state.inFlight].filter((k) => k !== tripleKey));
  if (status === 409) {
    const item = state.pending.find((i) => i.tripleKey === tripleKey);
    return {
      documentId: state.documentId,
      pending: state.pending.filter((i) => i.tripleKey !== tripleKey),
      processed: item
        ? [...state.processed,
           { tripleKey, prompt: item.prompt, decision: 'accept' }]
        : state.processed,
      inFlight,
      error: 'déjà traité par un autre expert',
    };
  }
  return { ...state, inFlight, error: message };
}

// ---------------------------------------------------------------------------
// Graph screen
// ---------------------------------------------------------------------------

// Node colors by origin (local KB, DBpedia snapshot, NetSent snapshot).
export const ORIGIN_COLORS: Record<string, string> = {
  'local': '#e67e22',
  'dbpedia-snapshot': '#2980b9',
  'netsent-snapshot': '#7f8c8d',
};

export interface PlacedNode extends GraphNode {
  x: number;
  y: number;
  color: string;
  isCenter: boolean;
  image?: string | null;
}

export interface GraphState {
  center: string;
  nodes: PlacedNode[];
  edges: { x1: number; y1: number; x2: number; y2: number; label: string }[];
  warnings: string[];
  error: string | null;
}

const WIDTH = 720;
const HEIGHT = 480;

/** Deterministic radial layout: center node in the middle, neighbors on a
 * circle in node order. */
export function projectGraph(graph: NeighborhoodGraph): GraphState {
  const others = graph.nodes.filter((n) => n.iri !== graph.center);
  const centerNode = graph.nodes.find((n) => n.iri === graph.center);
  const placed = new Map<string, PlacedNode>();
  if (centerNode) {
    placed.set(centerNode.iri, {
      ...centerNode, x: WIDTH / 2, y: HEIGHT / 2,
      color: ORIGIN_COLORS[centerNode.origin] ?? ORIGIN_COLORS.local,
      isCenter: true,
    });
  }
  const radius = Math.min(WIDTH, HEIGHT) / 2 - 60;
  others.forEach((node, i) => {
    const angle = (2 * Math.PI * i) / Math.max(1, others.length);
    placed.set(node.iri, {
      ...node,
      x: WIDTH / 2 + radius * Math.cos(angle),
      y: HEIGHT / 2 + radius * Math.sin(angle),
      color: ORIGIN_COLORS[node.origin] ?? ORIGIN_COLORS.local,
      isCenter: false,
    });
  });
  const edges = graph.edges.flatMap((e) => {
    const a = placed.get(e.s);
    const b = placed.get(e.o);
    if (!a || !b) return [];
    return [{ x1: a.x, y1: a.y, x2: b.x, y2: b.y, label: localName(e.p) }];
  });
  return {
    center: graph.center,
    nodes: [...placed.values()],
    edges,
    warnings: graph.warnings,
    error: null,
  };
}

/** Recentering failed: keep the previous graph, surface a toast. */
export function graphError(previous: GraphState | null,
                           message: string): GraphState {
  if (previous) {
    return { ...previous, error: message };
  }
  return { center: '', nodes: [], edges: [], warnings: [], error: message };
}

export function localName(iri: string): string {
  const hash = iri.lastIndexOf('#');
  const slash = iri.lastIndexOf('/');
  return iri.slice(Math.max(hash, slash) + 1).replace(/_/g, ' ');
}
