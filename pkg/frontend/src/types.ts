// Payload shapes of the prodkb service endpoints.

export interface ArticleQueueEntry {
  documentId: string;
  excerpt: string;
  decided: number;
  total: number;
  sourceUrl: string;
  date: string;
}

export interface TermJson {
  type: 'iri' | 'literal';
  value?: string;
  lexical?: string;
  datatype?: string;
  lang?: string;
}

export interface TripleJson {
  s: TermJson;
  p: TermJson;
  o: TermJson;
}

export type DecisionChoice =
  | 'accept'
  | 'create-new-entity'
  | 'propose-other-iri'
  | 'reject';

export interface PendingItem {
  tripleKey: string;
  triple: TripleJson;
  prompt: string;
  sentence: string;
  options: DecisionChoice[];
}

export interface MentionSpan {
  sentenceId: string;
  start: number;
  end: number;
  surface: string;
  type: string;
  typeLabel: string;
  color: string;
  linkedIri: string | null;
}

export interface PanelRow {
  surface: string;
  count: number;
}

export interface MentionsView {
  documentId: string;
  text: string;
  sentences: { id: string; text: string; tokens: string[] }[];
  spans: MentionSpan[];
  panel: Record<string, PanelRow[]>;
  colors: Record<string, string>;
  reducedPipeline: boolean;
}

export interface GraphNode {
  iri: string;
  label: string;
  origin: string;
  image?: string | null;
}

export interface GraphEdge {
  s: string;
  p: string;
  o: string;
}

export interface NeighborhoodGraph {
  center: string;
  nodes: GraphNode[];
  edges: GraphEdge[];
  warnings: string[];
}

export interface QueryResult {
  vars: string[];
  rows: Record<string, TermJson>[];
}

export interface IngestResult {
  documentId: string;
  mentionCount: number;
  candidateCount: number;
  newPending: number;
  reducedPipeline: boolean;
}
