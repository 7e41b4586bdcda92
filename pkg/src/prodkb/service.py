"""The processing chain as a long-running service.

Ingestion runs markup stripping (HTML), entity recognition, linking against
the configured snapshot, relation extraction, and queues every new assertion
as a pending triple for expert review.  Raw text without a dependency parse
gets a whitespace pseudo-tokenization and the reduced pipeline (recognition
plus the lexicon stage only); CoNLL-U payloads get the full rule stage.

All mutations go through the dataset's single writer; the decision journal
plus the documents sidecar file make a knowledge-base directory reopenable.
"""

from __future__ import annotations

import datetime as dt
import hashlib
import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from . import corpus, linker, ner, relex, store
from .corpus import Document, Sentence, Token
from .ner import EntityMention
from .query import bindings_to_tsv, evaluate, parse_query
from .store import (ACCEPT, ACCEPTED, Iri, MODIFY, PENDING, REJECT, Triple,
                    VALIDATED, TEMPORARY, parse_turtle, Provenance)
from .vocab import EX, FOAF, RDF_TYPE, RDFS_LABEL, VocabRegistry, local_name

NER_CONFIDENCE = 0.7
FOAF_DEPICTION = FOAF + "depiction"

FRENCH_TYPE_CLASSES = {
    "groupes": ner.TYPE_CLASS["Group"],
    "groupe": ner.TYPE_CLASS["Group"],
    "division": ner.TYPE_CLASS["Division"],
    "divisions": ner.TYPE_CLASS["Division"],
    "marque": ner.TYPE_CLASS["Brand"],
    "marques": ner.TYPE_CLASS["Brand"],
    "gamme": ner.TYPE_CLASS["Range"],
    "gammes": ner.TYPE_CLASS["Range"],
    "produit": ner.TYPE_CLASS["Product"],
    "produits": ner.TYPE_CLASS["Product"],
}
for _t, _c in ner.TYPE_CLASS.items():
    FRENCH_TYPE_CLASSES.setdefault(_t.lower(), _c)


class UnparseablePayload(ValueError):
    pass


class UnknownType(ValueError):
    pass


@dataclass
class ArticleQueueEntry:
    document_id: str
    excerpt: str
    decided: int
    total: int
    source_url: str
    date: dt.date

    def to_json(self) -> dict:
        return {
            "documentId": self.document_id,
            "excerpt": self.excerpt,
            "decided": self.decided,
            "total": self.total,
            "sourceUrl": self.source_url,
            "date": self.date.isoformat(),
        }


@dataclass
class PendingItem:
    key: str
    triple: Triple
    prompt: str
    sentence_text: str
    options: list[str]

    def to_json(self) -> dict:
        return {
            "tripleKey": self.key,
            "triple": store.triple_to_json(self.triple),
            "prompt": self.prompt,
            "sentence": self.sentence_text,
            "options": self.options,
        }


@dataclass(frozen=True)
class GraphNode:
    iri: str
    label: str
    origin: str               # "local" or a snapshot name
    image: str | None = None  # e.g. a brand logo, shown on hover


@dataclass
class NeighborhoodGraph:
    center: str
    nodes: list[GraphNode]
    edges: list[tuple[str, str, str]]        # (s, p, o) IRIs
    warnings: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "center": self.center,
            "nodes": [{"iri": n.iri, "label": n.label, "origin": n.origin,
                       "image": n.image} for n in self.nodes],
            "edges": [{"s": s, "p": p, "o": o} for s, p, o in self.edges],
            "warnings": self.warnings,
        }


@dataclass
class IngestResult:
    document_id: str
    mention_count: int
    candidate_count: int
    new_pending: int
    reduced_pipeline: bool

    def to_json(self) -> dict:
        return {
            "documentId": self.document_id,
            "mentionCount": self.mention_count,
            "candidateCount": self.candidate_count,
            "newPending": self.new_pending,
            "reducedPipeline": self.reduced_pipeline,
        }


@dataclass
class _DocRecord:
    document: Document
    mentions: list[EntityMention]
    keys: dict[str, str]        # triple key -> evidence sentence text
    content_hash: str
    reduced: bool


def triple_key(t: Triple) -> str:
    """Stable opaque id for a triple, usable in URLs."""
    payload = json.dumps(store.triple_to_json(t), sort_keys=True, ensure_ascii=False)
    return hashlib.sha1(payload.encode("utf-8")).hexdigest()[:16]


# ---------------------------------------------------------------------------
# Pseudo tokenization for the reduced (parse-free) pipeline
# ---------------------------------------------------------------------------

_SENT_SPLIT = re.compile(r"(?<=[.!?])\s+")
_EDGE_PUNCT = ",.;:!?«»()\"'’…"


def _pseudo_tokens(text: str) -> list[str]:
    out: list[str] = []
    for chunk in text.split():
        lead = []
        while chunk and chunk[0] in _EDGE_PUNCT and len(chunk) > 1:
            lead.append(chunk[0])
            chunk = chunk[1:]
        tail = []
        while chunk and chunk[-1] in _EDGE_PUNCT and len(chunk) > 1:
            tail.append(chunk[-1])
            chunk = chunk[:-1]
        out.extend(lead)
        if chunk:
            out.append(chunk)
        out.extend(reversed(tail))
    return out


def pseudo_parse(text: str, doc_id: str, source_url: str = "",
                 date: dt.date | None = None) -> Document:
    """Whitespace tokenization with a flat placeholder tree; enough for
    recognition and the lexicon stage, useless for dependency rules."""
    doc = Document(doc_id, source_url, date or dt.date.today())
    counter = 0
    for block in text.splitlines():
        block = block.strip()
        if not block:
            continue
        for sent_text in _SENT_SPLIT.split(block):
            words = _pseudo_tokens(sent_text)
            if not words:
                continue
            counter += 1
            tokens = tuple(
                Token(i, w, w, "X", 0 if i == 1 else 1, "root" if i == 1 else "dep")
                for i, w in enumerate(words, start=1)
            )
            doc.sentences.append(Sentence(f"s{counter}", sent_text, tokens))
    return doc


def detect_kind(payload: str) -> str:
    """Best-effort payload classification: conllu / html / text."""
    for line in payload.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) == 10 and cols[0].split("-")[0].split(".")[0].isdigit():
            return "conllu"
        break
    if re.search(r"<\s*(html|body|p|div|script|span|h[1-6]|br)\b", payload, re.I):
        return "html"
    return "text"


# ---------------------------------------------------------------------------
# Service
# ---------------------------------------------------------------------------

class KbService:
    def __init__(self, registry: VocabRegistry, dataset: store.Dataset,
                 gazetteer: list[ner.GazetteerEntry],
                 context_rules: list[ner.ContextRule],
                 rules: list[relex.LexSynRule],
                 lexicons: list[relex.RelationLexicon],
                 snapshot: linker.Snapshot | None = None,
                 weights: linker.Weights | None = None,
                 tau: float = linker.DEFAULT_TAU,
                 window: int = relex.DEFAULT_WINDOW,
                 kb_dir: str | Path | None = None):
        self.registry = registry
        self.dataset = dataset
        self.gazetteer = gazetteer
        self.context_rules = context_rules
        self.rules = rules
        self.lexicons = lexicons
        self.snapshot = snapshot
        self.weights = weights or linker.Weights(*linker.DEFAULT_WEIGHTS)
        self.tau = tau
        self.window = window
        self.docs: dict[str, _DocRecord] = {}
        self._by_hash: dict[tuple[str, str], str] = {}
        # each queued triple belongs to the first document that produced it,
        # so per-article decided/total counters partition the decisions
        self._key_owner: dict[str, str] = {}
        self._kb_dir = Path(kb_dir) if kb_dir else None
        # NOTE: callers that configure snapshots must do so before calling
        # reload_documents(), so reprocessing links mentions the same way the
        # original ingestion did (with_packaged_data handles the ordering)

    # -- construction helpers ------------------------------------------------

    @classmethod
    def with_packaged_data(cls, registry: VocabRegistry | None = None,
                           kb_dir: str | Path | None = None,
                           snapshot_files: dict[str, str] | None = None,
                           **kwargs) -> "KbService":
        """Service wired with the data files shipped in the package."""
        from importlib.resources import files
        from .vocab import load_default_registry

        data = files("prodkb").joinpath("data")
        registry = registry or load_default_registry()
        dataset = (store.Dataset.open(kb_dir, registry.prefixes)
                   if kb_dir else store.Dataset())
        service = cls(
            registry,
            dataset,
            ner.load_gazetteer(data.joinpath("gazetteer.tsv").read_text("utf-8")),
            ner.load_context_rules(data.joinpath("context_rules.tsv").read_text("utf-8")),
            relex.load_rules(data.joinpath("rules.json").read_text("utf-8"), registry),
            relex.load_lexicons(data.joinpath("lexicons.json").read_text("utf-8"), registry),
            kb_dir=kb_dir,
            **kwargs,
        )
        for name, path in (snapshot_files or {}).items():
            service.add_snapshot(name, Path(path).read_text("utf-8"))
        if kb_dir:
            service.reload_documents()
        return service

    def add_snapshot(self, name: str, turtle_text: str) -> None:
        """Register a read-only named graph; a snapshot named "linking" also
        becomes the entity-linking candidate source."""
        triples = parse_turtle(turtle_text, self.registry.prefixes)
        self.dataset.add_snapshot(name, triples, source_url=name)
        if name == "linking":
            self.snapshot = linker.snapshot_from_triples(triples)

    def set_linker_snapshot(self, turtle_text: str) -> None:
        triples = parse_turtle(turtle_text, self.registry.prefixes)
        self.snapshot = linker.snapshot_from_triples(triples)

    def import_turtle(self, text: str, source_url: str = "import") -> int:
        """Load a Turtle document straight into the validated graph."""
        count = 0
        for t in parse_turtle(text, self.registry.prefixes):
            if self.dataset.insert(t, Provenance(source_url, dt.date.today(),
                                                 "import", ACCEPTED), VALIDATED):
                count += 1
        return count

    def export_turtle(self) -> str:
        return self.dataset.export_validated(self.registry.prefixes)

    # -- ingestion ---------------------------------------------------------

    def _analyze(self, payload: str, source_url: str, date: dt.date,
                 kind: str, doc_id: str):
        """Pure pipeline pass: parse, recognize, link, extract.  Returns
        (document, mentions, assertions) where each assertion is a
        (triple, extractor, confidence, evidence sentence text) tuple, in
        review-queue order (entity typings first, then relations)."""
        if kind == "auto":
            kind = detect_kind(payload)
        reduced = False
        if kind == "conllu":
            try:
                doc = corpus.load_conllu(payload, doc_id=doc_id,
                                         source_url=source_url, date=date)
            except (corpus.ConlluParseError, corpus.NonTree) as exc:
                raise UnparseablePayload(str(exc)) from exc
        elif kind == "html":
            doc = pseudo_parse(corpus.strip_markup(payload), doc_id, source_url, date)
            reduced = True
        elif kind == "text":
            doc = pseudo_parse(payload, doc_id, source_url, date)
            reduced = True
        else:
            raise UnparseablePayload(f"unknown payload kind {kind!r}")
        if not doc.sentences:
            raise UnparseablePayload("no sentences in payload")

        mentions = ner.recognize(doc, self.gazetteer, self.context_rules)
        if self.snapshot is not None and mentions:
            decisions = linker.link_document(mentions, self.snapshot,
                                             self.weights, self.tau)
            mentions = [
                m if d.is_nil else m.with_link(d.result)
                for m, d in zip(mentions, decisions)
            ]
        candidates = relex.extract(doc, mentions,
                                   [] if reduced else self.rules,
                                   self.lexicons, self.window)

        assertions: list[tuple[Triple, str, float, str]] = []
        typed: set[tuple[str, str]] = set()
        for m in mentions:
            iri = m.linked_iri or ner.mint_iri(m.surface)
            class_iri = ner.TYPE_CLASS[m.entity_type]
            if (iri, class_iri) in typed:
                continue
            typed.add((iri, class_iri))
            assertions.append((Triple(Iri(iri), Iri(RDF_TYPE), Iri(class_iri)),
                               "ner", NER_CONFIDENCE,
                               doc.sentence(m.sentence_id).text))
        for c in candidates:
            assertions.append((c.triple, c.extractor, c.confidence,
                               doc.sentence(c.sentence_id).text))
        return doc, mentions, assertions, reduced

    def ingest(self, payload: str, source_url: str = "", date: dt.date | None = None,
               kind: str = "auto") -> IngestResult:
        if not payload or not payload.strip():
            raise UnparseablePayload("empty payload")
        date = date or dt.date.today()
        content_hash = hashlib.sha256(payload.encode("utf-8")).hexdigest()
        seen = self._by_hash.get((source_url, content_hash))
        if seen is not None:
            record = self.docs[seen]
            return IngestResult(seen, len(record.mentions), len(record.keys), 0,
                                record.reduced)

        doc_id = f"doc-{len(self.docs) + 1:04d}"
        doc, mentions, assertions, reduced = self._analyze(
            payload, source_url, date, kind, doc_id)

        keys: dict[str, str] = {}
        new_pending = 0
        for triple, extractor, confidence, sentence_text in assertions:
            prov = Provenance(source_url, date, extractor, PENDING, confidence)
            if self.dataset.insert(triple, prov, TEMPORARY):
                new_pending += 1
            if triple in self.dataset.validated:
                continue  # auto-suppressed: attested above, nothing to review
            key = triple_key(triple)
            owner = self._key_owner.setdefault(key, doc_id)
            if owner == doc_id:
                keys.setdefault(key, sentence_text)

        record = _DocRecord(doc, mentions, keys, content_hash, reduced)
        self.docs[doc_id] = record
        self._by_hash[(source_url, content_hash)] = doc_id
        self._save_sidecar(doc_id, record, payload, kind)
        return IngestResult(doc_id, len(mentions), len(assertions),
                            new_pending, reduced)

    # -- validation queue ----------------------------------------------------

    def pending_by_article(self) -> list[ArticleQueueEntry]:
        entries = []
        for doc_id, record in self.docs.items():
            statuses = {}
            for triple, prov in self.dataset.temporary.items():
                statuses[triple_key(triple)] = prov.status
            total = len(record.keys)
            if total == 0:
                continue
            decided = sum(1 for k in record.keys
                          if statuses.get(k) not in (None, PENDING))
            entries.append(ArticleQueueEntry(
                doc_id, record.document.text[:240], decided, total,
                record.document.source_url, record.document.date))
        entries.sort(key=lambda e: (e.date, e.document_id), reverse=True)
        return entries

    def pending_triples(self, document_id: str) -> list[PendingItem]:
        record = self.docs.get(document_id)
        if record is None:
            raise store.NotFound(document_id)
        items = []
        key_to_triple = {triple_key(t): (t, p) for t, p in self.dataset.temporary.items()}
        for key, sentence_text in record.keys.items():
            found = key_to_triple.get(key)
            if found is None:
                continue
            triple, prov = found
            if prov.status != PENDING:
                continue
            items.append(PendingItem(key, triple, self._prompt(triple),
                                     sentence_text, self._options(triple)))
        items.sort(key=lambda i: i.key)
        return items

    def _prompt(self, t: Triple) -> str:
        subj = local_name(t.s.value).replace("_", " ")
        if t.p.value == RDF_TYPE and isinstance(t.o, Iri):
            label = self._class_label(t.o.value)
            return f"{subj} est de type {label}."
        prop = self.registry.properties.get(t.p.value)
        prop_label = prop.label if prop and prop.label else local_name(t.p.value)
        obj = (local_name(t.o.value).replace("_", " ")
               if isinstance(t.o, Iri) else t.o.lexical)
        return f"{subj} {prop_label} {obj}."

    def _class_label(self, class_iri: str) -> str:
        for tname, ciri in ner.TYPE_CLASS.items():
            if ciri == class_iri:
                return ner.TYPE_LABEL_FR[tname]
        cdef = self.registry.classes.get(class_iri)
        return cdef.label if cdef and cdef.label else local_name(class_iri)

    def _options(self, t: Triple) -> list[str]:
        options = ["accept", "propose-other-iri", "reject"]
        if t.p.value == RDF_TYPE and t.s.value.startswith(EX):
            options.insert(1, "create-new-entity")
        return options

    def decide(self, key: str, decision: str,
               new_iri: str | None = None) -> ArticleQueueEntry:
        target = None
        for triple in self.dataset.temporary:
            if triple_key(triple) == key:
                target = triple
                break
        if target is None:
            raise store.NotFound(key)
        if decision in ("accept", "create-new-entity"):
            self.dataset.set_status(target, ACCEPT)
        elif decision == "reject":
            self.dataset.set_status(target, REJECT)
        elif decision == "propose-other-iri":
            if not new_iri:
                raise ValueError("propose-other-iri needs an iri")
            replacement = self._substitute(target, target.s.value, new_iri)
            self.dataset.set_status(target, MODIFY, replacement)
        else:
            raise ValueError(f"unknown decision {decision!r}")
        for doc_id, record in self.docs.items():
            if key in record.keys:
                for entry in self.pending_by_article():
                    if entry.document_id == doc_id:
                        return entry
                return ArticleQueueEntry(doc_id, record.document.text[:240],
                                         0, len(record.keys),
                                         record.document.source_url,
                                         record.document.date)
        return ArticleQueueEntry("", "", 0, 0, "", dt.date.today())

    @staticmethod
    def _substitute(t: Triple, old_iri: str, new_iri: str) -> Triple:
        def sub(term):
            if isinstance(term, Iri) and term.value == old_iri:
                return Iri(new_iri)
            return term
        return Triple(sub(t.s), sub(t.p), sub(t.o))

    # -- browsing ----------------------------------------------------------

    def _browse_graphs(self) -> list[str]:
        return [VALIDATED, *sorted(self.dataset.snapshots)]

    def _labels(self) -> dict[str, str]:
        labels: dict[str, str] = {}
        for g in self._browse_graphs():
            for t in self.dataset.graph(g):
                if t.p.value == RDFS_LABEL and not isinstance(t.o, Iri):
                    labels.setdefault(t.s.value, t.o.lexical)
        return labels

    def _images(self) -> dict[str, str]:
        images: dict[str, str] = {}
        for g in self._browse_graphs():
            for t in self.dataset.graph(g):
                if t.p.value == FOAF_DEPICTION:
                    target = t.o.value if isinstance(t.o, Iri) else t.o.lexical
                    images.setdefault(t.s.value, target)
        return images

    def entity_index(self, type_name: str,
                     initial: str | None = None) -> dict[str, list[str]]:
        class_iri = FRENCH_TYPE_CLASSES.get(type_name.strip().lower())
        if class_iri is None:
            raise UnknownType(type_name)
        labels = self._labels()
        found: set[str] = set()
        rdf_type = Iri(RDF_TYPE)
        for g in self._browse_graphs():
            for t in self.dataset.graph(g):
                if t.p == rdf_type and isinstance(t.o, Iri):
                    if class_iri in self.registry.type_closure([t.o.value]):
                        found.add(t.s.value)
        buckets: dict[str, list[str]] = {}
        for iri in found:
            label = labels.get(iri, local_name(iri).replace("_", " "))
            letter = label[:1].upper() if label else "?"
            buckets.setdefault(letter, []).append(label)
        for letter in buckets:
            buckets[letter].sort()
        if initial is not None:
            wanted = initial.upper()
            return {wanted: buckets.get(wanted, [])}
        return dict(sorted(buckets.items()))

    def neighborhood(self, iri: str, depth: int = 1) -> NeighborhoodGraph:
        warnings: list[str] = []
        if depth < 1:
            warnings.append(f"depth {depth} clamped to 1")
            depth = 1
        elif depth > 2:
            warnings.append(f"depth {depth} clamped to 2")
            depth = 2

        annotation_preds = {RDFS_LABEL, FOAF_DEPICTION}
        adjacency: dict[str, set[tuple[str, str, str]]] = {}
        origins: dict[str, str] = {}
        for g in self._browse_graphs():
            origin = "local" if g == VALIDATED else g
            for t in self.dataset.graph(g):
                if not isinstance(t.o, Iri) or t.p.value in annotation_preds:
                    if t.p.value not in annotation_preds:
                        origins.setdefault(t.s.value, origin)
                    continue
                edge = (t.s.value, t.p.value, t.o.value)
                adjacency.setdefault(t.s.value, set()).add(edge)
                adjacency.setdefault(t.o.value, set()).add(edge)
                origins.setdefault(t.s.value, origin)
                origins.setdefault(t.o.value, origin)
        labels = self._labels()
        images = self._images()
        for s in labels:
            origins.setdefault(s, "local")

        if iri not in origins and iri not in adjacency:
            raise store.NotFound(iri)

        nodes: set[str] = {iri}
        edges: set[tuple[str, str, str]] = set()
        frontier = {iri}
        for _ in range(depth):
            next_frontier: set[str] = set()
            for node in sorted(frontier):
                for edge in sorted(adjacency.get(node, set())):
                    edges.add(edge)
                    for endpoint in (edge[0], edge[2]):
                        if endpoint not in nodes:
                            next_frontier.add(endpoint)
                        nodes.add(endpoint)
            frontier = next_frontier
        node_rows = [
            GraphNode(n, labels.get(n, local_name(n).replace("_", " ")),
                      origins.get(n, "local"), images.get(n))
            for n in sorted(nodes)
        ]
        return NeighborhoodGraph(iri, node_rows, sorted(edges), warnings)

    # -- queries ------------------------------------------------------------

    def query(self, text: str) -> tuple[list[str], list[dict]]:
        q = parse_query(text, self.registry)
        bindings = evaluate(q, self.dataset, self._browse_graphs(), self.registry)
        return q.projection, bindings

    def query_tsv(self, text: str) -> str:
        q = parse_query(text, self.registry)
        bindings = evaluate(q, self.dataset, self._browse_graphs(), self.registry)
        return bindings_to_tsv(q.projection, bindings, self.registry.prefixes)

    # -- document views -----------------------------------------------------

    def mentions_view(self, document_id: str) -> dict:
        record = self.docs.get(document_id)
        if record is None:
            raise store.NotFound(document_id)
        doc = record.document
        spans = [
            {
                "sentenceId": m.sentence_id,
                "start": m.span[0],
                "end": m.span[1],
                "surface": m.surface,
                "type": m.entity_type,
                "typeLabel": ner.TYPE_LABEL_FR[m.entity_type],
                "color": ner.TYPE_COLOR[m.entity_type],
                "linkedIri": m.linked_iri,
            }
            for m in record.mentions
        ]
        panel = {
            ner.TYPE_LABEL_FR[t]: [{"surface": s, "count": c} for s, c in rows]
            for t, rows in ner.summarize(record.mentions).items()
        }
        return {
            "documentId": document_id,
            "text": doc.text,
            "sentences": [
                {"id": s.id, "text": s.text, "tokens": [t.form for t in s.tokens]}
                for s in doc.sentences
            ],
            "spans": spans,
            "panel": panel,
            "colors": dict(ner.TYPE_COLOR),
            "reducedPipeline": record.reduced,
        }

    # -- sidecar persistence ---------------------------------------------------

    def _sidecar_path(self) -> Path | None:
        return self._kb_dir / "documents.jsonl" if self._kb_dir else None

    def _save_sidecar(self, doc_id: str, record: _DocRecord,
                      payload: str, kind: str) -> None:
        path = self._sidecar_path()
        if path is None:
            return
        doc = record.document
        entry = {
            "id": doc_id,
            "source_url": doc.source_url,
            "date": doc.date.isoformat(),
            "hash": record.content_hash,
            "reduced": record.reduced,
            "kind": kind,
            "payload": payload,
        }
        with path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(entry, ensure_ascii=False) + "\n")

    def reload_documents(self) -> None:
        """Rebuild the document registry from the sidecar after a journal
        replay.  The pipeline reruns purely (no insertion, no journaling);
        a reprocessed assertion counts as the document's review item only
        when it exists in the temporary graph, mirroring the original
        auto-suppression decisions."""
        path = self._sidecar_path()
        if path is None or not path.exists():
            return
        entries = [json.loads(line) for line in
                   path.read_text(encoding="utf-8").splitlines() if line.strip()]
        for e in entries:
            doc_id = f"doc-{len(self.docs) + 1:04d}"
            try:
                doc, mentions, assertions, reduced = self._analyze(
                    e["payload"], e["source_url"],
                    dt.date.fromisoformat(e["date"]), e.get("kind", "auto"),
                    doc_id)
            except UnparseablePayload:
                continue
            keys: dict[str, str] = {}
            for triple, _extractor, _confidence, sentence_text in assertions:
                if triple not in self.dataset.temporary:
                    continue
                key = triple_key(triple)
                owner = self._key_owner.setdefault(key, doc_id)
                if owner == doc_id:
                    keys.setdefault(key, sentence_text)
            self.docs[doc_id] = _DocRecord(doc, mentions, keys, e["hash"], reduced)
            self._by_hash[(e["source_url"], e["hash"])] = doc_id
