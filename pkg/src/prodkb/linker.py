"""Entity linking against a local knowledge-base snapshot.

Candidates come from exact label/alias matches plus fuzzy label matches; each
candidate is scored by a weighted sum of three [0,1] components: string
similarity (normalized edit distance against the best of label and aliases),
context similarity (TF-IDF cosine between the document's lemmas and the
entity description, IDF taken over all snapshot descriptions) and graph
connectivity (overlap between the entity's neighbors and the candidate pool
of the document's other mentions).  One joint pass per document, no
sequential commitment; mentions below the acceptance threshold stay NIL.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable

from .ner import EntityMention
from .store import Iri, Literal, Triple
from .vocab import PKB, RDFS_LABEL

PKB_ALIAS = PKB + "alias"
PKB_DESCRIPTION = PKB + "description"

FUZZY_THRESHOLD = 0.8
DEFAULT_WEIGHTS = (0.4, 0.3, 0.3)
DEFAULT_TAU = 0.5

NIL = "NIL"


class WeightsInvalid(ValueError):
    pass


@dataclass(frozen=True)
class KbEntity:
    iri: str
    label: str
    aliases: frozenset[str] = frozenset()
    description: tuple[str, ...] = ()
    neighbors: frozenset[str] = frozenset()


@dataclass(frozen=True)
class Weights:
    string: float
    context: float
    connectivity: float

    def check(self) -> None:
        total = self.string + self.context + self.connectivity
        if min(self.string, self.context, self.connectivity) < 0 or abs(total - 1.0) > 1e-6:
            raise WeightsInvalid(f"weights must be non-negative and sum to 1, got {self}")

    def normalized(self) -> "Weights":
        total = self.string + self.context + self.connectivity
        if total <= 0:
            raise WeightsInvalid("weights must have a positive sum")
        return Weights(self.string / total, self.context / total,
                       self.connectivity / total)


@dataclass(frozen=True)
class CandidateScore:
    entity: str
    string_sim: float
    context_sim: float
    connectivity: float
    total: float


@dataclass(frozen=True)
class LinkDecision:
    mention: EntityMention
    result: str  # entity IRI or NIL
    score: CandidateScore | None = None

    @property
    def is_nil(self) -> bool:
        return self.result == NIL


# ---------------------------------------------------------------------------
# Snapshot
# ---------------------------------------------------------------------------

class Snapshot:
    """Read-only entity collection indexed for candidate generation."""

    def __init__(self, entities: Iterable[KbEntity]):
        self.entities: dict[str, KbEntity] = {e.iri: e for e in entities}
        self._by_name: dict[str, set[str]] = {}
        for e in self.entities.values():
            for name in {e.label, *e.aliases}:
                self._by_name.setdefault(_norm(name), set()).add(e.iri)
        # document frequency over entity descriptions, for IDF
        self.doc_freq: Counter = Counter()
        for e in self.entities.values():
            self.doc_freq.update(set(e.description))
        self.n_docs = len(self.entities)

    def exact(self, name: str) -> set[str]:
        return set(self._by_name.get(_norm(name), set()))

    def idf(self, term: str) -> float:
        return math.log((1 + self.n_docs) / (1 + self.doc_freq.get(term, 0)))


def snapshot_from_triples(triples: Iterable[Triple]) -> Snapshot:
    """Build a snapshot from a Turtle graph: rdfs:label names the entity,
    pkb:alias / pkb:description annotate it, and any IRI-to-IRI triple links
    the two endpoints as neighbors (both directions)."""
    labels: dict[str, str] = {}
    aliases: dict[str, set[str]] = {}
    descriptions: dict[str, list[str]] = {}
    neighbors: dict[str, set[str]] = {}
    subjects: set[str] = set()

    triples = list(triples)
    for t in triples:
        s = t.s.value
        subjects.add(s)
        if t.p.value == RDFS_LABEL and isinstance(t.o, Literal):
            labels.setdefault(s, t.o.lexical)
        elif t.p.value == PKB_ALIAS and isinstance(t.o, Literal):
            aliases.setdefault(s, set()).add(t.o.lexical)
        elif t.p.value == PKB_DESCRIPTION and isinstance(t.o, Literal):
            descriptions.setdefault(s, []).extend(_lemmas(t.o.lexical))
    for t in triples:
        if isinstance(t.o, Iri) and t.p.value not in (RDFS_LABEL,):
            if t.o.value in subjects or t.o.value in labels:
                neighbors.setdefault(t.s.value, set()).add(t.o.value)
                neighbors.setdefault(t.o.value, set()).add(t.s.value)

    entities = []
    for iri in sorted(subjects):
        if iri not in labels:
            continue
        entities.append(KbEntity(
            iri=iri,
            label=labels[iri],
            aliases=frozenset(aliases.get(iri, set())),
            description=tuple(descriptions.get(iri, [])),
            neighbors=frozenset(neighbors.get(iri, set())),
        ))
    return Snapshot(entities)


def _norm(s: str) -> str:
    return " ".join(s.casefold().split())


def _lemmas(text: str) -> list[str]:
    return [w for w in _norm(text).split() if w]


# ---------------------------------------------------------------------------
# String similarity
# ---------------------------------------------------------------------------

def levenshtein(a: str, b: str) -> int:
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            current.append(min(previous[j] + 1,
                               current[j - 1] + 1,
                               previous[j - 1] + (ca != cb)))
        previous = current
    return previous[-1]


def edit_similarity(a: str, b: str) -> float:
    """1 - dist/max(len); 1.0 for two empty strings."""
    a, b = _norm(a), _norm(b)
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(a, b) / longest


def string_similarity(surface: str, entity: KbEntity) -> float:
    return max(edit_similarity(surface, name) for name in {entity.label, *entity.aliases})


# ---------------------------------------------------------------------------
# Context similarity (TF-IDF cosine)
# ---------------------------------------------------------------------------

def tfidf_cosine(doc_terms: Iterable[str], entity_terms: Iterable[str],
                 snapshot: Snapshot) -> float:
    doc_tf = Counter(doc_terms)
    ent_tf = Counter(entity_terms)
    if not doc_tf or not ent_tf:
        return 0.0
    dot = 0.0
    for term in doc_tf.keys() & ent_tf.keys():
        w = snapshot.idf(term)
        dot += doc_tf[term] * w * ent_tf[term] * w
    if dot == 0.0:
        return 0.0
    norm_doc = math.sqrt(sum((c * snapshot.idf(t)) ** 2 for t, c in doc_tf.items()))
    norm_ent = math.sqrt(sum((c * snapshot.idf(t)) ** 2 for t, c in ent_tf.items()))
    if norm_doc == 0.0 or norm_ent == 0.0:
        return 0.0
    return dot / (norm_doc * norm_ent)


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def generate_candidates(mention: EntityMention, snapshot: Snapshot) -> list[KbEntity]:
    """Exact label/alias matches plus entities whose label is within the
    fuzzy edit-similarity threshold of the surface."""
    found = snapshot.exact(mention.surface)
    for e in snapshot.entities.values():
        if e.iri in found:
            continue
        if string_similarity(mention.surface, e) >= FUZZY_THRESHOLD:
            found.add(e.iri)
    return [snapshot.entities[iri] for iri in sorted(found)]


def score_candidates(mention: EntityMention, doc_context: Iterable[str],
                     candidates: list[KbEntity], cohorts: set[str],
                     weights: Weights, snapshot: Snapshot) -> list[CandidateScore]:
    """Rank candidates by the weighted three-component score; ties break by
    IRI ascending.  ``cohorts`` is the union of the other mentions' candidate
    IRIs in the same document."""
    weights.check()
    doc_terms = list(doc_context)
    scores = []
    for c in candidates:
        s_string = string_similarity(mention.surface, c)
        s_context = tfidf_cosine(doc_terms, c.description, snapshot)
        s_conn = len(c.neighbors & cohorts) / max(1, len(cohorts))
        total = (weights.string * s_string + weights.context * s_context
                 + weights.connectivity * s_conn)
        scores.append(CandidateScore(c.iri, s_string, s_context, s_conn, total))
    scores.sort(key=lambda cs: (-cs.total, cs.entity))
    return scores


def decisions_to_lines(decisions: list[LinkDecision]) -> str:
    """Decisions as tab-separated records: sentence, token span, IRI or NIL,
    total score (empty when no candidate was scored)."""
    lines = []
    for d in decisions:
        span = f"{d.mention.span[0]}-{d.mention.span[1]}"
        total = f"{d.score.total:.4f}" if d.score is not None else ""
        lines.append(f"{d.mention.sentence_id}\t{span}\t{d.result}\t{total}")
    return "\n".join(lines) + ("\n" if lines else "")


def link_document(mentions: list[EntityMention], snapshot: Snapshot,
                  weights: Weights | None = None,
                  tau: float = DEFAULT_TAU,
                  doc_context: Iterable[str] | None = None) -> list[LinkDecision]:
    """One decision per mention: the top candidate when its total reaches the
    threshold, NIL otherwise.  Candidate pools are computed for all mentions
    up front, so processing order can never change an outcome."""
    weights = weights or Weights(*DEFAULT_WEIGHTS)
    weights.check()
    if doc_context is None:
        doc_context = [w for m in mentions for w in _lemmas(m.surface)]
    else:
        doc_context = list(doc_context)

    pools: list[list[KbEntity]] = [generate_candidates(m, snapshot) for m in mentions]
    decisions: list[LinkDecision] = []
    for i, mention in enumerate(mentions):
        cohorts: set[str] = set()
        for j, pool in enumerate(pools):
            if j != i:
                cohorts.update(e.iri for e in pool)
        ranked = score_candidates(mention, doc_context, pools[i], cohorts,
                                  weights, snapshot)
        if ranked and ranked[0].total >= tau:
            decisions.append(LinkDecision(mention, ranked[0].entity, ranked[0]))
        else:
            decisions.append(LinkDecision(mention, NIL, ranked[0] if ranked else None))
    return decisions
