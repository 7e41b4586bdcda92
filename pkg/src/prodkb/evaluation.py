"""Precision/recall scoring of extracted relations against gold annotations.

Instances are compared exactly on (property, subject, object, sentence) after
normalization: endpoints may be surfaces or IRIs (IRIs reduce to their local
name, case is folded, spaces and underscores unify).  No partial credit.
Undefined metrics (no predictions, or empty gold) render as "—" rather than
0, so "nothing predicted" never reads as "all wrong".
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .corpus import Document, GoldAnnotation
from .relex import CandidateTriple
from .vocab import VocabRegistry, local_name

# Row order of the report grid.
PROPERTY_ORDER = ["pv:hasComponent", "pv:hasFragranceCreator", "pv:hasRepresentative"]

# Shapes of the two reference corpora from the original evaluation campaign
# (proprietary sources, not redistributable, so not shipped); kept as
# documentation constants for report context only.
REFERENCE_CORPORA = {
    "web": {"sentences": 119, "pv:hasFragranceCreator": 69,
            "pv:hasComponent": 62, "pv:hasRepresentative": 81},
    "press": {"sentences": 392, "pv:hasComponent": 79,
              "pv:hasFragranceCreator": 38, "pv:hasRepresentative": 44},
}
METHOD_ORDER = ["syntactic", "lexicoSyntactic", "lexicon"]
METHOD_LABEL_FR = {
    "syntactic": "Règles syntaxiques",
    "lexicoSyntactic": "Règles lexico-syntaxiques",
    "lexicon": "Définition du lexique",
}
UNDEFINED = "—"


@dataclass(frozen=True)
class RelationInstance:
    """One relation assertion anchored to its sentence, in normalized form."""
    property_key: str
    subject_key: str
    object_key: str
    sentence_id: str


def normalize_endpoint(value: str) -> str:
    """Surface or IRI -> comparison key."""
    if value.startswith("http://") or value.startswith("https://"):
        value = local_name(value)
    return value.casefold().replace(" ", "_")


def normalize_property(value: str, registry: VocabRegistry | None = None) -> str:
    if registry is not None:
        if ":" in value and not value.startswith("http"):
            value = registry.resolve(value)
        value = registry.normalize_property(value).iri
    name = local_name(value)
    if ":" in name and not value.startswith("http"):
        name = name.split(":", 1)[1]  # bare qname without a registry
    return name.casefold()


def instance(property_iri: str, subject: str, obj: str, sentence_id: str,
             registry: VocabRegistry | None = None) -> RelationInstance:
    return RelationInstance(
        normalize_property(property_iri, registry),
        normalize_endpoint(subject),
        normalize_endpoint(obj),
        sentence_id,
    )


def gold_instances(gold: GoldAnnotation, doc: Document,
                   registry: VocabRegistry | None = None) -> set[RelationInstance]:
    """Gold relations as instances; spans turn into their surface text."""
    out = set()
    for r in gold.relations:
        sent = doc.sentence(r.sentence_id)
        subject = " ".join(sent.token(i).form for i in range(r.subject_span[0], r.subject_span[1] + 1))
        obj = " ".join(sent.token(i).form for i in range(r.object_span[0], r.object_span[1] + 1))
        out.add(instance(r.property_iri, subject, obj, r.sentence_id, registry))
    return out


def candidate_instances(candidates: Iterable[CandidateTriple],
                        registry: VocabRegistry | None = None) -> set[RelationInstance]:
    """Extractor candidates as instances (one per attested sentence)."""
    out = set()
    for c in candidates:
        for ev in c.attestations:
            out.add(instance(c.triple.p.value, c.triple.s.value,
                             _object_key(c), ev.sentence_id, registry))
    return out


def _object_key(c: CandidateTriple) -> str:
    o = c.triple.o
    return o.value if hasattr(o, "value") else o.lexical  # type: ignore[union-attr]


@dataclass(frozen=True)
class ScoreResult:
    tp: int
    fp: int
    fn: int

    @property
    def precision(self) -> float | None:
        return self.tp / (self.tp + self.fp) if (self.tp + self.fp) else None

    @property
    def recall(self) -> float | None:
        return self.tp / (self.tp + self.fn) if (self.tp + self.fn) else None

    @property
    def f1(self) -> float | None:
        p, r = self.precision, self.recall
        if p is None or r is None:
            return None
        if p + r == 0:
            return 0.0
        return 2 * p * r / (p + r)


def score(gold: set[RelationInstance], predicted: set[RelationInstance]) -> ScoreResult:
    """Exact-match set scoring: tp = |gold ∩ predicted|."""
    tp = len(gold & predicted)
    return ScoreResult(tp=tp, fp=len(predicted) - tp, fn=len(gold) - tp)


# ---------------------------------------------------------------------------
# Report
# ---------------------------------------------------------------------------

@dataclass
class ReportRow:
    property_name: str  # qname, e.g. pv:hasComponent
    method: str         # syntactic | lexicoSyntactic | lexicon
    recall: float | None
    precision: float | None
    f1: float | None = None
    tp: int | None = None
    fp: int | None = None
    fn: int | None = None


@dataclass
class EvalReport:
    rows: list[ReportRow]

    @classmethod
    def from_runs(cls, gold: set[RelationInstance],
                  runs: list[tuple[str, set[RelationInstance]]],
                  properties: list[str] | None = None) -> "EvalReport":
        """Score each (method, predicted-set) run per property, rows ordered
        property-within-method as in the report grid."""
        props = properties or PROPERTY_ORDER
        rows = []
        for method, predicted in runs:
            for prop in props:
                key = normalize_property(prop)
                g = {i for i in gold if i.property_key == key}
                p = {i for i in predicted if i.property_key == key}
                result = score(g, p)
                rows.append(ReportRow(prop, method, result.recall, result.precision,
                                      result.f1, result.tp, result.fp, result.fn))
        return cls(rows)

    @classmethod
    def from_metrics(cls, cells: list[tuple[str, str, float, float]]) -> "EvalReport":
        """Build a report directly from (property, method, recall, precision)
        values, e.g. previously published aggregates."""
        return cls([ReportRow(prop, method, recall, precision)
                    for prop, method, recall, precision in cells])

    def render_text(self) -> str:
        """Aligned plain-text grid with French column headers."""
        header = ("Propriétés", "Méthode d'extraction", "Rappel", "Précision")
        body = [
            (r.property_name, METHOD_LABEL_FR.get(r.method, r.method),
             _fmt(r.recall), _fmt(r.precision))
            for r in self.rows
        ]
        widths = [max(len(row[i]) for row in [header, *body]) for i in range(4)]
        lines = ["  ".join(h.ljust(widths[i]) for i, h in enumerate(header))]
        lines.append("  ".join("-" * w for w in widths))
        for row in body:
            lines.append("  ".join(c.ljust(widths[i]) for i, c in enumerate(row)))
        return "\n".join(lines) + "\n"

    def render_tsv(self) -> str:
        lines = ["Propriétés\tMéthode\tRappel\tPrécision"]
        for r in self.rows:
            lines.append("\t".join([
                r.property_name, METHOD_LABEL_FR.get(r.method, r.method),
                _fmt(r.recall), _fmt(r.precision),
            ]))
        return "\n".join(lines) + "\n"

    def cell(self, property_name: str, method: str) -> ReportRow:
        for r in self.rows:
            if r.property_name == property_name and r.method == method:
                return r
        raise KeyError((property_name, method))


def _fmt(v: float | None) -> str:
    return UNDEFINED if v is None else f"{v:.2f}"
