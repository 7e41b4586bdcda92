"""Gazetteer-driven entity recognition with context-cue disambiguation.

Matching is token-boundary longest-match over lemma-or-form sequences,
case-insensitive and diacritic-preserving.  When one surface carries several
gazetteer types, left/right/internal cue lemmas adjudicate; remaining ties
fall to a fixed most-specific-commercial-type order.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .corpus import Document, Sentence
from .vocab import EX, FOAF, GR, PV

# Entity types and the vocabulary class each one asserts.
TYPE_CLASS = {
    "Group": GR + "BusinessEntity",
    "Division": PV + "Division",
    "Brand": GR + "Brand",
    "Range": PV + "ProductOrServiceRange",
    "Product": GR + "ProductOrService",
    "Person": FOAF + "Person",
    "Component": PV + "Component",
}

# Tie-break order: most specific commercial type wins.
TYPE_PRIORITY = ["Product", "Range", "Brand", "Division", "Group", "Component", "Person"]

# French display names as they appear in the validation/browsing UI.
TYPE_LABEL_FR = {
    "Group": "Groupe",
    "Division": "Division",
    "Brand": "Marque",
    "Range": "Gamme",
    "Product": "Produit",
    "Person": "Personne",
    "Component": "Composant",
}

# Published highlight colors (the client must not hard-code its own).
TYPE_COLOR = {
    "Group": "brown",
    "Division": "blue",
    "Brand": "red",
    "Range": "purple",
    "Product": "green",
    "Component": "teal",
    "Person": "orange",
}

# How far (in tokens) left/right context cues may sit from the span.
CONTEXT_WINDOW = 2


class GazetteerFormatError(ValueError):
    pass


@dataclass(frozen=True)
class GazetteerEntry:
    surface: str
    entity_type: str
    canonical_iri: str | None = None

    def __post_init__(self):
        if not self.surface.strip():
            raise GazetteerFormatError("empty gazetteer surface")
        if self.entity_type not in TYPE_CLASS:
            raise GazetteerFormatError(f"unknown entity type {self.entity_type!r}")


@dataclass(frozen=True)
class ContextRule:
    id: str
    side: str             # "left" | "right" | "internal"
    cue_lemmas: frozenset[str]
    assigns_type: str
    priority: int = 0

    def __post_init__(self):
        if self.side not in ("left", "right", "internal"):
            raise GazetteerFormatError(f"bad context side {self.side!r}")
        if not self.cue_lemmas:
            raise GazetteerFormatError(f"rule {self.id}: empty cue set")


@dataclass(frozen=True)
class EntityMention:
    sentence_id: str
    span: tuple[int, int]  # inclusive 1-based token range
    surface: str
    entity_type: str
    linked_iri: str | None = None

    def with_link(self, iri: str | None) -> "EntityMention":
        return EntityMention(self.sentence_id, self.span, self.surface,
                             self.entity_type, iri)


def load_gazetteer(text: str) -> list[GazetteerEntry]:
    """One entry per line: surface <TAB> type <TAB> optional IRI."""
    entries = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) < 2:
            raise GazetteerFormatError(f"line {line_no}: need surface and type")
        iri = cols[2] if len(cols) > 2 and cols[2] else None
        entries.append(GazetteerEntry(cols[0], cols[1], iri))
    return entries


def load_context_rules(text: str) -> list[ContextRule]:
    """One rule per line: id <TAB> side <TAB> cue lemmas (comma-sep) <TAB> type <TAB> priority."""
    rules = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) != 5:
            raise GazetteerFormatError(f"line {line_no}: need 5 fields")
        lemmas = frozenset(l.strip().lower() for l in cols[2].split(",") if l.strip())
        rules.append(ContextRule(cols[0], cols[1], lemmas, cols[3], int(cols[4])))
    return rules


def _fold(s: str) -> str:
    return s.casefold()


def _surface_tokens(surface: str) -> tuple[str, ...]:
    return tuple(_fold(w) for w in surface.split())


def _token_matches(token, want: str) -> bool:
    return _fold(token.form) == want or _fold(token.lemma) == want


class _GazIndex:
    """Gazetteer grouped by first token for the scan loop."""

    def __init__(self, entries: list[GazetteerEntry]):
        self.by_first: dict[str, list[tuple[tuple[str, ...], GazetteerEntry]]] = {}
        self.max_len = 1
        for e in entries:
            words = _surface_tokens(e.surface)
            if not words:
                continue
            self.by_first.setdefault(words[0], []).append((words, e))
            self.max_len = max(self.max_len, len(words))


def recognize(doc: Document, gazetteer: list[GazetteerEntry],
              rules: list[ContextRule] | None = None) -> list[EntityMention]:
    """Longest-match mentions for a whole document, non-overlapping, sorted
    by (sentence, span start)."""
    rules = rules or []
    index = _GazIndex(gazetteer)
    mentions: list[EntityMention] = []
    for sent in doc.sentences:
        mentions.extend(_recognize_sentence(sent, index, rules))
    return mentions


def _recognize_sentence(sent: Sentence, index: _GazIndex,
                        rules: list[ContextRule]) -> list[EntityMention]:
    out: list[EntityMention] = []
    n = len(sent.tokens)
    i = 1
    while i <= n:
        best_len = 0
        best_entries: list[GazetteerEntry] = []
        tok = sent.token(i)
        for key in {_fold(tok.form), _fold(tok.lemma)}:
            for words, entry in index.by_first.get(key, []):
                length = len(words)
                if i + length - 1 > n or length < best_len:
                    continue
                if all(_token_matches(sent.token(i + k), words[k]) for k in range(length)):
                    if length > best_len:
                        best_len = length
                        best_entries = [entry]
                    else:
                        best_entries.append(entry)
        if best_len == 0:
            i += 1
            continue
        span = (i, i + best_len - 1)
        entry = _adjudicate(sent, span, best_entries, rules)
        surface = " ".join(sent.token(k).form for k in range(span[0], span[1] + 1))
        out.append(EntityMention(sent.id, span, surface, entry.entity_type,
                                 entry.canonical_iri))
        i = span[1] + 1
    return out


def _adjudicate(sent: Sentence, span: tuple[int, int],
                entries: list[GazetteerEntry],
                rules: list[ContextRule]) -> GazetteerEntry:
    """Pick one entry for an ambiguous span: context rules first (priority
    order), then the fixed type order."""
    candidate_types = {e.entity_type for e in entries}
    if len(candidate_types) > 1 and rules:
        for rule in sorted(rules, key=lambda r: -r.priority):
            if rule.assigns_type not in candidate_types:
                continue
            if _cue_present(sent, span, rule):
                winners = [e for e in entries if e.entity_type == rule.assigns_type]
                return _by_type_order(winners)
    return _by_type_order(entries)


def _by_type_order(entries: list[GazetteerEntry]) -> GazetteerEntry:
    return min(entries, key=lambda e: (TYPE_PRIORITY.index(e.entity_type), e.surface))


def _cue_present(sent: Sentence, span: tuple[int, int], rule: ContextRule) -> bool:
    lo, hi = span
    if rule.side == "left":
        indices = range(max(1, lo - CONTEXT_WINDOW), lo)
    elif rule.side == "right":
        indices = range(hi + 1, min(len(sent.tokens), hi + CONTEXT_WINDOW) + 1)
    else:
        indices = range(lo, hi + 1)
    for idx in indices:
        tok = sent.token(idx)
        if _fold(tok.lemma) in rule.cue_lemmas or _fold(tok.form) in rule.cue_lemmas:
            return True
    return False


def summarize(mentions: list[EntityMention]) -> dict[str, list[tuple[str, int]]]:
    """Per-type (surface, count) rows, count desc then surface asc; surfaces
    aggregate case-insensitively and the first-seen casing is displayed."""
    counts: dict[str, Counter] = {t: Counter() for t in TYPE_PRIORITY}
    display: dict[str, dict[str, str]] = {t: {} for t in TYPE_PRIORITY}
    for m in mentions:
        key = _fold(m.surface)
        counts[m.entity_type][key] += 1
        display[m.entity_type].setdefault(key, m.surface)
    out: dict[str, list[tuple[str, int]]] = {}
    for t in TYPE_PRIORITY:
        rows = [(display[t][key], c) for key, c in counts[t].items()]
        rows.sort(key=lambda row: (-row[1], row[0]))
        out[t] = rows
    return out


def mentions_to_gold_lines(mentions: list[EntityMention]) -> str:
    """Mentions in the gold ENT record format (for eval reuse)."""
    lines = [f"ENT\t{m.sentence_id}\t{m.span[0]}-{m.span[1]}\t{m.entity_type}"
             for m in mentions]
    return "\n".join(lines) + ("\n" if lines else "")


def mint_iri(surface: str) -> str:
    """Local IRI for an unlinked mention: example namespace + surface with
    whitespace runs collapsed to underscores."""
    return EX + "_".join(surface.split())
