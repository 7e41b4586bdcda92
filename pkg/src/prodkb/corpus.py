"""Document ingestion: markup stripping, CoNLL-U parsing, gold annotations.

The pipeline consumes pre-parsed text; this module never runs a tagger or
parser itself.  Dependency labels are opaque strings so rule packs can target
whatever label set their parses use.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field
from html.parser import HTMLParser

from .vocab import VocabRegistry


class ConlluParseError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class NonTree(ValueError):
    def __init__(self, sentence_id: str, message: str):
        super().__init__(f"sentence {sentence_id}: {message}")
        self.sentence_id = sentence_id


class GoldFormatError(ValueError):
    pass


class SpanOutOfBounds(GoldFormatError):
    pass


class UnknownProperty(GoldFormatError):
    pass


# ---------------------------------------------------------------------------
# Markup stripping
# ---------------------------------------------------------------------------

_BLOCK_TAGS = {
    "p", "div", "li", "ul", "ol", "h1", "h2", "h3", "h4", "h5", "h6",
    "table", "tr", "th", "td", "section", "article", "header", "footer",
    "blockquote", "pre", "figcaption", "nav", "aside", "form",
}
_DROP_TAGS = {"script", "style", "noscript", "template"}


class _TextExtractor(HTMLParser):
    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.chunks: list[str] = []
        self._drop_depth = 0

    def handle_starttag(self, tag, attrs):
        if tag in _DROP_TAGS:
            self._drop_depth += 1
        elif tag == "br":
            self._newline()

    def handle_startendtag(self, tag, attrs):
        if tag == "br":
            self._newline()

    def handle_endtag(self, tag):
        if tag in _DROP_TAGS:
            self._drop_depth = max(0, self._drop_depth - 1)
        elif tag in _BLOCK_TAGS:
            self._newline()

    def handle_data(self, data):
        if self._drop_depth == 0 and data:
            self.chunks.append(data)

    def _newline(self):
        # one newline per block boundary, never stacked
        text = "".join(self.chunks)
        if text and not text.endswith("\n"):
            self.chunks.append("\n")

    def text(self) -> str:
        return "".join(self.chunks)


def strip_markup(html: str) -> str:
    """Drop tags (script/style content entirely); block boundaries become
    newlines.  Malformed markup is handled by the forgiving stdlib scanner."""
    extractor = _TextExtractor()
    extractor.feed(html)
    extractor.close()
    return extractor.text()


# ---------------------------------------------------------------------------
# CoNLL-U
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Token:
    index: int          # 1-based position in the sentence
    form: str
    lemma: str
    upos: str
    head: int           # 0 = sentence root
    deprel: str
    xpos: str = "_"
    feats: str = "_"
    misc: str = "_"


@dataclass(frozen=True)
class Sentence:
    id: str
    text: str
    tokens: tuple[Token, ...]

    def token(self, index: int) -> Token:
        return self.tokens[index - 1]

    @property
    def root(self) -> Token:
        for t in self.tokens:
            if t.head == 0:
                return t
        raise NonTree(self.id, "no root token")

    def dependents(self, head_index: int) -> list[Token]:
        return [t for t in self.tokens if t.head == head_index]


@dataclass
class Document:
    id: str
    source_url: str = ""
    date: dt.date = dt.date(1970, 1, 1)
    sentences: list[Sentence] = field(default_factory=list)

    def sentence(self, sentence_id: str) -> Sentence:
        for s in self.sentences:
            if s.id == sentence_id:
                return s
        raise KeyError(sentence_id)

    @property
    def text(self) -> str:
        return "\n".join(s.text for s in self.sentences)


def _check_tree(sentence_id: str, tokens: list[Token]) -> None:
    n = len(tokens)
    roots = [t for t in tokens if t.head == 0]
    if len(roots) != 1:
        raise NonTree(sentence_id, f"{len(roots)} root tokens")
    for t in tokens:
        if not (0 <= t.head <= n):
            raise NonTree(sentence_id, f"token {t.index} head {t.head} out of range")
        if t.head == t.index:
            raise NonTree(sentence_id, f"token {t.index} heads itself")
    # every token must reach the root without cycles
    for t in tokens:
        seen = set()
        cur = t.index
        while cur != 0:
            if cur in seen:
                raise NonTree(sentence_id, f"cycle through token {cur}")
            seen.add(cur)
            cur = tokens[cur - 1].head


def load_conllu(text: str, doc_id: str = "doc", source_url: str = "",
                date: dt.date | None = None) -> Document:
    """Parse 10-column CoNLL-U into a Document with tree-validated sentences.

    ``# sent_id`` and ``# text`` comments are honored; multiword-token ranges
    and empty nodes are skipped; extra columns are preserved but unused.
    """
    doc = Document(doc_id, source_url, date or dt.date(1970, 1, 1))
    tokens: list[Token] = []
    sent_id: str | None = None
    sent_text: str | None = None
    counter = 0

    def flush(line_no: int):
        nonlocal tokens, sent_id, sent_text, counter
        if not tokens:
            sent_id = None
            sent_text = None
            return
        counter += 1
        sid = sent_id or f"s{counter}"
        expected = list(range(1, len(tokens) + 1))
        if [t.index for t in tokens] != expected:
            raise ConlluParseError(f"token ids not consecutive in sentence {sid}", line_no)
        _check_tree(sid, tokens)
        text_line = sent_text if sent_text is not None else " ".join(t.form for t in tokens)
        doc.sentences.append(Sentence(sid, text_line, tuple(tokens)))
        tokens = []
        sent_id = None
        sent_text = None

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\n")
        if not line.strip():
            flush(line_no)
            continue
        if line.startswith("#"):
            comment = line[1:].strip()
            if comment.startswith("sent_id"):
                sent_id = comment.split("=", 1)[1].strip() if "=" in comment else sent_id
            elif comment.startswith("text"):
                sent_text = comment.split("=", 1)[1].strip() if "=" in comment else sent_text
            continue
        cols = line.split("\t")
        if len(cols) != 10:
            raise ConlluParseError(f"expected 10 columns, found {len(cols)}", line_no)
        idx = cols[0]
        if "-" in idx or "." in idx:
            continue  # multiword range / empty node
        try:
            index = int(idx)
            head = int(cols[6])
        except ValueError:
            raise ConlluParseError(f"non-integer ID/HEAD: {idx!r}/{cols[6]!r}", line_no) from None
        if not cols[7]:
            raise ConlluParseError("empty DEPREL", line_no)
        tokens.append(Token(index, cols[1], cols[2], cols[3], head, cols[7],
                            xpos=cols[4], feats=cols[5], misc=cols[9]))
    flush(len(text.splitlines()) + 1)
    seen_ids = [s.id for s in doc.sentences]
    if len(set(seen_ids)) != len(seen_ids):
        raise ConlluParseError("duplicate sentence ids", 0)
    return doc


# ---------------------------------------------------------------------------
# Gold annotations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GoldEntity:
    sentence_id: str
    span: tuple[int, int]  # inclusive 1-based token range
    entity_type: str


@dataclass(frozen=True)
class GoldRelation:
    property_iri: str
    subject_span: tuple[int, int]
    object_span: tuple[int, int]
    sentence_id: str


@dataclass
class GoldAnnotation:
    entities: list[GoldEntity] = field(default_factory=list)
    relations: list[GoldRelation] = field(default_factory=list)

    def relation_counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for r in self.relations:
            out[r.property_iri] = out.get(r.property_iri, 0) + 1
        return out


def _parse_span(text: str) -> tuple[int, int]:
    start, sep, end = text.partition("-")
    if not sep:
        raise GoldFormatError(f"bad span {text!r}")
    lo, hi = int(start), int(end)
    if lo < 1 or hi < lo:
        raise GoldFormatError(f"bad span {text!r}")
    return lo, hi


def load_gold(text: str, doc: Document | None = None,
              registry: VocabRegistry | None = None) -> GoldAnnotation:
    """Parse gold annotation lines.

    Format (tab-separated): ``ENT sentId start-end Type`` and
    ``REL sentId subjStart-subjEnd objStart-objEnd property-qname``.
    Span bounds are validated against ``doc`` and properties against
    ``registry`` when given.
    """
    gold = GoldAnnotation()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        cols = line.split("\t")
        kind = cols[0]
        if kind == "ENT":
            if len(cols) != 4:
                raise GoldFormatError(f"line {line_no}: ENT needs 4 fields")
            gold.entities.append(GoldEntity(cols[1], _parse_span(cols[2]), cols[3]))
        elif kind == "REL":
            if len(cols) != 5:
                raise GoldFormatError(f"line {line_no}: REL needs 5 fields")
            prop = cols[4]
            if registry is not None:
                if ":" in prop and not prop.startswith("http"):
                    prop = registry.resolve(prop)
                norm = registry.normalize_property(prop)
                if not norm.known:
                    raise UnknownProperty(f"line {line_no}: {cols[4]}")
                prop = norm.iri
            gold.relations.append(
                GoldRelation(prop, _parse_span(cols[2]), _parse_span(cols[3]), cols[1]))
        else:
            raise GoldFormatError(f"line {line_no}: unknown record kind {kind!r}")
    if doc is not None:
        _validate_spans(gold, doc)
    return gold


def _validate_spans(gold: GoldAnnotation, doc: Document) -> None:
    def check(sentence_id: str, span: tuple[int, int]):
        try:
            sent = doc.sentence(sentence_id)
        except KeyError:
            raise SpanOutOfBounds(f"unknown sentence {sentence_id}") from None
        if span[1] > len(sent.tokens):
            raise SpanOutOfBounds(f"{sentence_id}: span {span} beyond {len(sent.tokens)} tokens")

    for e in gold.entities:
        check(e.sentence_id, e.span)
    for r in gold.relations:
        check(r.sentence_id, r.subject_span)
        check(r.sentence_id, r.object_span)


def serialize_gold(gold: GoldAnnotation, prefixes=None) -> str:
    """Inverse of load_gold (round-trip safe)."""
    lines = []
    for e in gold.entities:
        lines.append(f"ENT\t{e.sentence_id}\t{e.span[0]}-{e.span[1]}\t{e.entity_type}")
    for r in gold.relations:
        prop = r.property_iri
        if prefixes is not None:
            shrunk = prefixes.shrink(prop)
            if shrunk:
                prop = shrunk
        lines.append(f"REL\t{r.sentence_id}\t{r.subject_span[0]}-{r.subject_span[1]}"
                     f"\t{r.object_span[0]}-{r.object_span[1]}\t{prop}")
    return "\n".join(lines) + ("\n" if lines else "")
