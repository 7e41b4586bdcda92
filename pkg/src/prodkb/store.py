"""Triple dataset with per-triple provenance, plus a Turtle-subset reader/writer.

Two mutable graphs (``temporary`` holds extractor output awaiting expert
review, ``validated`` holds approved assertions) and any number of read-only
named snapshot graphs.  Mutations are serialized through one lock
(single-writer); readers only ever see fully applied states.

The Turtle subset covers what the knowledge-base files need: ``@prefix``
directives, angle-bracket IRIs, prefixed names (colons allowed in the local
part), ``a``, plain / typed / language-tagged literals, integer and decimal
shorthand, ``;`` and ``,`` abbreviations, ``.`` terminators and ``#``
comments.  No blank nodes, no collections.
"""

from __future__ import annotations

import datetime as dt
import json
import threading
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable

from .vocab import PrefixTable, RDF_LANGSTRING, XSD, XSD_STRING, resolve

XSD_INTEGER = XSD + "integer"
XSD_DECIMAL = XSD + "decimal"

TEMPORARY = "temporary"
VALIDATED = "validated"

PENDING = "pending"
ACCEPTED = "accepted"
MODIFIED = "modified"
REJECTED = "rejected"

ACCEPT = "accept"
REJECT = "reject"
MODIFY = "modify"


class TurtleSyntaxError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, col {col}: {message}")
        self.line = line
        self.col = col


class ReadOnlyGraph(ValueError):
    """Write attempted on a snapshot graph."""


class NotFound(KeyError):
    pass


class AlreadyDecided(ValueError):
    pass


# ---------------------------------------------------------------------------
# Terms and triples
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Iri:
    value: str

    def __repr__(self):
        return f"Iri({self.value!r})"


@dataclass(frozen=True)
class Literal:
    lexical: str
    datatype: str = XSD_STRING
    lang: str | None = None

    def __post_init__(self):
        if self.lang is not None:
            object.__setattr__(self, "datatype", RDF_LANGSTRING)


Term = Iri | Literal


@dataclass(frozen=True)
class Triple:
    s: Iri
    p: Iri
    o: Term


def term_sort_key(t: Term):
    if isinstance(t, Iri):
        return (0, t.value, "", "")
    return (1, t.lexical, t.datatype, t.lang or "")


def triple_sort_key(t: Triple):
    return (t.s.value, t.p.value, term_sort_key(t.o))


def term_to_json(t: Term) -> dict:
    if isinstance(t, Iri):
        return {"type": "iri", "value": t.value}
    out = {"type": "literal", "lexical": t.lexical, "datatype": t.datatype}
    if t.lang:
        out["lang"] = t.lang
    return out


def term_from_json(d: dict) -> Term:
    if d["type"] == "iri":
        return Iri(d["value"])
    return Literal(d["lexical"], d.get("datatype", XSD_STRING), d.get("lang"))


def triple_to_json(t: Triple) -> dict:
    return {"s": term_to_json(t.s), "p": term_to_json(t.p), "o": term_to_json(t.o)}


def triple_from_json(d: dict) -> Triple:
    return Triple(term_from_json(d["s"]), term_from_json(d["p"]), term_from_json(d["o"]))


# ---------------------------------------------------------------------------
# Provenance
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Attestation:
    source_url: str
    date: dt.date
    extractor: str


@dataclass
class Provenance:
    """Where a triple came from and where it stands in the validation workflow.

    ``extractor`` is one of ``rule:<id>``, ``lexicon:<property>``, ``ner``,
    ``manual`` or ``import``.  ``status`` moves from pending to exactly one of
    accepted / modified / rejected; a modified entry carries the replacement.
    """

    source_url: str
    date: dt.date
    extractor: str
    status: str = PENDING
    confidence: float = 1.0
    replacement: Triple | None = None
    attestations: list[Attestation] = field(default_factory=list)

    def to_json(self) -> dict:
        out = {
            "source_url": self.source_url,
            "date": self.date.isoformat(),
            "extractor": self.extractor,
            "status": self.status,
            "confidence": self.confidence,
        }
        if self.replacement is not None:
            out["replacement"] = triple_to_json(self.replacement)
        if self.attestations:
            out["attestations"] = [
                {"source_url": a.source_url, "date": a.date.isoformat(), "extractor": a.extractor}
                for a in self.attestations
            ]
        return out

    @classmethod
    def from_json(cls, d: dict) -> "Provenance":
        return cls(
            source_url=d["source_url"],
            date=dt.date.fromisoformat(d["date"]),
            extractor=d["extractor"],
            status=d.get("status", PENDING),
            confidence=d.get("confidence", 1.0),
            replacement=triple_from_json(d["replacement"]) if "replacement" in d else None,
            attestations=[
                Attestation(a["source_url"], dt.date.fromisoformat(a["date"]), a["extractor"])
                for a in d.get("attestations", [])
            ],
        )


# ---------------------------------------------------------------------------
# Dataset
# ---------------------------------------------------------------------------

class Dataset:
    """Temporary and validated graphs plus read-only snapshots, with a journal.

    Every mutation (insert, attestation, decision) is appended to the journal
    when one is attached; replaying a journal over an empty dataset
    reconstructs both mutable graphs exactly.
    """

    def __init__(self, journal_path: str | Path | None = None):
        self.temporary: dict[Triple, Provenance] = {}
        self.validated: dict[Triple, Provenance] = {}
        self.snapshots: dict[str, dict[Triple, Provenance]] = {}
        self._lock = threading.Lock()
        self._journal_path = Path(journal_path) if journal_path else None
        self._replaying = False

    # -- journal -------------------------------------------------------------

    def _log(self, record: dict) -> None:
        if self._journal_path is None or self._replaying:
            return
        record = {"ts": dt.datetime.now(dt.timezone.utc).isoformat(), **record}
        with self._journal_path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")

    def replay(self, lines: Iterable[str]) -> None:
        """Apply journal records in order (used at open time and in tests)."""
        self._replaying = True
        try:
            for raw in lines:
                raw = raw.strip()
                if not raw:
                    continue
                rec = json.loads(raw)
                op = rec["op"]
                if op == "insert":
                    self.insert(triple_from_json(rec["triple"]),
                                Provenance.from_json(rec["prov"]), rec["graph"])
                elif op == "decide":
                    repl = triple_from_json(rec["replacement"]) if rec.get("replacement") else None
                    self.set_status(triple_from_json(rec["triple"]), rec["action"], repl)
                else:
                    raise ValueError(f"unknown journal op {op!r}")
        finally:
            self._replaying = False

    # -- graph access ----------------------------------------------------------

    def graph(self, selector: str) -> dict[Triple, Provenance]:
        if selector == TEMPORARY:
            return self.temporary
        if selector == VALIDATED:
            return self.validated
        try:
            return self.snapshots[selector]
        except KeyError:
            raise NotFound(f"unknown graph {selector!r}") from None

    def graph_names(self) -> list[str]:
        return [TEMPORARY, VALIDATED, *sorted(self.snapshots)]

    def add_snapshot(self, name: str, triples: Iterable[Triple],
                     source_url: str = "", date: dt.date | None = None) -> None:
        prov_date = date or dt.date.today()
        graph = {}
        for t in triples:
            graph.setdefault(t, Provenance(source_url, prov_date, "import", ACCEPTED))
        self.snapshots[name] = graph

    # -- mutations ---------------------------------------------------------

    def insert(self, triple: Triple, prov: Provenance, graph: str = TEMPORARY) -> bool:
        """Add a triple; False when the graph (or validated, for pending
        inserts) already holds it, in which case only an attestation is added."""
        if graph not in (TEMPORARY, VALIDATED):
            if graph in self.snapshots:
                raise ReadOnlyGraph(f"snapshot graph {graph!r} is read-only")
            raise NotFound(f"unknown graph {graph!r}")
        with self._lock:
            target = self.graph(graph)
            attestation = Attestation(prov.source_url, prov.date, prov.extractor)
            # journal the record before mutating, so replay sees the same input
            self._log({"op": "insert", "graph": graph,
                       "triple": triple_to_json(triple), "prov": prov.to_json()})
            existing = target.get(triple)
            if existing is None and graph == TEMPORARY and triple in self.validated:
                # Already expert-approved: re-extractions attest, never re-queue.
                existing = self.validated[triple]
            if existing is not None:
                existing.attestations.append(attestation)
                return False
            prov.attestations.append(attestation)
            target[triple] = prov
            if graph == VALIDATED:
                pending_twin = self.temporary.get(triple)
                if pending_twin is not None and pending_twin.status == PENDING:
                    pending_twin.status = ACCEPTED
            return True

    def set_status(self, triple: Triple, action: str,
                   replacement: Triple | None = None) -> Provenance:
        """Decide a pending temporary triple: accept, reject or modify.

        Accept moves it to validated; modify moves the replacement instead and
        marks the original; reject only marks it.  Each decision is final.
        """
        with self._lock:
            prov = self.temporary.get(triple)
            if prov is None:
                raise NotFound(f"no temporary triple {triple}")
            if prov.status != PENDING:
                raise AlreadyDecided(f"{triple} already {prov.status}")
            if action == ACCEPT:
                prov.status = ACCEPTED
                self.validated[triple] = replace(
                    prov, attestations=list(prov.attestations))
            elif action == REJECT:
                prov.status = REJECTED
            elif action == MODIFY:
                if replacement is None:
                    raise ValueError("modify decision needs a replacement triple")
                prov.status = MODIFIED
                prov.replacement = replacement
                if replacement not in self.validated:
                    self.validated[replacement] = replace(
                        prov, status=MODIFIED, replacement=None,
                        attestations=list(prov.attestations))
            else:
                raise ValueError(f"unknown decision {action!r}")
            self._log({"op": "decide", "triple": triple_to_json(triple), "action": action,
                       "replacement": triple_to_json(replacement) if replacement else None})
            return prov

    # -- pattern matching ----------------------------------------------------

    def match(self, s: Iri | None, p: Iri | None, o: Term | None,
              graphs: Iterable[str]) -> list[Triple]:
        """All triples matching the bound positions across the selected graphs,
        deduplicated and in deterministic (s, p, o) order."""
        seen: set[Triple] = set()
        for g in graphs:
            for t in self.graph(g):
                if s is not None and t.s != s:
                    continue
                if p is not None and t.p != p:
                    continue
                if o is not None and t.o != o:
                    continue
                seen.add(t)
        return sorted(seen, key=triple_sort_key)

    def union(self, graphs: Iterable[str]) -> set[Triple]:
        out: set[Triple] = set()
        for g in graphs:
            out |= set(self.graph(g))
        return out

    # -- persistence -----------------------------------------------------------

    @classmethod
    def open(cls, kb_dir: str | Path, prefixes: PrefixTable | None = None) -> "Dataset":
        """Open a knowledge-base directory.

        The journal (journal.jsonl) is authoritative when present; otherwise
        validated.ttl seeds the validated graph (and that import is journaled,
        keeping replay exact).
        """
        kb = Path(kb_dir)
        kb.mkdir(parents=True, exist_ok=True)
        journal = kb / "journal.jsonl"
        ds = cls(journal_path=journal)
        if journal.exists():
            ds.replay(journal.read_text(encoding="utf-8").splitlines())
        else:
            seed = kb / "validated.ttl"
            if seed.exists():
                table = prefixes.copy() if prefixes else PrefixTable()
                for t in parse_turtle(seed.read_text(encoding="utf-8"), table):
                    ds.insert(t, Provenance(str(seed), dt.date.today(), "import", ACCEPTED),
                              VALIDATED)
        return ds

    def export_validated(self, prefixes: PrefixTable) -> str:
        return serialize_turtle(list(self.validated), prefixes)


# ---------------------------------------------------------------------------
# Turtle subset: parser
# ---------------------------------------------------------------------------

_ESCAPES = {"\\": "\\", '"': '"', "n": "\n", "r": "\r", "t": "\t", "b": "\b", "f": "\f"}
_UNESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t"}

# Characters besides alphanumerics that may appear in the local part of a
# prefixed name (colons included; dots handled with lookahead).
_LOCAL_EXTRA = "_-:°'’%"


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1

    def error(self, msg: str):
        raise TurtleSyntaxError(msg, self.line, self.col)

    def eof(self) -> bool:
        return self.pos >= len(self.text)

    def peek(self, ahead: int = 0) -> str:
        i = self.pos + ahead
        return self.text[i] if i < len(self.text) else ""

    def advance(self) -> str:
        ch = self.text[self.pos]
        self.pos += 1
        if ch == "\n":
            self.line += 1
            self.col = 1
        else:
            self.col += 1
        return ch

    def skip_ws(self):
        while not self.eof():
            ch = self.peek()
            if ch in " \t\r\n":
                self.advance()
            elif ch == "#":
                while not self.eof() and self.peek() != "\n":
                    self.advance()
            else:
                return

    def read_iriref(self) -> str:
        self.advance()  # <
        out = []
        while True:
            if self.eof():
                self.error("unterminated IRI")
            ch = self.advance()
            if ch == ">":
                return "".join(out)
            if ch in " \t\n\r":
                self.error("whitespace inside IRI")
            out.append(ch)

    def read_string(self) -> str:
        self.advance()  # opening quote
        out = []
        while True:
            if self.eof():
                self.error("unterminated string literal")
            ch = self.advance()
            if ch == '"':
                return "".join(out)
            if ch == "\\":
                if self.eof():
                    self.error("dangling escape")
                esc = self.advance()
                if esc in _ESCAPES:
                    out.append(_ESCAPES[esc])
                elif esc == "u":
                    out.append(chr(int(self._hex(4), 16)))
                elif esc == "U":
                    out.append(chr(int(self._hex(8), 16)))
                else:
                    self.error(f"unknown escape \\{esc}")
            else:
                out.append(ch)

    def _hex(self, n: int) -> str:
        digits = []
        for _ in range(n):
            if self.eof() or self.peek() not in "0123456789abcdefABCDEF":
                self.error("bad unicode escape")
            digits.append(self.advance())
        return "".join(digits)

    def _is_local_char(self, ch: str) -> bool:
        return ch.isalnum() or ch in _LOCAL_EXTRA

    def read_pname(self) -> tuple[str, str]:
        """Read ``label:local``; colons may appear inside the local part."""
        label_chars = []
        while not self.eof() and (self.peek().isalnum() or self.peek() in "_-."):
            label_chars.append(self.advance())
        if self.eof() or self.peek() != ":":
            self.error("expected ':' in prefixed name")
        self.advance()
        local_chars = []
        while not self.eof():
            ch = self.peek()
            if self._is_local_char(ch):
                local_chars.append(self.advance())
            elif ch == "." and self._is_local_char(self.peek(1)):
                local_chars.append(self.advance())
            else:
                break
        return "".join(label_chars), "".join(local_chars)

    def read_number(self) -> Literal:
        out = []
        if self.peek() in "+-":
            out.append(self.advance())
        dots = 0
        while not self.eof() and (self.peek().isdigit() or (self.peek() == "." and self.peek(1).isdigit())):
            if self.peek() == ".":
                dots += 1
            out.append(self.advance())
        lex = "".join(out)
        if not lex or lex in "+-":
            self.error("malformed number")
        return Literal(lex, XSD_DECIMAL if dots else XSD_INTEGER)

    def read_langtag(self) -> str:
        self.advance()  # @
        out = []
        while not self.eof() and (self.peek().isalnum() or self.peek() == "-"):
            out.append(self.advance())
        if not out:
            self.error("empty language tag")
        return "".join(out)


def parse_turtle(text: str, prefixes: PrefixTable | None = None) -> list[Triple]:
    """Parse a Turtle-subset document into triples, in document order.

    ``@prefix`` directives extend a local copy of the supplied table; the
    caller's table is never mutated.
    """
    table = prefixes.copy() if prefixes is not None else PrefixTable()
    sc = _Scanner(text)
    triples: list[Triple] = []

    def resolve_local(label: str, local: str) -> str:
        if label not in table:
            sc.error(f"unknown prefix {label!r}")
        return table.namespace(label) + local

    def read_term(position: str) -> Term:
        sc.skip_ws()
        if sc.eof():
            sc.error(f"expected {position}, found end of input")
        ch = sc.peek()
        if ch == "<":
            return Iri(sc.read_iriref())
        if ch == '"':
            lexical = sc.read_string()
            if sc.peek() == "@":
                return Literal(lexical, lang=sc.read_langtag())
            if sc.peek() == "^" and sc.peek(1) == "^":
                sc.advance(); sc.advance()
                sc.skip_ws()
                dt_term = read_term("datatype IRI")
                if not isinstance(dt_term, Iri):
                    sc.error("datatype must be an IRI")
                return Literal(lexical, dt_term.value)
            return Literal(lexical)
        if ch.isdigit() or (ch in "+-" and sc.peek(1).isdigit()) or (ch == "." and sc.peek(1).isdigit()):
            if position == "predicate":
                sc.error("literal in predicate position")
            return sc.read_number()
        if ch == "a" and not (sc._is_local_char(sc.peek(1)) or sc.peek(1) in ".:"):
            # bare 'a' keyword (only legal as predicate)
            if position != "predicate":
                sc.error("'a' is only valid as a predicate")
            sc.advance()
            return Iri(resolve("rdf:type", table))
        if ch.isalnum() or ch in "_:":
            label, local = sc.read_pname()
            return Iri(resolve_local(label, local))
        sc.error(f"unexpected character {ch!r}")

    while True:
        sc.skip_ws()
        if sc.eof():
            break
        if sc.peek() == "@":
            # @prefix label: <ns> .
            word = []
            sc.advance()
            while not sc.eof() and sc.peek().isalpha():
                word.append(sc.advance())
            directive = "".join(word)
            if directive != "prefix":
                sc.error(f"unsupported directive @{directive}")
            sc.skip_ws()
            label_chars = []
            while not sc.eof() and (sc.peek().isalnum() or sc.peek() in "_-."):
                label_chars.append(sc.advance())
            if sc.eof() or sc.peek() != ":":
                sc.error("expected ':' in @prefix")
            sc.advance()
            sc.skip_ws()
            if sc.peek() != "<":
                sc.error("expected IRI in @prefix")
            ns = sc.read_iriref()
            table.bind("".join(label_chars), ns)
            sc.skip_ws()
            if sc.peek() == ".":
                sc.advance()
            continue

        subject = read_term("subject")
        if not isinstance(subject, Iri):
            sc.error("subject must be an IRI")
        while True:  # predicate-object list
            predicate = read_term("predicate")
            if not isinstance(predicate, Iri):
                sc.error("predicate must be an IRI")
            while True:  # object list
                obj = read_term("object")
                triples.append(Triple(subject, predicate, obj))
                sc.skip_ws()
                if sc.peek() == ",":
                    sc.advance()
                    continue
                break
            sc.skip_ws()
            if sc.peek() == ";":
                sc.advance()
                sc.skip_ws()
                # tolerate trailing ';' before '.'
                if sc.peek() == ".":
                    break
                continue
            break
        sc.skip_ws()
        if sc.peek() == ".":
            sc.advance()
        # statement ends here; a missing '.' before the next subject or EOF
        # is tolerated (printed listings frequently drop them)
    return triples


# ---------------------------------------------------------------------------
# Turtle subset: serializer
# ---------------------------------------------------------------------------

def _escape_literal(s: str) -> str:
    return "".join(_UNESCAPES.get(ch, ch) for ch in s)


def _local_ok(local: str) -> bool:
    if not local or local.endswith("."):
        return False
    for i, ch in enumerate(local):
        if ch.isalnum() or ch in "_-:°'’":
            continue
        if ch == "." and 0 < i < len(local) - 1:
            continue
        return False
    return True


def _render_iri(iri: str, prefixes: PrefixTable) -> str:
    shrunk = prefixes.shrink(iri)
    if shrunk is not None:
        label, _, local = shrunk.partition(":")
        if _local_ok(local):
            return shrunk
    return f"<{iri}>"


def _render_term(t: Term, prefixes: PrefixTable) -> str:
    if isinstance(t, Iri):
        return _render_iri(t.value, prefixes)
    quoted = f'"{_escape_literal(t.lexical)}"'
    if t.lang:
        return f"{quoted}@{t.lang}"
    if t.datatype != XSD_STRING:
        return f"{quoted}^^{_render_iri(t.datatype, prefixes)}"
    return quoted


def serialize_turtle(triples: Iterable[Triple], prefixes: PrefixTable | None = None) -> str:
    """Deterministic Turtle output: prefix block, then subjects in IRI order,
    predicates joined with ';' and objects with ','."""
    table = prefixes.copy() if prefixes is not None else PrefixTable()
    lines = [f"@prefix {label}: <{ns}> ." for label, ns in table.items()]
    by_subject: dict[str, dict[str, list[Term]]] = {}
    iris: dict[str, Iri] = {}
    for t in triples:
        by_subject.setdefault(t.s.value, {}).setdefault(t.p.value, []).append(t.o)
        iris[t.s.value] = t.s
    if by_subject:
        lines.append("")
    for s_value in sorted(by_subject):
        preds = by_subject[s_value]
        head = _render_iri(s_value, table)
        parts = []
        for p_value in sorted(preds):
            objects = sorted(set(preds[p_value]), key=term_sort_key)
            rendered = ", ".join(_render_term(o, table) for o in objects)
            p_text = "a" if p_value == resolve("rdf:type", table) else _render_iri(p_value, table)
            parts.append(f"{p_text} {rendered}")
        sep = " ;\n" + " " * 4
        lines.append(f"{head} {sep.join(parts)} .")
    return "\n".join(lines) + "\n"
