"""SPARQL-subset parser and evaluator for the competency questions.

Supported: ``PREFIX`` declarations, ``SELECT [DISTINCT] ?vars WHERE { ... }``
with triple patterns (variables allowed in any position, ``a`` for rdf:type,
``;``/``,`` abbreviations, optional dots as in printed listings) and
``FILTER NOT EXISTS { ... }`` blocks.  Everything else (OPTIONAL, UNION,
ORDER BY, aggregates, property paths, ...) raises UnsupportedFeature.

Evaluation applies RDFS entailment at the level the vocabulary needs:
rdf:type matches through the subclass closure, predicates match through the
subproperty closure, and data predicates are alias-normalized on the fly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .store import (Dataset, Iri, Literal, Term, Triple, _Scanner, term_sort_key)
from .vocab import PrefixTable, RDF_TYPE, VocabRegistry, resolve


class QuerySyntaxError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, col {col}: {message}")
        self.line = line
        self.col = col


class UnsupportedFeature(ValueError):
    pass


_UNSUPPORTED = {
    "OPTIONAL", "UNION", "MINUS", "ORDER", "LIMIT", "OFFSET", "GROUP",
    "HAVING", "BIND", "VALUES", "SERVICE", "GRAPH", "ASK", "CONSTRUCT",
    "DESCRIBE", "INSERT", "DELETE", "REGEX", "EXISTS",
}


@dataclass(frozen=True)
class Variable:
    name: str


PatternTerm = Term | Variable


@dataclass(frozen=True)
class TriplePattern:
    s: PatternTerm
    p: PatternTerm
    o: PatternTerm

    def variables(self) -> set[str]:
        return {t.name for t in (self.s, self.p, self.o) if isinstance(t, Variable)}


@dataclass(frozen=True)
class NotExistsBlock:
    patterns: tuple[TriplePattern, ...]

    def variables(self) -> set[str]:
        out: set[str] = set()
        for p in self.patterns:
            out |= p.variables()
        return out


@dataclass
class SelectQuery:
    prefixes: PrefixTable
    distinct: bool
    projection: list[str]
    body: list[TriplePattern | NotExistsBlock] = field(default_factory=list)

    def positive_patterns(self) -> list[TriplePattern]:
        return [e for e in self.body if isinstance(e, TriplePattern)]

    def not_exists_blocks(self) -> list[NotExistsBlock]:
        return [e for e in self.body if isinstance(e, NotExistsBlock)]


Binding = dict[str, Term]


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

class _QueryParser:
    def __init__(self, text: str, table: PrefixTable):
        self.sc = _Scanner(text)
        self.table = table

    def error(self, msg: str):
        raise QuerySyntaxError(msg, self.sc.line, self.sc.col)

    def skip(self):
        self.sc.skip_ws()

    def at_word(self) -> str:
        """Peek the next bare word without consuming it (empty if none)."""
        save = (self.sc.pos, self.sc.line, self.sc.col)
        word = self.read_word()
        self.sc.pos, self.sc.line, self.sc.col = save
        return word

    def read_word(self) -> str:
        chars = []
        while not self.sc.eof() and (self.sc.peek().isalpha() or self.sc.peek() == "_"):
            chars.append(self.sc.advance())
        return "".join(chars)

    def expect_word(self, expected: str):
        self.skip()
        word = self.read_word()
        if word.upper() != expected:
            self.error(f"expected {expected}, found {word or self.sc.peek()!r}")

    def expect_char(self, ch: str):
        self.skip()
        if self.sc.eof() or self.sc.peek() != ch:
            found = "end of input" if self.sc.eof() else repr(self.sc.peek())
            self.error(f"expected {ch!r}, found {found}")
        self.sc.advance()

    def check_unsupported(self, word: str):
        if word.upper() in _UNSUPPORTED:
            raise UnsupportedFeature(word.upper())

    def read_variable(self) -> Variable:
        self.sc.advance()  # ?
        chars = []
        while not self.sc.eof() and (self.sc.peek().isalnum() or self.sc.peek() == "_"):
            chars.append(self.sc.advance())
        if not chars:
            self.error("empty variable name")
        return Variable("".join(chars))

    def read_pattern_term(self, position: str) -> PatternTerm:
        self.skip()
        if self.sc.eof():
            self.error(f"expected {position}")
        ch = self.sc.peek()
        if ch == "?":
            return self.read_variable()
        if ch == "<":
            return Iri(self.sc.read_iriref())
        if ch == '"':
            lexical = self.sc.read_string()
            if self.sc.peek() == "@":
                return Literal(lexical, lang=self.sc.read_langtag())
            if self.sc.peek() == "^" and self.sc.peek(1) == "^":
                self.sc.advance(); self.sc.advance()
                self.skip()
                if self.sc.peek() == "<":
                    return Literal(lexical, self.sc.read_iriref())
                label, local = self.sc.read_pname()
                return Literal(lexical, self._expand(label, local))
            return Literal(lexical)
        if ch.isdigit() or (ch in "+-" and self.sc.peek(1).isdigit()):
            return self.sc.read_number()
        if ch == "a" and not (self.sc._is_local_char(self.sc.peek(1)) or self.sc.peek(1) in ".:"):
            self.sc.advance()
            return Iri(resolve("rdf:type", self.table))
        if ch.isalpha():
            # could be an unsupported keyword rather than a prefixed name
            save = (self.sc.pos, self.sc.line, self.sc.col)
            word = self.read_word()
            if word.upper() in _UNSUPPORTED or word.upper() == "FILTER":
                self.sc.pos, self.sc.line, self.sc.col = save
                self.check_unsupported(word)
                self.error("FILTER is only supported as FILTER NOT EXISTS")
            self.sc.pos, self.sc.line, self.sc.col = save
        if ch.isalnum() or ch in "_:":
            label, local = self.sc.read_pname()
            return Iri(self._expand(label, local))
        self.error(f"unexpected character {ch!r}")

    def _expand(self, label: str, local: str) -> str:
        if label not in self.table:
            self.error(f"unknown prefix {label!r}")
        return self.table.namespace(label) + local

    def parse_group(self, depth: int = 0) -> list[TriplePattern | NotExistsBlock]:
        """Parse the body between braces: patterns and FILTER NOT EXISTS blocks."""
        body: list[TriplePattern | NotExistsBlock] = []
        self.expect_char("{")
        while True:
            self.skip()
            if self.sc.eof():
                self.error("unterminated group: missing '}'")
            if self.sc.peek() == "}":
                self.sc.advance()
                return body
            if self.sc.peek() == "{":
                raise UnsupportedFeature("nested group pattern")
            word = self.at_word()
            if word.upper() == "FILTER":
                if depth > 0:
                    raise UnsupportedFeature("nested FILTER NOT EXISTS")
                self.read_word()
                self.expect_word("NOT")
                self.expect_word("EXISTS")
                inner = self.parse_group(depth + 1)
                patterns = tuple(e for e in inner if isinstance(e, TriplePattern))
                if not patterns or len(patterns) != len(inner):
                    self.error("FILTER NOT EXISTS block must contain only triple patterns")
                body.append(NotExistsBlock(patterns))
                self.skip()
                if not self.sc.eof() and self.sc.peek() == ".":
                    self.sc.advance()
                continue
            if word:
                self.check_unsupported(word)
            subject = self.read_pattern_term("subject")
            if isinstance(subject, Literal):
                self.error("literal in subject position")
            while True:  # predicate-object list
                predicate = self.read_pattern_term("predicate")
                if isinstance(predicate, Literal):
                    self.error("literal in predicate position")
                while True:
                    obj = self.read_pattern_term("object")
                    body.append(TriplePattern(subject, predicate, obj))
                    self.skip()
                    if not self.sc.eof() and self.sc.peek() == ",":
                        self.sc.advance()
                        continue
                    break
                self.skip()
                if not self.sc.eof() and self.sc.peek() == ";":
                    self.sc.advance()
                    self.skip()
                    if self.sc.peek() in ".}":
                        break
                    continue
                break
            self.skip()
            if not self.sc.eof() and self.sc.peek() == ".":
                self.sc.advance()
            # missing '.' between patterns is tolerated (printed listings)


def parse_query(text: str, registry: VocabRegistry | None = None,
                prefixes: PrefixTable | None = None) -> SelectQuery:
    """Parse a SELECT query.  Predicate IRIs are alias-normalized when a
    registry is supplied."""
    if prefixes is not None:
        table = prefixes.copy()
    elif registry is not None:
        table = registry.prefixes.copy()
    else:
        table = PrefixTable()
    qp = _QueryParser(text, table)

    # PREFIX declarations
    while True:
        qp.skip()
        word = qp.at_word()
        if word.upper() != "PREFIX":
            break
        qp.read_word()
        qp.skip()
        label_chars = []
        while not qp.sc.eof() and (qp.sc.peek().isalnum() or qp.sc.peek() in "_-."):
            label_chars.append(qp.sc.advance())
        qp.expect_char(":")
        qp.skip()
        if qp.sc.peek() != "<":
            qp.error("expected namespace IRI")
        table.bind("".join(label_chars), qp.sc.read_iriref())

    qp.skip()
    word = qp.at_word()
    qp.check_unsupported(word)
    qp.expect_word("SELECT")
    qp.skip()
    distinct = False
    if qp.at_word().upper() == "DISTINCT":
        qp.read_word()
        distinct = True
    projection: list[str] = []
    while True:
        qp.skip()
        if qp.sc.eof():
            qp.error("expected WHERE")
        if qp.sc.peek() == "?":
            projection.append(qp.read_variable().name)
            continue
        break
    if not projection:
        qp.error("projection must name at least one variable")
    qp.expect_word("WHERE")
    qp.skip()
    body = qp.parse_group()
    qp.skip()
    if not qp.sc.eof():
        trailing = qp.at_word()
        if trailing:
            qp.check_unsupported(trailing)
        qp.error(f"unexpected trailing input {qp.sc.peek()!r}")

    query = SelectQuery(table, distinct, projection, body)
    body_vars: set[str] = set()
    for e in query.body:
        body_vars |= e.variables()
    missing = [v for v in projection if v not in body_vars]
    if missing:
        qp.error(f"projected variables not in body: {missing}")
    if not query.positive_patterns() and query.not_exists_blocks():
        qp.error("FILTER NOT EXISTS requires at least one positive pattern")
    if registry is not None:
        _normalize_predicates(query, registry)
    return query


def _normalize_predicates(query: SelectQuery, registry: VocabRegistry) -> None:
    def norm_pattern(p: TriplePattern) -> TriplePattern:
        if isinstance(p.p, Iri):
            canonical = registry.normalize_property(p.p.value).iri
            if canonical != p.p.value:
                return TriplePattern(p.s, Iri(canonical), p.o)
        return p

    new_body: list[TriplePattern | NotExistsBlock] = []
    for e in query.body:
        if isinstance(e, TriplePattern):
            new_body.append(norm_pattern(e))
        else:
            new_body.append(NotExistsBlock(tuple(norm_pattern(p) for p in e.patterns)))
    query.body = new_body


# ---------------------------------------------------------------------------
# Evaluator
# ---------------------------------------------------------------------------

def entailed_graph(triples: set[Triple], registry: VocabRegistry | None) -> set[Triple]:
    """Close a graph under subclass (rdf:type objects), subproperty and
    property-alias entailment."""
    if registry is None:
        return set(triples)
    rdf_type = Iri(RDF_TYPE)
    out: set[Triple] = set()
    for t in triples:
        canonical = registry.normalize_property(t.p.value).iri
        preds = {t.p.value} | registry.property_closure(canonical)
        for p_value in preds:
            out.add(Triple(t.s, Iri(p_value), t.o))
            if p_value == RDF_TYPE and isinstance(t.o, Iri):
                for sup in registry.type_closure([t.o.value]):
                    out.add(Triple(t.s, rdf_type, Iri(sup)))
    return out


def _substitute(p: TriplePattern, binding: Binding) -> TriplePattern:
    def sub(t: PatternTerm) -> PatternTerm:
        if isinstance(t, Variable) and t.name in binding:
            return binding[t.name]
        return t
    return TriplePattern(sub(p.s), sub(p.p), sub(p.o))


def _match_one(pattern: TriplePattern, triple: Triple, binding: Binding) -> Binding | None:
    new = dict(binding)
    for pat_term, value in ((pattern.s, triple.s), (pattern.p, triple.p), (pattern.o, triple.o)):
        if isinstance(pat_term, Variable):
            bound = new.get(pat_term.name)
            if bound is None:
                new[pat_term.name] = value
            elif bound != value:
                return None
        elif pat_term != value:
            return None
    return new


def _bound_count(p: TriplePattern, binding: Binding) -> int:
    n = 0
    for t in (p.s, p.p, p.o):
        if not isinstance(t, Variable) or t.name in binding:
            n += 1
    return n


def _join(patterns: list[TriplePattern], graph: set[Triple],
          seed: Binding) -> list[Binding]:
    """Nested-loop join; at each step the most-bound remaining pattern runs."""
    results: list[Binding] = []

    def step(remaining: list[TriplePattern], binding: Binding) -> None:
        if not remaining:
            results.append(binding)
            return
        idx = max(range(len(remaining)),
                  key=lambda i: (_bound_count(remaining[i], binding), -i))
        pattern = remaining[idx]
        rest = remaining[:idx] + remaining[idx + 1:]
        for t in graph:
            extended = _match_one(pattern, t, binding)
            if extended is not None:
                step(rest, extended)

    step(list(patterns), dict(seed))
    return results


def evaluate(query: SelectQuery, ds: Dataset, graphs: list[str] | None = None,
             registry: VocabRegistry | None = None) -> list[Binding]:
    """Solve the query over the selected graphs; deterministic output order
    (lexicographic over the projected terms)."""
    from .store import VALIDATED

    selected = graphs if graphs is not None else [VALIDATED]
    graph = entailed_graph(ds.union(selected), registry)

    candidates = _join(query.positive_patterns(), graph, {})
    survivors: list[Binding] = []
    for binding in candidates:
        ok = True
        for block in query.not_exists_blocks():
            if _join(list(block.patterns), graph, _restrict_to_shared(binding, block)):
                ok = False
                break
        if ok:
            survivors.append(binding)

    rows = [tuple(b.get(v) for v in query.projection) for b in survivors]
    if any(term is None for row in rows for term in row):
        raise ValueError("projection variable unbound at evaluation time")
    if query.distinct:
        rows = list(set(rows))
    rows.sort(key=lambda row: tuple(term_sort_key(t) for t in row))
    return [dict(zip(query.projection, row)) for row in rows]


def _restrict_to_shared(binding: Binding, block: NotExistsBlock) -> Binding:
    shared = block.variables()
    return {k: v for k, v in binding.items() if k in shared}


def bindings_to_tsv(projection: list[str], bindings: list[Binding],
                    prefixes: PrefixTable | None = None) -> str:
    """Result table as TSV: header row of variable names, then one row per
    binding with IRIs shrunk to prefixed names where possible."""
    def render(t: Term) -> str:
        if isinstance(t, Iri):
            if prefixes is not None:
                shrunk = prefixes.shrink(t.value)
                if shrunk is not None:
                    return shrunk
            return t.value
        return t.lexical

    lines = ["\t".join(f"?{v}" for v in projection)]
    for b in bindings:
        lines.append("\t".join(render(b[v]) for v in projection))
    return "\n".join(lines) + "\n"
