"""Product-catalogue vocabulary: term resolution, property aliasing, domain/range checks.

The registry holds the ProVoc classes and properties together with the
GoodRelations and FOAF terms they build on.  It is loaded from a declarative
Turtle file (see ``data/vocabulary.ttl``) and is immutable afterwards, so a
single registry instance can be shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple

# Well-known namespaces.  The product vocabulary is published with both "/"
# and "#" terminators in the wild; the executable listings use "#", which is
# what every prefixed name here expands to.
PV = "http://ns.inria.fr/provoc#"
GR = "http://purl.org/goodrelations/v1#"
FOAF = "http://xmlns.com/foaf/0.1/"
RDF = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS = "http://www.w3.org/2000/01/rdf-schema#"
XSD = "http://www.w3.org/2001/XMLSchema#"
EX = "http://example.org#"
DBO = "http://dbpedia.org/ontology/"
DBP = "http://dbpedia.org/page/"
DBR = "http://dbpedia.org/resource/"
# Annotation properties used by prodkb's own data files (alias table,
# entity descriptions for the linker).
PKB = "http://prodkb.dev/vocab#"

RDF_TYPE = RDF + "type"
RDFS_LABEL = RDFS + "label"
RDFS_SUBCLASSOF = RDFS + "subClassOf"
RDFS_SUBPROPERTYOF = RDFS + "subPropertyOf"
RDFS_DOMAIN = RDFS + "domain"
RDFS_RANGE = RDFS + "range"
RDFS_RESOURCE = RDFS + "Resource"
RDFS_LITERAL = RDFS + "Literal"
RDFS_CLASS = RDFS + "Class"
XSD_STRING = XSD + "string"
RDF_LANGSTRING = RDF + "langString"
PKB_ALIAS_OF = PKB + "aliasOf"

DEFAULT_PREFIXES = {
    "pv": PV,
    "gr": GR,
    "foaf": FOAF,
    "rdf": RDF,
    "rdfs": RDFS,
    "xsd": XSD,
    "ex": EX,
    "dbo": DBO,
    "dbp": DBP,
    "dbr": DBR,
    "pkb": PKB,
}

# Classes every registry knows about even when the vocabulary file does not
# declare them; rdfs:Resource acts as the top class for domain/range checks.
BUILTIN_CLASSES = (RDFS_RESOURCE, RDFS_LITERAL, RDFS_CLASS)


class UnknownPrefix(KeyError):
    """A prefixed name uses a label absent from the prefix table."""


class VocabError(ValueError):
    """The vocabulary file violates a registry invariant."""


class PrefixTable:
    """Mapping prefix label -> namespace IRI, e.g. ``pv`` -> the ProVoc namespace."""

    def __init__(self, entries: dict[str, str] | None = None):
        self._entries: dict[str, str] = dict(DEFAULT_PREFIXES if entries is None else entries)

    def __contains__(self, label: str) -> bool:
        return label in self._entries

    def __iter__(self):
        return iter(sorted(self._entries))

    def __len__(self) -> int:
        return len(self._entries)

    def namespace(self, label: str) -> str:
        try:
            return self._entries[label]
        except KeyError:
            raise UnknownPrefix(label) from None

    def bind(self, label: str, namespace: str) -> None:
        self._entries[label] = namespace

    def copy(self) -> "PrefixTable":
        return PrefixTable(self._entries)

    def items(self):
        return sorted(self._entries.items())

    def shrink(self, iri: str) -> str | None:
        """Return ``label:local`` for the longest matching namespace, or None."""
        best: tuple[str, str] | None = None
        for label, ns in self._entries.items():
            if iri.startswith(ns) and (best is None or len(ns) > len(best[1])):
                best = (label, ns)
        if best is None:
            return None
        return f"{best[0]}:{iri[len(best[1]):]}"


def resolve(qname: str, prefixes: PrefixTable) -> str:
    """Expand a ``label:local`` prefixed name into an absolute IRI."""
    label, sep, local = qname.partition(":")
    if not sep:
        raise UnknownPrefix(qname)
    return prefixes.namespace(label) + local


@dataclass(frozen=True)
class ClassDef:
    id: str
    super_classes: frozenset[str] = frozenset()
    label: str = ""


@dataclass(frozen=True)
class PropertyDef:
    id: str
    # Domain/range are sets: a property may be declared over a union of
    # classes (e.g. a target audience applies to products, ranges and brands).
    domains: frozenset[str] = frozenset()
    ranges: frozenset[str] = frozenset()
    aliases: frozenset[str] = frozenset()
    super_properties: frozenset[str] = frozenset()
    label: str = ""


class NormalizedProperty(NamedTuple):
    iri: str
    known: bool


@dataclass(frozen=True)
class Violation:
    severity: str  # "violation" | "warning"
    kind: str      # "domain" | "range" | "untyped-subject" | "untyped-object" | "unknown-property"
    message: str

    @property
    def is_warning(self) -> bool:
        return self.severity == "warning"


class VocabRegistry:
    """Immutable class/property catalogue with alias and closure helpers."""

    def __init__(
        self,
        classes: Iterable[ClassDef],
        properties: Iterable[PropertyDef],
        prefixes: PrefixTable | None = None,
    ):
        self.prefixes = prefixes.copy() if prefixes is not None else PrefixTable()
        self.classes: dict[str, ClassDef] = {}
        for builtin in BUILTIN_CLASSES:
            self.classes[builtin] = ClassDef(builtin, frozenset(), builtin.rsplit("#", 1)[-1])
        for c in classes:
            self.classes[c.id] = c
        self.properties: dict[str, PropertyDef] = {p.id: p for p in properties}
        self._alias_to_canonical: dict[str, str] = {}
        for p in self.properties.values():
            for alias in p.aliases:
                if self._alias_to_canonical.get(alias, p.id) != p.id:
                    raise VocabError(f"alias {alias} maps to more than one property")
                self._alias_to_canonical[alias] = p.id
        self._check_closed()
        self._check_acyclic()

    def _check_closed(self) -> None:
        for c in self.classes.values():
            for sup in c.super_classes:
                if sup not in self.classes:
                    raise VocabError(f"{c.id}: unregistered superclass {sup}")
        for p in self.properties.values():
            for cid in list(p.domains) + list(p.ranges):
                if cid not in self.classes:
                    raise VocabError(f"{p.id}: unregistered domain/range {cid}")
            for sup in p.super_properties:
                if sup not in self.properties:
                    raise VocabError(f"{p.id}: unregistered superproperty {sup}")

    def _check_acyclic(self) -> None:
        state: dict[str, int] = {}  # 0 visiting, 1 done

        def visit(cid: str, trail: tuple[str, ...]) -> None:
            if state.get(cid) == 1:
                return
            if state.get(cid) == 0:
                raise VocabError(f"subclass cycle through {cid}: {' -> '.join(trail)}")
            state[cid] = 0
            for sup in self.classes[cid].super_classes:
                visit(sup, trail + (sup,))
            state[cid] = 1

        for cid in self.classes:
            visit(cid, (cid,))

    # -- term resolution ---------------------------------------------------

    def resolve(self, qname: str) -> str:
        return resolve(qname, self.prefixes)

    def normalize_property(self, iri: str) -> NormalizedProperty:
        """Map an alias to its canonical property id.

        Canonical ids and aliases come back as (canonical, known=True); anything
        else is returned unchanged with known=False -- unknown is a flag, never
        a failure.
        """
        if iri in self.properties:
            return NormalizedProperty(iri, True)
        canonical = self._alias_to_canonical.get(iri)
        if canonical is not None:
            return NormalizedProperty(canonical, True)
        return NormalizedProperty(iri, False)

    def is_class(self, iri: str) -> bool:
        return iri in self.classes

    # -- RDFS closure --------------------------------------------------------

    def type_closure(self, types: Iterable[str]) -> set[str]:
        """The input types plus all transitive superclasses (rdfs:subClassOf)."""
        out: set[str] = set()
        stack = list(types)
        while stack:
            cid = stack.pop()
            if cid in out:
                continue
            out.add(cid)
            cdef = self.classes.get(cid)
            if cdef is not None:
                stack.extend(cdef.super_classes)
        return out

    def property_closure(self, prop: str) -> set[str]:
        """The property plus all transitive superproperties (rdfs:subPropertyOf)."""
        out: set[str] = set()
        stack = [prop]
        while stack:
            pid = stack.pop()
            if pid in out:
                continue
            out.add(pid)
            pdef = self.properties.get(pid)
            if pdef is not None:
                stack.extend(pdef.super_properties)
        return out

    def subclasses_of(self, cid: str) -> set[str]:
        """All registered classes whose closure contains cid (cid included)."""
        return {c for c in self.classes if cid in self.type_closure([c])}

    # -- validation ----------------------------------------------------------

    def validate_triple(self, triple, types: dict[str, set[str]]) -> list[Violation]:
        """Check a triple's endpoints against the predicate's domain/range.

        ``types`` maps term IRIs to their asserted classes.  Untyped endpoints
        yield warnings, not violations; rdfs:Resource in a domain/range set
        accepts anything.
        """
        from .store import Iri, Literal  # local import: store depends on vocab

        violations: list[Violation] = []
        pred = triple.p.value
        norm = self.normalize_property(pred)
        if not norm.known:
            return [Violation("warning", "unknown-property", f"unregistered property {pred}")]
        pdef = self.properties[norm.iri]

        def check(side: str, term, allowed: frozenset[str]) -> None:
            if not allowed or RDFS_RESOURCE in allowed:
                return
            if isinstance(term, Literal):
                term_types: set[str] = {RDFS_LITERAL}
            else:
                asserted = types.get(term.value, set())
                if not asserted:
                    violations.append(
                        Violation("warning", f"untyped-{side}",
                                  f"{term.value} has no type assertion"))
                    return
                term_types = self.type_closure(asserted)
            allowed_closure: set[str] = set()
            for cid in allowed:
                allowed_closure |= self.subclasses_of(cid) | {cid}
            if not (term_types & allowed_closure):
                violations.append(
                    Violation("violation", side,
                              f"{term.value} (types {sorted(term_types)}) outside "
                              f"{norm.iri} {side} {sorted(allowed)}"))

        check("domain", triple.s, pdef.domains)
        check("range", triple.o, pdef.ranges)
        return violations


def load_registry(turtle_text: str, prefixes: PrefixTable | None = None) -> VocabRegistry:
    """Build a registry from a Turtle vocabulary document.

    Recognized statements: ``a rdfs:Class`` / ``a rdf:Property``, rdfs:label,
    rdfs:subClassOf, rdfs:subPropertyOf, rdfs:domain, rdfs:range, and the
    pkb:aliasOf annotation (alias -> canonical).
    """
    from .store import Iri, Literal, parse_turtle

    table = prefixes.copy() if prefixes is not None else PrefixTable()
    triples = parse_turtle(turtle_text, table)

    class_ids: set[str] = set()
    prop_ids: set[str] = set()
    labels: dict[str, str] = {}
    supers: dict[str, set[str]] = {}
    prop_supers: dict[str, set[str]] = {}
    domains: dict[str, set[str]] = {}
    ranges: dict[str, set[str]] = {}
    aliases: dict[str, set[str]] = {}  # canonical -> alias set

    for t in triples:
        s, p = t.s.value, t.p.value
        o = t.o
        if p == RDF_TYPE and isinstance(o, Iri):
            if o.value == RDFS_CLASS or o.value.endswith("#Class"):
                class_ids.add(s)
            elif o.value == RDF + "Property":
                prop_ids.add(s)
        elif p == RDFS_LABEL and isinstance(o, Literal):
            labels.setdefault(s, o.lexical)
        elif p == RDFS_SUBCLASSOF and isinstance(o, Iri):
            supers.setdefault(s, set()).add(o.value)
            class_ids.add(s)
            class_ids.add(o.value)
        elif p == RDFS_SUBPROPERTYOF and isinstance(o, Iri):
            prop_supers.setdefault(s, set()).add(o.value)
            prop_ids.update((s, o.value))
        elif p == RDFS_DOMAIN and isinstance(o, Iri):
            domains.setdefault(s, set()).add(o.value)
            prop_ids.add(s)
        elif p == RDFS_RANGE and isinstance(o, Iri):
            ranges.setdefault(s, set()).add(o.value)
            prop_ids.add(s)
        elif p == PKB_ALIAS_OF and isinstance(o, Iri):
            aliases.setdefault(o.value, set()).add(s)

    classes = [
        ClassDef(cid, frozenset(supers.get(cid, set())), labels.get(cid, local_name(cid)))
        for cid in sorted(class_ids)
    ]
    properties = [
        PropertyDef(
            pid,
            frozenset(domains.get(pid, set())),
            frozenset(ranges.get(pid, set())),
            frozenset(aliases.get(pid, set())),
            frozenset(prop_supers.get(pid, set())),
            labels.get(pid, local_name(pid)),
        )
        for pid in sorted(prop_ids)
    ]
    return VocabRegistry(classes, properties, table)


def load_default_registry() -> VocabRegistry:
    """Load the vocabulary file shipped with the package."""
    from importlib.resources import files

    text = files("prodkb").joinpath("data/vocabulary.ttl").read_text(encoding="utf-8")
    return load_registry(text)


def local_name(iri: str) -> str:
    """The fragment/last path segment of an IRI, used as a fallback label."""
    for sep in ("#", "/"):
        if sep in iri:
            tail = iri.rsplit(sep, 1)[1]
            if tail:
                return tail
    return iri
