import pytest
from hypothesis import given, strategies as st

from prodkb.store import Iri, Literal, Triple
from prodkb.vocab import (EX, FOAF, GR, PV, UnknownPrefix, resolve,
                          load_registry)

REQUIRED_PREFIXES = ["pv", "gr", "foaf", "rdf", "rdfs", "ex", "dbo", "dbp"]

# every ProVoc symbol used anywhere in the project (completeness manifest)
PROVOC_CLASSES = [
    "pv:ProductOrServiceRange", "pv:Component", "pv:Division", "pv:Package",
    "pv:Provider", "pv:Ambassador", "pv:Designer", "pv:Model",
]
PROVOC_PROPERTIES = [
    "pv:belongsToProductOrServiceRange", "pv:belongsToBrand",
    "pv:belongsToPackage", "pv:hasProvider", "pv:hasComponent",
    "pv:hasRepresentative", "pv:hasFragranceCreator", "pv:hasTarget",
    "pv:healthImpact",
]
PROVOC_ALIASES = ["pv:belongsToRange", "pv:hasBrand", "pv:contains", "pv:healthimpact"]

# properties appearing in the competency query texts
QUERY_PROPERTIES = [
    "rdf:type", "pv:hasProvider", "pv:contains", "pv:belongsToRange",
    "pv:healthimpact", "pv:hasBrand", "pv:hasComponent", "pv:belongsToBrand",
    "pv:hasTarget", "pv:belongsToPackage", "dbo:starring", "pv:hasRepresentative",
]


class TestResolve:
    def test_pv_package(self, registry):
        assert resolve("pv:Package", registry.prefixes) == PV + "Package"

    def test_accented_local(self, registry):
        assert resolve("ex:Elsève", registry.prefixes) == EX + "Elsève"

    def test_unknown_prefix(self, registry):
        with pytest.raises(UnknownPrefix):
            resolve("zz:X", registry.prefixes)

    def test_required_prefixes_present(self, registry):
        for label in REQUIRED_PREFIXES:
            assert label in registry.prefixes


class TestNormalizeProperty:
    def test_belongs_to_range_alias(self, registry):
        got = registry.normalize_property(registry.resolve("pv:belongsToRange"))
        assert got.iri == PV + "belongsToProductOrServiceRange"
        assert got.known

    def test_contains_alias(self, registry):
        got = registry.normalize_property(registry.resolve("pv:contains"))
        assert got == (PV + "hasComponent", True)

    def test_canonical_is_fixed_point(self, registry):
        got = registry.normalize_property(registry.resolve("pv:hasRepresentative"))
        assert got == (PV + "hasRepresentative", True)

    def test_unknown_flagged_not_failed(self, registry):
        got = registry.normalize_property(EX + "madeUp")
        assert got == (EX + "madeUp", False)

    def test_idempotent_and_total(self, registry):
        for iri in list(registry.properties) + [EX + "whatever"]:
            once = registry.normalize_property(iri).iri
            assert registry.normalize_property(once).iri == once


class TestTypeClosure:
    def test_ambassador_is_person(self, registry):
        closure = registry.type_closure([PV + "Ambassador"])
        assert closure == {PV + "Ambassador", FOAF + "Person"}

    def test_empty(self, registry):
        assert registry.type_closure([]) == set()

    def test_division_and_business_entity(self, registry):
        # transitive closure done by hand over the shipped vocabulary file:
        # Division is declared a subclass of BusinessEntity, which has no
        # superclasses, so the closure is exactly the union of both inputs.
        closure = registry.type_closure([PV + "Division", GR + "BusinessEntity"])
        assert closure == {PV + "Division", GR + "BusinessEntity"}

    @given(st.lists(st.sampled_from(PROVOC_CLASSES + ["gr:Brand", "foaf:Person"])))
    def test_idempotent(self, registry, names):
        types = {registry.resolve(n) for n in names}
        once = registry.type_closure(types)
        assert registry.type_closure(once) == once


class TestValidateTriple:
    def _triple(self, registry, s, p, o):
        return Triple(Iri(registry.resolve(s)), Iri(registry.resolve(p)),
                      Iri(registry.resolve(o)))

    def test_valid_range_brand(self, registry):
        t = self._triple(registry, "ex:Elsève", "pv:belongsToBrand", "ex:Loreal_Paris")
        types = {
            registry.resolve("ex:Elsève"): {PV + "ProductOrServiceRange"},
            registry.resolve("ex:Loreal_Paris"): {GR + "Brand"},
        }
        assert registry.validate_triple(t, types) == []

    def test_person_outside_domain(self, registry):
        t = self._triple(registry, "ex:SomePerson", "pv:belongsToBrand",
                         "ex:Loreal_Paris")
        types = {
            registry.resolve("ex:SomePerson"): {FOAF + "Person"},
            registry.resolve("ex:Loreal_Paris"): {GR + "Brand"},
        }
        violations = registry.validate_triple(t, types)
        assert [v.severity for v in violations] == ["violation"]
        assert violations[0].kind == "domain"

    def test_untyped_terms_warn(self, registry):
        t = self._triple(registry, "ex:X", "pv:hasRepresentative", "ex:Y")
        violations = registry.validate_triple(t, {})
        assert [v.severity for v in violations] == ["warning", "warning"]

    def test_subclass_satisfies_range(self, registry):
        t = self._triple(registry, "ex:P", "pv:hasRepresentative", "ex:A")
        types = {
            registry.resolve("ex:P"): {GR + "ProductOrService"},
            registry.resolve("ex:A"): {PV + "Ambassador"},  # subclass of Person
        }
        assert registry.validate_triple(t, types) == []

    def test_literal_object_passes_open_range(self, registry):
        t = Triple(Iri(registry.resolve("ex:Elsève")),
                   Iri(registry.resolve("pv:hasTarget")), Literal("femmes"))
        types = {registry.resolve("ex:Elsève"): {PV + "ProductOrServiceRange"}}
        assert registry.validate_triple(t, types) == []


class TestRegistryCompleteness:
    def test_all_provoc_classes_registered(self, registry):
        for qname in PROVOC_CLASSES:
            assert registry.is_class(registry.resolve(qname)), qname

    def test_all_provoc_properties_registered(self, registry):
        for qname in PROVOC_PROPERTIES:
            assert registry.resolve(qname) in registry.properties, qname

    def test_all_aliases_normalize(self, registry):
        for qname in PROVOC_ALIASES:
            norm = registry.normalize_property(registry.resolve(qname))
            assert norm.known, qname
            assert norm.iri != registry.resolve(qname)

    def test_every_query_property_registered(self, registry):
        for qname in QUERY_PROPERTIES:
            norm = registry.normalize_property(registry.resolve(qname))
            assert norm.known, qname


class TestLoadRegistry:
    def test_cycle_detected(self):
        bad = """
        @prefix ex: <http://example.org#> .
        @prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .
        ex:A rdfs:subClassOf ex:B .
        ex:B rdfs:subClassOf ex:A .
        """
        with pytest.raises(Exception):
            load_registry(bad)

    def test_closed_under_reference(self, registry):
        for p in registry.properties.values():
            for cid in list(p.domains) + list(p.ranges):
                assert registry.is_class(cid)
        for c in registry.classes.values():
            for sup in c.super_classes:
                assert registry.is_class(sup)
