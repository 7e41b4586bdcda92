"""Acceptance criteria, one test per criterion, each printing a pass line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
report lines.
"""

import datetime as dt
import random
import time

import pytest

from conftest import LISTING_PACKAGE, LISTING_RANGE, data_text
from oracles import (brute_evaluate, pairwise_score, random_graph,
                     random_query, toy_registry)
from prodkb import evaluation
from prodkb.corpus import Document
from prodkb.linker import (Weights, generate_candidates, link_document,
                           score_candidates, snapshot_from_triples)
from prodkb.ner import EntityMention
from prodkb.query import evaluate, parse_query
from prodkb.relex import apply_rules, extract
from prodkb.service import KbService, triple_key
from prodkb.store import (ACCEPTED, Dataset, Iri, Literal, Provenance, Triple,
                          AlreadyDecided, VALIDATED, parse_turtle,
                          serialize_turtle)
from prodkb.vocab import EX, GR, PV, RDF_TYPE, PrefixTable

DATE = dt.date(2016, 4, 20)


def report(criterion: int, message: str):
    print(f"\n[PASS] criterion {criterion}: {message}")


# -- 1. competency suite -------------------------------------------------------

EXPECTED_BINDINGS = {
    "queries/providers_of_product.rq": [{"fournisseur": Iri(EX + "Sephora")}],
    "queries/component_product_types.rq": [{"type": Iri(GR + "ProductOrService")}],
    "queries/risky_ranges_of_brand.rq": [{"range": Iri(EX + "Elsève")}],
    "queries/brands_avoiding_component.rq": [{"brand": Iri(EX + "Guerlain")},
                                             {"brand": Iri(EX + "Lancôme")}],
    "queries/ranges_of_brand.rq": [{"range": Iri(EX + "Elsève")}],
    "queries/target_consumers.rq": [{"consumer": Literal("femmes")}],
    "queries/packages_with_product_from_provider.rq":
        [{"package": Iri(EX + "Coffret_La_Vie_est_Belle")}],
    "queries/products_represented_by_movie_actors.rq":
        [{"product": Iri(EX + "Miss_Dior")}],
}


def test_criterion_1_competency_suite(registry, competency_dataset):
    started = time.perf_counter()
    for name, expected in EXPECTED_BINDINGS.items():
        query = parse_query(data_text(name), registry)
        rows = evaluate(query, competency_dataset, [VALIDATED], registry)
        assert rows == expected, name
    elapsed = time.perf_counter() - started
    assert elapsed < 1.0, f"competency suite took {elapsed:.3f}s"
    # the negative-filter question must actually exercise FILTER NOT EXISTS
    filtered = parse_query(data_text("queries/brands_avoiding_component.rq"),
                           registry)
    assert filtered.not_exists_blocks()
    report(1, f"8 competency queries return the hand-verified bindings "
              f"in {elapsed * 1000:.0f} ms")


# -- 2. Turtle round-trip ------------------------------------------------------

def _random_turtle_graph(rng: random.Random) -> set:
    locals_ = ["Elsève", "Nina", "Chanel_n°5", "a.b", "x-1", "L", "Trésor",
               "Guerlain", "p1", "p2"]
    lexicals = ['quote " inside', "back\\slash", "line\nbreak", "tab\there",
                "été à Paris", "plain", ""]
    datatypes = ["http://www.w3.org/2001/XMLSchema#token",
                 "http://www.w3.org/2001/XMLSchema#date"]
    triples = set()
    for _ in range(rng.randint(1, 60)):
        s = Iri(EX + rng.choice(locals_))
        p = Iri(rng.choice([PV + "hasComponent", GR + "category", EX + "p",
                            RDF_TYPE]))
        roll = rng.random()
        if roll < 0.45:
            o = Iri(rng.choice(
                [EX + l for l in locals_]
                + ["http://other.example/with(parens)", DATE_IRI]))
        elif roll < 0.7:
            o = Literal(rng.choice(lexicals))
        elif roll < 0.85:
            o = Literal(rng.choice(lexicals), lang=rng.choice(["fr", "en-US"]))
        else:
            o = Literal(rng.choice(lexicals), rng.choice(datatypes))
        triples.add(Triple(s, p, o))
    return triples


DATE_IRI = "http://dbpedia.org/page/Star_Wars_Episode_III:_Revenge_of_the_Sith"


def test_criterion_2_turtle_round_trip(registry):
    for listing, size in ((LISTING_RANGE, 3), (LISTING_PACKAGE, 10)):
        parsed = parse_turtle(listing, registry.prefixes)
        assert len(parsed) == size
        text = serialize_turtle(parsed, registry.prefixes)
        again = parse_turtle(text, registry.prefixes)
        assert set(again) == set(parsed)
        assert set(parse_turtle(serialize_turtle(again, registry.prefixes),
                                registry.prefixes)) == set(parsed)
    rng = random.Random(2016)
    for i in range(100):
        graph = _random_turtle_graph(rng)
        text = serialize_turtle(graph, registry.prefixes)
        assert set(parse_turtle(text, registry.prefixes)) == graph, f"graph {i}"
    report(2, "parse/serialize fixed point on both listings and 100 random graphs")


# -- 3. rule extraction on the two key sentences -----------------------------

def test_criterion_3_rule_extraction(mini_doc, mini_mentions, rule_pack,
                                     lexicon_pack):
    fc_doc = Document("one", mini_doc.source_url, mini_doc.date,
                      [mini_doc.sentence("s1")])
    stage_a = apply_rules(fc_doc, mini_mentions, rule_pack)
    assert {c.triple for c in stage_a} == {
        Triple(Iri(EX + "Eau_Mega"), Iri(PV + "hasFragranceCreator"),
               Iri(EX + "Olivier_Polge"))
    }

    rep_doc = Document("two", mini_doc.source_url, mini_doc.date,
                       [mini_doc.sentence("s2")])
    candidates = extract(rep_doc, mini_mentions, rule_pack, lexicon_pack)
    rep = [c for c in candidates
           if c.triple.p.value == PV + "hasRepresentative"]
    assert [c.triple for c in rep] == [
        Triple(Iri(EX + "Nina"), Iri(PV + "hasRepresentative"),
               Iri(EX + "Frida_Gustavsson"))
    ]
    assert rep[0].extractor == f"lexicon:{PV}hasRepresentative"
    cue_index = rep[0].evidence[0]
    cue = rep_doc.sentence("s2").token(cue_index)
    assert cue.lemma == "mannequin"
    report(3, "stage A yields exactly the fragrance-creator triple; "
              "stage B yields the representative triple via 'mannequin'")


# -- 4. two-stage structural invariant ------------------------------------------

def test_criterion_4_two_stage_invariant(mini_doc, mini_gold, mini_mentions,
                                         registry, rule_pack, lexicon_pack):
    gold = evaluation.gold_instances(mini_gold, mini_doc, registry)
    stage_a_cands = apply_rules(mini_doc, mini_mentions, rule_pack)
    full_cands = extract(mini_doc, mini_mentions, rule_pack, lexicon_pack)
    stage_a = evaluation.candidate_instances(stage_a_cands, registry)
    full = evaluation.candidate_instances(full_cands, registry)

    gains = {}
    for prop in ("hascomponent", "hasfragrancecreator", "hasrepresentative"):
        g = {i for i in gold if i.property_key == prop}
        recall_a = evaluation.score(g, {i for i in stage_a
                                        if i.property_key == prop}).recall
        recall_ab = evaluation.score(g, {i for i in full
                                         if i.property_key == prop}).recall
        assert recall_ab >= recall_a, prop
        gains[prop] = (recall_a, recall_ab)

    covered = {(c.sentence_id, c.triple.p.value) for c in stage_a_cands}
    for c in full_cands:
        if c.extractor.startswith("lexicon:"):
            for ev in c.attestations:
                assert (ev.sentence_id, c.triple.p.value) not in covered
    summary = ", ".join(f"{p}: {a:.2f}->{b:.2f}" for p, (a, b) in gains.items())
    report(4, f"recall(A+B) >= recall(A) per property ({summary}); gating holds")


# -- 5. eval oracle and report grids ------------------------------------------

TABLE_WEB = [
    ("pv:hasComponent", "syntactic", 0.2, 1.0),
    ("pv:hasFragranceCreator", "syntactic", 0.43, 0.45),
    ("pv:hasRepresentative", "syntactic", 0.3, 0.52),
    ("pv:hasComponent", "lexicoSyntactic", 0.3, 0.79),
    ("pv:hasFragranceCreator", "lexicoSyntactic", 0.45, 0.67),
    ("pv:hasRepresentative", "lexicoSyntactic", 0.36, 0.96),
    ("pv:hasComponent", "lexicon", 0.5, 0.67),
    ("pv:hasFragranceCreator", "lexicon", 0.59, 0.53),
    ("pv:hasRepresentative", "lexicon", 0.48, 0.69),
]

TABLE_WEB_EXPECTED = """Propriétés\tMéthode\tRappel\tPrécision
pv:hasComponent\tRègles syntaxiques\t0.20\t1.00
pv:hasFragranceCreator\tRègles syntaxiques\t0.43\t0.45
pv:hasRepresentative\tRègles syntaxiques\t0.30\t0.52
pv:hasComponent\tRègles lexico-syntaxiques\t0.30\t0.79
pv:hasFragranceCreator\tRègles lexico-syntaxiques\t0.45\t0.67
pv:hasRepresentative\tRègles lexico-syntaxiques\t0.36\t0.96
pv:hasComponent\tDéfinition du lexique\t0.50\t0.67
pv:hasFragranceCreator\tDéfinition du lexique\t0.59\t0.53
pv:hasRepresentative\tDéfinition du lexique\t0.48\t0.69
"""

TABLE_PRESS = [
    ("pv:hasComponent", "syntactic", 0.06, 0.25),
    ("pv:hasFragranceCreator", "syntactic", 0.21, 0.20),
    ("pv:hasRepresentative", "syntactic", 0.11, 0.18),
    ("pv:hasComponent", "lexicoSyntactic", 0.02, 0.25),
    ("pv:hasFragranceCreator", "lexicoSyntactic", 0.23, 0.66),
    ("pv:hasRepresentative", "lexicoSyntactic", 0.24, 0.76),
    ("pv:hasComponent", "lexicon", 0.21, 0.15),
    ("pv:hasFragranceCreator", "lexicon", 0.32, 0.32),
    ("pv:hasRepresentative", "lexicon", 0.34, 0.48),
]

TABLE_PRESS_EXPECTED = """Propriétés\tMéthode\tRappel\tPrécision
pv:hasComponent\tRègles syntaxiques\t0.06\t0.25
pv:hasFragranceCreator\tRègles syntaxiques\t0.21\t0.20
pv:hasRepresentative\tRègles syntaxiques\t0.11\t0.18
pv:hasComponent\tRègles lexico-syntaxiques\t0.02\t0.25
pv:hasFragranceCreator\tRègles lexico-syntaxiques\t0.23\t0.66
pv:hasRepresentative\tRègles lexico-syntaxiques\t0.24\t0.76
pv:hasComponent\tDéfinition du lexique\t0.21\t0.15
pv:hasFragranceCreator\tDéfinition du lexique\t0.32\t0.32
pv:hasRepresentative\tDéfinition du lexique\t0.34\t0.48
"""


def test_criterion_5_eval_oracle_and_grids():
    rng = random.Random(1000)
    props = ["hascomponent", "hasrepresentative", "hasfragrancecreator"]

    def random_set():
        return {
            evaluation.RelationInstance(
                rng.choice(props), f"s{rng.randint(0, 5)}",
                f"o{rng.randint(0, 5)}", f"sent{rng.randint(0, 3)}")
            for _ in range(rng.randint(0, 15))
        }

    for _ in range(1000):
        gold, predicted = random_set(), random_set()
        result = evaluation.score(gold, predicted)
        assert (result.tp, result.fp, result.fn) == pairwise_score(gold, predicted)

    assert evaluation.EvalReport.from_metrics(TABLE_WEB).render_tsv() \
        == TABLE_WEB_EXPECTED
    assert evaluation.EvalReport.from_metrics(TABLE_PRESS).render_tsv() \
        == TABLE_PRESS_EXPECTED
    report(5, "score() == pairwise oracle on 1000 random pairs; both published "
              "grids reproduce cell-for-cell at 2 decimals")


# -- 6. linking flip ------------------------------------------------------------

def test_criterion_6_linking_flip():
    snapshot = snapshot_from_triples(
        parse_turtle(data_text("fixtures/linking_snapshot.ttl"), PrefixTable()))
    acronym = EntityMention("s1", (1, 1), "YMCA", "Group")
    person = EntityMention("s1", (5, 6), "Martti Ahtisaari", "Person")

    org = "http://dbpedia.org/resource/YMCA"
    song = "http://dbpedia.org/resource/Y.M.C.A._(song)"

    pool = generate_candidates(acronym, snapshot)
    cohort = {e.iri for e in generate_candidates(person, snapshot)}

    string_only = score_candidates(acronym, [], pool, cohort,
                                   Weights(1, 0, 0), snapshot)
    assert string_only[0].entity == song

    connected = score_candidates(acronym, [], pool, cohort,
                                 Weights(0.4, 0.3, 0.3), snapshot)
    assert connected[0].entity == org

    for weights in (Weights(0.4, 0.3, 0.3), Weights(4, 3, 3).normalized(),
                    Weights(0.8, 0.6, 0.6).normalized()):
        ranked = score_candidates(acronym, [], pool, cohort, weights, snapshot)
        assert ranked[0].entity == org
    decisions = link_document([acronym, person], snapshot)
    assert [d.result for d in decisions] == \
        [org, "http://dbpedia.org/resource/Martti_Ahtisaari"]
    report(6, "string-only ranking picks the song, connectivity flips to the "
              "organisation, argmax invariant under weight renormalization")


# -- 7. query oracle -------------------------------------------------------------

def test_criterion_7_query_oracle():
    registry = toy_registry()
    rng = random.Random(2017)
    checked = 0
    while checked < 200:
        triples = random_graph(rng, max_triples=200)
        ds = Dataset()
        for t in triples:
            ds.insert(t, Provenance("t", DATE, "import", ACCEPTED), VALIDATED)
        for _ in range(4):
            query = random_query(rng)
            got = evaluate(query, ds, [VALIDATED], registry)
            want = brute_evaluate(query, triples, registry)
            assert got == want
            checked += 1
    report(7, f"evaluator == brute-force enumerator on {checked} random queries")


# -- 8. validation state machine --------------------------------------------------

def test_criterion_8_validation_state_machine(tmp_path):
    kb_dir = tmp_path / "kb"
    service = KbService.with_packaged_data(kb_dir=kb_dir)
    service.ingest(data_text("fixtures/guerlain.conllu"),
                   "http://blog.example/maquillage", dt.date(2016, 4, 25))
    service.ingest(data_text("corpus/mini.conllu"), "mini://corpus",
                   dt.date(2016, 5, 18))

    rng = random.Random(77)
    pending = [t for t, p in service.dataset.temporary.items()
               if p.status == "pending"]
    rng.shuffle(pending)
    accept_target = None
    for i, triple in enumerate(pending):
        key = triple_key(triple)
        if triple == Triple(Iri(EX + "Guerlain"), Iri(RDF_TYPE), Iri(GR + "Brand")):
            service.decide(key, "accept")
            accept_target = triple
            continue
        roll = rng.random()
        if roll < 0.5:
            service.decide(key, "accept")
        elif roll < 0.8:
            service.decide(key, "reject")
        else:
            service.decide(key, "propose-other-iri",
                           f"http://dbpedia.org/resource/R{i}")
    assert accept_target is not None

    # every triple is decided exactly once
    with pytest.raises(AlreadyDecided):
        service.decide(triple_key(pending[0]), "reject")

    # queue accounting: decided counters equal non-pending temporary triples
    decided_total = sum(e.decided for e in service.pending_by_article())
    non_pending = sum(1 for p in service.dataset.temporary.values()
                      if p.status != "pending")
    assert decided_total == non_pending == len(pending)

    # journal replay over an empty dataset reconstructs the validated graph
    journal_lines = (kb_dir / "journal.jsonl").read_text("utf-8").splitlines()
    replayed = Dataset()
    replayed.replay(journal_lines)
    assert set(replayed.validated) == set(service.dataset.validated)
    assert {t: p.status for t, p in replayed.temporary.items()} == \
        {t: p.status for t, p in service.dataset.temporary.items()}

    # the accepted typing is in validated and answers queries
    assert accept_target in service.dataset.validated
    _, rows = service.query("SELECT ?b WHERE { ?b rdf:type gr:Brand }")
    assert {"b": Iri(EX + "Guerlain")} in rows
    report(8, f"journal replay reconstructs validated graph "
              f"({len(service.dataset.validated)} triples) after "
              f"{len(pending)} randomized decisions; accepted typing queryable")
