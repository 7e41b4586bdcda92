import random

from oracles import pairwise_score
from prodkb.evaluation import (EvalReport, METHOD_LABEL_FR, RelationInstance,
                               UNDEFINED, candidate_instances, gold_instances,
                               instance, normalize_endpoint, score)


def inst(prop, subj, obj, sent):
    return instance(prop, subj, obj, sent)


class TestScore:
    def test_set_arithmetic(self):
        gold = {inst("p", s, "o", "s1") for s in "abcd"}
        predicted = {inst("p", s, "o", "s1") for s in "abe"}
        result = score(gold, predicted)
        assert (result.tp, result.fp, result.fn) == (2, 1, 2)
        assert result.precision == 2 / 3
        assert result.recall == 1 / 2

    def test_identity(self):
        gold = {inst("p", "a", "b", "s1")}
        result = score(gold, set(gold))
        assert result.precision == 1.0 and result.recall == 1.0

    def test_empty_prediction_undefined_precision(self):
        gold = {inst("p", "a", "b", "s1")}
        result = score(gold, set())
        assert result.recall == 0.0
        assert result.precision is None

    def test_f1_harmonic(self):
        gold = {inst("p", s, "o", "s1") for s in "ab"}
        predicted = {inst("p", "a", "o", "s1"), inst("p", "x", "o", "s1")}
        result = score(gold, predicted)
        assert result.f1 == 0.5

    def test_random_pairs_match_pairwise_oracle(self):
        rng = random.Random(42)
        props = ["hascomponent", "hasrepresentative", "hasfragrancecreator"]
        subjects = [f"s{i}" for i in range(6)]
        objects = [f"o{i}" for i in range(6)]
        sentences = [f"sent{i}" for i in range(4)]

        def random_set():
            n = rng.randint(0, 12)
            return {
                RelationInstance(rng.choice(props), rng.choice(subjects),
                                 rng.choice(objects), rng.choice(sentences))
                for _ in range(n)
            }

        for _ in range(1000):
            gold, predicted = random_set(), random_set()
            result = score(gold, predicted)
            assert (result.tp, result.fp, result.fn) == \
                pairwise_score(gold, predicted)


def test_reference_corpus_profiles_documented():
    from prodkb.evaluation import REFERENCE_CORPORA

    web = REFERENCE_CORPORA["web"]
    assert web["sentences"] == 119
    assert (web["pv:hasFragranceCreator"], web["pv:hasComponent"],
            web["pv:hasRepresentative"]) == (69, 62, 81)
    press = REFERENCE_CORPORA["press"]
    assert press["sentences"] == 392
    assert (press["pv:hasComponent"], press["pv:hasFragranceCreator"],
            press["pv:hasRepresentative"]) == (79, 38, 44)


class TestNormalization:
    def test_iri_reduces_to_local_name(self):
        assert normalize_endpoint("http://example.org#Eau_Mega") == "eau_mega"

    def test_surface_spaces_unify(self):
        assert normalize_endpoint("Eau Mega") == "eau_mega"

    def test_gold_and_candidates_align(self, mini_doc, mini_gold, mini_mentions,
                                       registry, rule_pack, lexicon_pack):
        from prodkb.relex import extract

        gold = gold_instances(mini_gold, mini_doc, registry)
        predicted = candidate_instances(
            extract(mini_doc, mini_mentions, rule_pack, lexicon_pack), registry)
        result = score(gold, predicted)
        assert result.tp > 0


class TestReport:
    def test_rows_ordered_property_within_method(self):
        report = EvalReport.from_runs(set(), [("syntactic", set()),
                                              ("lexicoSyntactic", set())])
        names = [(r.method, r.property_name) for r in report.rows]
        assert names == [
            ("syntactic", "pv:hasComponent"),
            ("syntactic", "pv:hasFragranceCreator"),
            ("syntactic", "pv:hasRepresentative"),
            ("lexicoSyntactic", "pv:hasComponent"),
            ("lexicoSyntactic", "pv:hasFragranceCreator"),
            ("lexicoSyntactic", "pv:hasRepresentative"),
        ]

    def test_empty_method_list_renders_header_only(self):
        report = EvalReport.from_runs(set(), [])
        lines = report.render_text().splitlines()
        assert len(lines) == 2  # header + rule
        assert lines[0].startswith("Propriétés")

    def test_undefined_rendered_as_dash(self):
        report = EvalReport.from_runs(set(), [("lexicon", set())])
        assert UNDEFINED in report.render_text()
        cell = report.cell("pv:hasComponent", "lexicon")
        assert cell.precision is None and cell.recall is None

    def test_two_decimal_formatting(self):
        report = EvalReport.from_metrics([("pv:hasComponent", "syntactic", 0.2, 1.0)])
        text = report.render_tsv()
        assert "0.20" in text and "1.00" in text

    def test_french_method_labels(self):
        report = EvalReport.from_metrics([
            ("pv:hasComponent", "syntactic", 0.1, 0.2),
            ("pv:hasComponent", "lexicoSyntactic", 0.1, 0.2),
            ("pv:hasComponent", "lexicon", 0.1, 0.2),
        ])
        text = report.render_text()
        for label in METHOD_LABEL_FR.values():
            assert label in text

    def test_metrics_within_bounds(self, mini_doc, mini_gold, mini_mentions,
                                   registry, rule_pack, lexicon_pack):
        from prodkb.relex import apply_rules, extract

        gold = gold_instances(mini_gold, mini_doc, registry)
        runs = [
            ("lexicoSyntactic", candidate_instances(
                apply_rules(mini_doc, mini_mentions, rule_pack), registry)),
            ("lexicon", candidate_instances(
                extract(mini_doc, mini_mentions, rule_pack, lexicon_pack),
                registry)),
        ]
        report = EvalReport.from_runs(gold, runs)
        for row in report.rows:
            for value in (row.recall, row.precision):
                if value is not None:
                    assert 0.0 <= value <= 1.0

    def test_recall_gain_visible_in_report(self, mini_doc, mini_gold,
                                           mini_mentions, registry, rule_pack,
                                           lexicon_pack):
        from prodkb.relex import apply_rules, extract

        gold = gold_instances(mini_gold, mini_doc, registry)
        report = EvalReport.from_runs(gold, [
            ("lexicoSyntactic", candidate_instances(
                apply_rules(mini_doc, mini_mentions, rule_pack), registry)),
            ("lexicon", candidate_instances(
                extract(mini_doc, mini_mentions, rule_pack, lexicon_pack),
                registry)),
        ])
        for prop in ("pv:hasComponent", "pv:hasFragranceCreator",
                     "pv:hasRepresentative"):
            assert report.cell(prop, "lexicon").recall >= \
                report.cell(prop, "lexicoSyntactic").recall
