import datetime as dt
from importlib.resources import files

import pytest

from prodkb.corpus import load_conllu, load_gold
from prodkb.ner import load_context_rules, load_gazetteer, recognize
from prodkb.relex import load_lexicons, load_rules
from prodkb.store import ACCEPTED, Dataset, Provenance, VALIDATED, parse_turtle
from prodkb.vocab import load_default_registry

DATA = files("prodkb").joinpath("data")

# The two catalogue listings, as printed (note the undeclared pv prefix in the
# second one and the missing dots after @prefix lines; the parser must cope).
LISTING_RANGE = """@prefix pv: <http://ns.inria.fr/provoc#>
@prefix rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#>
@prefix ex: <http://example.org#>

ex:Huile_extraordinaire_Universelle
    pv:belongsToProductOrServiceRange ex:Elsève .
ex:Elsève rdf:type pv:ProductOrServiceRange ;
    pv:belongsToBrand ex:Loreal_Paris .
"""

LISTING_PACKAGE = """@prefix gr: <http://purl.org/goodrelations/v1#>
@prefix rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#>
@prefix ex: <http://example.org#>

ex:Degustabox1015
  rdf:type pv:Package .
ex:MiniBiscuitsBanana
  pv:belongsToPackage ex:Degustabox1015 ;
  pv:belongsToBrand ex:Weetabix_Crispy_Minis ;
  gr:isSimilarTo ex:MiniBiscuitsChocolate ;
  gr:isVariantOf ex:MiniBiscuitsModel .
ex:MiniBiscuitsModel rdf:type gr:ProductOrServiceModel .
ex:CapuccinoCarambar pv:belongsToPackage ex:Degustabox1015 ;
  pv:belongsToBrand ex:Maxwell_House .
ex:ExtraitNaturelDeVanille
  pv:belongsToPackage ex:Degustabox1015 ;
  pv:belongsToBrand ex:Sainte-Lucie .
"""


def data_text(relpath: str) -> str:
    return DATA.joinpath(relpath).read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def registry():
    return load_default_registry()


@pytest.fixture(scope="session")
def competency_dataset(registry):
    ds = Dataset()
    prov = Provenance("fixture", dt.date(2016, 4, 20), "import", ACCEPTED)
    for t in parse_turtle(data_text("fixtures/competency.ttl"), registry.prefixes):
        ds.insert(t, Provenance("fixture", prov.date, "import", ACCEPTED), VALIDATED)
    return ds


@pytest.fixture(scope="session")
def mini_doc():
    return load_conllu(data_text("corpus/mini.conllu"), doc_id="mini",
                       source_url="mini://corpus", date=dt.date(2016, 5, 18))


@pytest.fixture(scope="session")
def mini_gold(mini_doc, registry):
    return load_gold(data_text("corpus/mini.gold.tsv"), mini_doc, registry)


@pytest.fixture(scope="session")
def gazetteer():
    return load_gazetteer(data_text("gazetteer.tsv"))


@pytest.fixture(scope="session")
def context_rules():
    return load_context_rules(data_text("context_rules.tsv"))


@pytest.fixture(scope="session")
def mini_mentions(mini_doc, gazetteer, context_rules):
    return recognize(mini_doc, gazetteer, context_rules)


@pytest.fixture(scope="session")
def rule_pack(registry):
    return load_rules(data_text("rules.json"), registry)


@pytest.fixture(scope="session")
def lexicon_pack(registry):
    return load_lexicons(data_text("lexicons.json"), registry)
