"""prodkb: a product/brand knowledge-base construction toolkit.

Modules: vocab (vocabulary registry), store (triple dataset + Turtle),
query (SPARQL subset), corpus (document/gold loaders), ner (entity
recognition), relex (relation extraction), linker (entity linking),
evaluation (P/R scoring), service (pipeline + validation workflow),
http_api (REST endpoints), cli (command line).
"""

__version__ = "0.1.0"
