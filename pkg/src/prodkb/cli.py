"""Command line mirroring the service endpoints plus corpus utilities."""

from __future__ import annotations

import datetime as dt
import json
import sys
from pathlib import Path

import click

from . import corpus, evaluation, ner, relex, store
from .linker import Weights
from .service import KbService
from .vocab import load_default_registry


def _parse_snapshots(values: tuple[str, ...]) -> dict[str, str]:
    out = {}
    for v in values:
        name, sep, path = v.partition("=")
        if not sep:
            raise click.BadParameter("expected name=path")
        out[name] = path
    return out


def _build_service(kb, snapshot, rules, lexicons, gazetteer, weights, tau, window):
    registry = load_default_registry()
    service = KbService.with_packaged_data(
        registry,
        kb_dir=kb,
        snapshot_files=_parse_snapshots(snapshot),
        weights=Weights(*(float(x) for x in weights.split(","))),
        tau=tau,
        window=window,
    )
    if gazetteer:
        service.gazetteer = ner.load_gazetteer(Path(gazetteer).read_text("utf-8"))
    if rules:
        service.rules = relex.load_rules(Path(rules).read_text("utf-8"), registry)
    if lexicons:
        service.lexicons = relex.load_lexicons(Path(lexicons).read_text("utf-8"), registry)
    return service


def common_options(fn):
    fn = click.option("--kb", type=click.Path(), default=None,
                      help="knowledge-base directory (journal + validated.ttl)")(fn)
    fn = click.option("--snapshot", multiple=True, metavar="NAME=PATH",
                      help="read-only snapshot graph (repeatable)")(fn)
    fn = click.option("--rules", type=click.Path(exists=True), default=None)(fn)
    fn = click.option("--lexicons", type=click.Path(exists=True), default=None)(fn)
    fn = click.option("--gazetteer", type=click.Path(exists=True), default=None)(fn)
    fn = click.option("--weights", default="0.4,0.3,0.3",
                      help="linker weights: string,context,connectivity")(fn)
    fn = click.option("--tau", type=float, default=0.5, help="linking threshold")(fn)
    fn = click.option("--window", type=int, default=3, help="lexicon flank window")(fn)
    return fn


@click.group()
def main():
    """Product knowledge-base toolkit."""


@main.command()
@common_options
@click.option("--port", type=int, default=8000)
@click.option("--host", default="127.0.0.1")
def serve(kb, snapshot, rules, lexicons, gazetteer, weights, tau, window, port, host):
    """Start the HTTP service."""
    import uvicorn

    from .http_api import create_app

    service = _build_service(kb, snapshot, rules, lexicons, gazetteer,
                             weights, tau, window)
    uvicorn.run(create_app(service), host=host, port=port, log_level="warning")


@main.command()
@common_options
@click.argument("file", type=click.Path(exists=True))
@click.option("--source-url", default="")
@click.option("--date", default=None, help="YYYY-MM-DD")
@click.option("--kind", default="auto",
              type=click.Choice(["auto", "text", "html", "conllu"]))
def ingest(kb, snapshot, rules, lexicons, gazetteer, weights, tau, window,
           file, source_url, date, kind):
    """Run the pipeline on a document and queue its assertions."""
    service = _build_service(kb, snapshot, rules, lexicons, gazetteer,
                             weights, tau, window)
    result = service.ingest(Path(file).read_text("utf-8"), source_url,
                            dt.date.fromisoformat(date) if date else None, kind)
    click.echo(json.dumps(result.to_json(), ensure_ascii=False, indent=2))


@main.command()
@common_options
def queue(kb, snapshot, rules, lexicons, gazetteer, weights, tau, window):
    """List articles awaiting validation."""
    service = _build_service(kb, snapshot, rules, lexicons, gazetteer,
                             weights, tau, window)
    for entry in service.pending_by_article():
        click.echo(json.dumps(entry.to_json(), ensure_ascii=False))


@main.command()
@common_options
@click.argument("document_id")
def pending(kb, snapshot, rules, lexicons, gazetteer, weights, tau, window,
            document_id):
    """Show a document's pending assertions."""
    service = _build_service(kb, snapshot, rules, lexicons, gazetteer,
                             weights, tau, window)
    for item in service.pending_triples(document_id):
        click.echo(json.dumps(item.to_json(), ensure_ascii=False))


@main.command()
@common_options
@click.argument("key")
@click.argument("decision",
                type=click.Choice(["accept", "reject", "create-new-entity",
                                   "propose-other-iri"]))
@click.option("--iri", default=None, help="replacement IRI for propose-other-iri")
def decide(kb, snapshot, rules, lexicons, gazetteer, weights, tau, window,
           key, decision, iri):
    """Record an expert decision on a pending triple."""
    service = _build_service(kb, snapshot, rules, lexicons, gazetteer,
                             weights, tau, window)
    entry = service.decide(key, decision, iri)
    click.echo(json.dumps(entry.to_json(), ensure_ascii=False, indent=2))


@main.command()
@common_options
@click.argument("document_id")
def mentions(kb, snapshot, rules, lexicons, gazetteer, weights, tau, window,
             document_id):
    """Highlight data for a document: spans, colors, per-type summary."""
    service = _build_service(kb, snapshot, rules, lexicons, gazetteer,
                             weights, tau, window)
    click.echo(json.dumps(service.mentions_view(document_id),
                          ensure_ascii=False, indent=2))


@main.command()
@common_options
@click.argument("type_name")
@click.option("--initial", default=None)
def entities(kb, snapshot, rules, lexicons, gazetteer, weights, tau, window,
             type_name, initial):
    """Alphabetical entity index for one of the browse types."""
    service = _build_service(kb, snapshot, rules, lexicons, gazetteer,
                             weights, tau, window)
    click.echo(json.dumps(service.entity_index(type_name, initial),
                          ensure_ascii=False, indent=2))


@main.command()
@common_options
@click.argument("iri")
@click.option("--depth", type=int, default=1)
def graph(kb, snapshot, rules, lexicons, gazetteer, weights, tau, window,
          iri, depth):
    """Neighborhood of an entity across the validated graph and snapshots."""
    service = _build_service(kb, snapshot, rules, lexicons, gazetteer,
                             weights, tau, window)
    click.echo(json.dumps(service.neighborhood(iri, depth).to_json(),
                          ensure_ascii=False, indent=2))


@main.command()
@common_options
@click.argument("file", type=click.Path(exists=True), required=False)
def query(kb, snapshot, rules, lexicons, gazetteer, weights, tau, window, file):
    """Evaluate a SELECT query (from FILE or stdin); prints a TSV table."""
    service = _build_service(kb, snapshot, rules, lexicons, gazetteer,
                             weights, tau, window)
    text = Path(file).read_text("utf-8") if file else sys.stdin.read()
    click.echo(service.query_tsv(text), nl=False)


@main.command(name="extract")
@common_options
@click.argument("file", type=click.Path(exists=True))
def extract_cmd(kb, snapshot, rules, lexicons, gazetteer, weights, tau, window,
                file):
    """Extract candidate triples from a CoNLL-U file (no insertion)."""
    service = _build_service(kb, snapshot, rules, lexicons, gazetteer,
                             weights, tau, window)
    doc = corpus.load_conllu(Path(file).read_text("utf-8"), doc_id=Path(file).stem)
    mentions = ner.recognize(doc, service.gazetteer, service.context_rules)
    for c in relex.extract(doc, mentions, service.rules, service.lexicons,
                           service.window):
        click.echo(json.dumps({
            "triple": store.triple_to_json(c.triple),
            "extractor": c.extractor,
            "sentence": c.sentence_id,
            "confidence": c.confidence,
            "attestations": len(c.attestations),
        }, ensure_ascii=False))


@main.command(name="eval")
@common_options
@click.argument("conllu", type=click.Path(exists=True))
@click.argument("gold", type=click.Path(exists=True))
@click.option("--method", "methods", multiple=True,
              type=click.Choice(evaluation.METHOD_ORDER),
              help="methods to run (default: all three)")
@click.option("--tsv", "tsv_out", type=click.Path(), default=None,
              help="also write the machine-readable table here")
def eval_cmd(kb, snapshot, rules, lexicons, gazetteer, weights, tau, window,
             conllu, gold, methods, tsv_out):
    """Score the extractor against gold annotations, per relation and method."""
    service = _build_service(kb, snapshot, rules, lexicons, gazetteer,
                             weights, tau, window)
    registry = service.registry
    doc = corpus.load_conllu(Path(conllu).read_text("utf-8"), doc_id=Path(conllu).stem)
    gold_ann = corpus.load_gold(Path(gold).read_text("utf-8"), doc, registry)
    mentions = ner.recognize(doc, service.gazetteer, service.context_rules)

    gold_set = evaluation.gold_instances(gold_ann, doc, registry)
    syntactic_rules = [r for r in service.rules if r.id.startswith("syn_")]
    runs = []
    for method in (methods or evaluation.METHOD_ORDER):
        if method == "syntactic":
            predicted = relex.apply_rules(doc, mentions, syntactic_rules)
        elif method == "lexicoSyntactic":
            predicted = relex.apply_rules(doc, mentions, service.rules)
        else:
            predicted = relex.extract(doc, mentions, service.rules,
                                      service.lexicons, service.window)
        runs.append((method, evaluation.candidate_instances(predicted, registry)))
    report = evaluation.EvalReport.from_runs(gold_set, runs)
    click.echo(report.render_text(), nl=False)
    if tsv_out:
        Path(tsv_out).write_text(report.render_tsv(), encoding="utf-8")


@main.command(name="import")
@common_options
@click.argument("file", type=click.Path(exists=True))
def import_cmd(kb, snapshot, rules, lexicons, gazetteer, weights, tau, window,
               file):
    """Import a Turtle document into the validated graph."""
    service = _build_service(kb, snapshot, rules, lexicons, gazetteer,
                             weights, tau, window)
    count = service.import_turtle(Path(file).read_text("utf-8"), source_url=file)
    click.echo(f"imported {count} triples")


@main.command(name="export")
@common_options
def export_cmd(kb, snapshot, rules, lexicons, gazetteer, weights, tau, window):
    """Write the validated graph as Turtle to stdout."""
    service = _build_service(kb, snapshot, rules, lexicons, gazetteer,
                             weights, tau, window)
    click.echo(service.export_turtle(), nl=False)


if __name__ == "__main__":
    main()
