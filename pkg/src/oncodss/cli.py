"""Command-line interface: ontology inspection, case ingestion, consults,
evaluation runs and the HTTP server."""

from __future__ import annotations

import json
import os
import sys

import click

from . import casebase as cb
from . import evaluation as ev
from .ontology import OntologyError, load_obo
from .service import (
    ConsultError,
    ConsultRequest,
    DecisionSupportService,
    ServiceConfig,
    load_config,
)

SEX_CHOICES = {"m": "male", "f": "female", "male": "male", "female": "female", "u": "unknown"}


def _config(path: str | None) -> ServiceConfig:
    if path:
        return load_config(path)
    if os.path.exists("oncodss.conf"):
        return load_config("oncodss.conf")
    return ServiceConfig()


@click.group()
def main():
    """Ontology-backed cancer treatment decision support."""


@main.command("load-ontology")
@click.argument("path", type=click.Path(exists=True))
def load_ontology(path):
    """Parse an OBO file and print taxonomy statistics."""
    try:
        onto = load_obo(path)
    except OntologyError as exc:
        raise click.ClickException(f"{type(exc).__name__}: {exc}")
    active = [tid for tid in onto.terms if tid in onto]
    click.echo(f"terms: {len(onto.terms)} ({len(active)} active)")
    click.echo(f"roots: {', '.join(sorted(onto.roots))}")
    click.echo(f"max depth: {max(onto.depth.values(), default=0)}")
    click.echo(f"triples: {len(onto.triples)}")


@main.command()
@click.argument("cases_path", type=click.Path(exists=True))
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def ingest(cases_path, config_path):
    """Add cases from a JSONL file to the configured case store."""
    cfg = _config(config_path)
    onto = load_obo(cfg.ontology_path)
    store = (
        cb.CaseBase.load(cfg.case_store_path, ontology=onto)
        if os.path.exists(cfg.case_store_path)
        else cb.CaseBase(ontology=onto)
    )
    incoming = cb.CaseBase.load(cases_path, ontology=onto)
    added = 0
    for case in incoming.snapshot():
        try:
            store.add_case(case)
            added += 1
        except cb.DuplicateId:
            click.echo(f"skipping duplicate {case.case_id}", err=True)
    store.save(cfg.case_store_path)
    click.echo(f"ingested {added} cases; store now holds {len(store)} at revision {store.revision}")


@main.command()
@click.option("--text", default="", help="Free-text findings and history.")
@click.option("--age", type=int, required=True)
@click.option("--sex", type=click.Choice(sorted(SEX_CHOICES)), default="u")
@click.option("--stage", default=None, help="Stage label, e.g. IIIa.")
@click.option("-k", type=int, default=None, help="How many similar cases to return.")
@click.option("--json", "as_json", is_flag=True, help="Print the full answer as JSON.")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def query(text, age, sex, stage, k, as_json, config_path):
    """Run one consult against the configured knowledge and case base."""
    service = DecisionSupportService.from_config(_config(config_path))
    req = ConsultRequest(
        text=text,
        patient=cb.PatientRecord(age=age, sex=cb.Sex(SEX_CHOICES[sex])),
        stage=stage,
        k=k,
    )
    try:
        answer = service.consult(req)
    except ConsultError as exc:
        click.echo(json.dumps(exc.to_dict(), indent=2))
        sys.exit(1)
    if as_json:
        click.echo(json.dumps(answer.to_dict(), indent=2, ensure_ascii=False))
        return
    click.echo("diagnoses:")
    for code, label in answer.diagnoses or [("-", "none")]:
        click.echo(f"  {code}: {label}")
    click.echo("therapy:")
    for rule in answer.therapy:
        click.echo(f"  {rule.diagnosis_code} [{' + '.join(rule.therapy_codes)}]: {rule.narrative}")
    prog = answer.prognosis
    click.echo(
        f"prognosis: n={prog.n_cases} outcomes={dict(prog.outcome_counts)} "
        f"median_survival={prog.median_survival_months} range={prog.survival_range_months}"
    )
    click.echo("similar cases:")
    for entry in answer.similar_cases:
        click.echo(f"  {entry['case_id']}  score={entry['score']:.4f}")


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def explain(config_path):
    """Show the effective retrieval configuration: facet weights and formulas."""
    from .similarity import AGE_SCALE, DEFAULT_WEIGHTS, EXPANSION_LEVELS, SimilarityWeights

    cfg = _config(config_path)
    weights = SimilarityWeights.of(*cfg.weights)
    click.echo("facet weights (normalized):")
    for facet, value in weights.as_dict().items():
        default = getattr(DEFAULT_WEIGHTS, facet)
        suffix = "" if abs(value - default) < 1e-12 else f"  (default {default:.4f})"
        click.echo(f"  {facet:<9} {value:.4f}{suffix}")
    click.echo("facets:")
    click.echo("  diagnosis  2*depth(lca) / (depth(a) + depth(b)) over is_a; 0 when a term is missing")
    click.echo(f"  keywords   Jaccard of keyword sets expanded with ancestor names ({EXPANSION_LEVELS} levels)")
    click.echo(f"  age        1 - |age_a - age_b| / {AGE_SCALE:.0f}, clamped to [0, 1]")
    click.echo("  stage      1.0 equal label, 0.5 same numeral different suffix, else 0")
    click.echo(f"k_default: {cfg.k_default}")


@main.command()
@click.option("--dataset", type=click.Path(exists=True), required=True)
@click.option("--no-ontology", is_flag=True, help="Disable synonym/ancestor bridging.")
@click.option("--seed", type=int, default=0)
@click.option("--folds", type=int, default=5)
@click.option("-k", "--k-neighbors", type=int, default=None)
@click.option("--roc-csv", "roc_path", type=click.Path(), default=None, help="Write ROC points as CSV.")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def evaluate(dataset, no_ontology, seed, folds, k_neighbors, roc_path, config_path):
    """Cross-validate the classifier on a labeled JSONL dataset."""
    service = DecisionSupportService.from_config(_config(config_path))
    data = ev.load_labeled_cases(dataset)
    result = service.evaluate(
        data,
        k_neighbors=k_neighbors or service.k_default,
        use_ontology=not no_ontology,
        seed=seed,
        n_folds=folds,
    )
    click.echo(result["report"])
    click.echo(f"AUC  {result['roc']['auc']:.4f}")
    if roc_path:
        points = result["roc"]["points"]
        with open(roc_path, "w", encoding="utf-8") as fh:
            fh.write("fpr,tpr\n")
            fh.writelines(f"{x:.6f},{y:.6f}\n" for x, y in points)
        click.echo(f"wrote {len(points)} ROC points to {roc_path}")


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--port", type=int, default=None, help="Override the configured port.")
def serve(config_path, port):
    """Serve the HTTP JSON API (and the console, when configured)."""
    import uvicorn

    from .service import create_app

    cfg = _config(config_path)
    service = DecisionSupportService.from_config(cfg)
    app = create_app(service, static_dir=cfg.static_assets_dir)
    uvicorn.run(app, host="127.0.0.1", port=port or cfg.port)


if __name__ == "__main__":
    main()
