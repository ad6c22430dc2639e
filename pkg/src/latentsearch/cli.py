"""Command-line client for indexing, expansion, search and evaluation.

Every subcommand drives the core package directly; `serve` starts the
HTTP service wrapping the same engine. All randomness lives in `sigtest`
and is controlled by --seed (default 42) so outputs reproduce exactly.
"""

import json
import sys

import click

from latentsearch import evaluation
from latentsearch.engine import load_engine, read_queries
from latentsearch.expansion import ExpansionResult
from latentsearch.indexing import build_index, read_corpus, save_index
from latentsearch.ontology import OntologyError, load_ontology
from latentsearch.ranking import format_run_line

DEFAULT_SEED = 42
DEFAULT_TRIALS = 100_000


@click.group()
def main():
    """Semantic text search with ontology-driven query expansion."""


@main.command("index")
@click.argument("corpus_path", type=click.Path(exists=True))
@click.argument("index_path", type=click.Path())
def cmd_index(corpus_path, index_path):
    """Build an index from a corpus directory or JSONL records file."""
    docs = read_corpus(corpus_path)
    index = build_index(docs)
    save_index(index, index_path)
    click.echo(f"N={index.doc_count} vocabulary={len(index.doc_freq)} "
               f"index={index_path}")


@main.command("validate-ontology")
@click.argument("ontology_path", type=click.Path(exists=True))
def cmd_validate_ontology(ontology_path):
    """Check an ontology file and print its record counts."""
    try:
        ontology = load_ontology(ontology_path)
    except OntologyError as exc:
        click.echo(f"invalid: {exc}")
        sys.exit(1)
    counts = ontology.summary()
    click.echo(" ".join(f"{key}={value}" for key, value in counts.items()))


def _expansion_record(query_id: str, result: ExpansionResult) -> dict:
    return {
        "query_id": query_id,
        "query": result.query,
        "method_tag": result.method_tag,
        "forms": [
            {"initial_entity": f.initial_entity, "relation": f.relation,
             "target_class": f.target_class, "orientation": f.orientation}
            for f in result.forms
        ],
        "activated": [
            {"entity_id": a.entity_id, "main_alias": a.main_alias,
             "form_index": a.form_index}
            for a in result.activated
        ],
        "original_terms": list(result.original_terms),
        "expanded_terms": list(result.expanded_terms),
        "expanded_text": result.expanded_text,
    }


def _print_expansion(query_id: str, result: ExpansionResult) -> None:
    click.echo(f"query {query_id}: {result.query}")
    for form in result.forms:
        click.echo(f"  form [I: {form.initial_entity}]-(R: {form.relation})"
                   f"-[C: {form.target_class}] {form.orientation}")
    for item in result.activated:
        click.echo(f"  activated {item.entity_id} ({item.main_alias})")
    click.echo(f"  expanded: {result.expanded_text}")
    click.echo(json.dumps(_expansion_record(query_id, result), sort_keys=True))


@main.command("expand")
@click.argument("queries_file", type=click.Path(exists=True), required=False)
@click.option("--ontology", "-o", "ontology_path", type=click.Path(exists=True),
              required=True)
@click.option("--method", "-m", type=click.Choice(["qocsa", "csa"]),
              default="qocsa", show_default=True)
@click.option("--query", "-q", "single_query", default=None,
              help="Expand one query instead of a queries file.")
def cmd_expand(queries_file, ontology_path, method, single_query):
    """Show relation forms, activated entities and the expanded query.

    Each query also prints one JSON record for downstream drivers.
    """
    if (queries_file is None) == (single_query is None):
        raise click.UsageError("provide either QUERIES_FILE or --query")
    from latentsearch.expansion import expand_query_csa, expand_query_qocsa
    ontology = load_ontology(ontology_path)
    expander = expand_query_qocsa if method == "qocsa" else expand_query_csa
    if single_query is not None:
        queries = [("q1", single_query)]
    else:
        queries = read_queries(queries_file)
    for query_id, text in queries:
        _print_expansion(query_id, expander(text, ontology))


@main.command("search")
@click.argument("index_path", type=click.Path(exists=True))
@click.argument("queries_file", type=click.Path(exists=True))
@click.argument("run_path", type=click.Path())
@click.option("--method", "-m", type=click.Choice(["syntactic", "csa", "qocsa"]),
              default="syntactic", show_default=True)
@click.option("--ontology", "-o", "ontology_path", type=click.Path(exists=True),
              default=None, help="Required for csa and qocsa.")
@click.option("--depth", type=click.IntRange(min=1), default=None,
              help="Cap on results per query (default: unlimited).")
@click.option("--run-tag", default=None,
              help="Tag written in the run file (default: the method name).")
def cmd_search(index_path, queries_file, run_path, method, ontology_path,
               depth, run_tag):
    """Expand each query per the method, rank documents, write a run file."""
    if method in ("csa", "qocsa") and ontology_path is None:
        raise click.UsageError(f"--ontology is required for method {method!r}")
    if method == "syntactic":
        ontology_path = None  # never touched, even when supplied
    engine = load_engine(index_path, ontology_path)
    tag = run_tag or method
    queries = read_queries(queries_file)
    with open(run_path, "w", encoding="utf-8") as fh:
        for query_id, text in queries:
            _, hits = engine.search(text, method=method, limit=depth)
            for hit in hits:
                fh.write(format_run_line(query_id, hit, tag) + "\n")
    click.echo(f"queries={len(queries)} run={run_path}")


@main.command("eval")
@click.argument("qrels_path", type=click.Path(exists=True))
@click.argument("run_paths", type=click.Path(exists=True), nargs=-1, required=True)
@click.option("--ap-csv", type=click.Path(), default=None,
              help="Write per-query AP rows (single run only).")
@click.option("--curve-csv", type=click.Path(), default=None,
              help="Write the 11-level mean P/F curve (single run only).")
def cmd_eval(qrels_path, run_paths, ap_csv, curve_csv):
    """Score one run, or compare several (MAP per model plus improvement)."""
    qrels = evaluation.load_qrels(qrels_path)
    reports = []
    for run_path in run_paths:
        run = evaluation.load_run(run_path)
        reports.append((run.tag, evaluation.evaluate_run(run, qrels)))
    if len(reports) == 1:
        tag, report = reports[0]
        for query_id in report.skipped_no_relevant:
            click.echo(f"skipped {query_id}: no relevant documents", err=True)
        for query_id in report.skipped_no_judgments:
            click.echo(f"skipped {query_id}: no judgments", err=True)
        click.echo(f"run_tag {tag}")
        click.echo(f"queries {len(report.per_query_ap)}")
        click.echo(f"MAP {report.map:.4f}")
        if ap_csv:
            evaluation.write_ap_csv(ap_csv, report.per_query_ap)
        if curve_csv:
            evaluation.write_curve_csv(curve_csv, report.mean_curve)
        return
    if ap_csv or curve_csv:
        raise click.UsageError("--ap-csv/--curve-csv apply to a single run")
    base_tag, base_report = reports[0]
    click.echo("model MAP improvement")
    click.echo(f"{base_tag} {base_report.map:.4f} -")
    for tag, report in reports[1:]:
        gain = evaluation.relative_improvement(base_report.map, report.map)
        click.echo(f"{tag} {report.map:.4f} {gain:.1f}%")


@main.command("sigtest")
@click.argument("qrels_path", type=click.Path(exists=True))
@click.argument("run_a", type=click.Path(exists=True))
@click.argument("run_b", type=click.Path(exists=True))
@click.option("--trials", type=int, default=DEFAULT_TRIALS, show_default=True)
@click.option("--seed", type=int, default=DEFAULT_SEED, show_default=True)
@click.option("--sampling/--auto", "force_sampling", default=False,
              help="Force sampled trials even when exhaustive is affordable.")
def cmd_sigtest(qrels_path, run_a, run_b, trials, seed, force_sampling):
    """Two-sided randomization test between two runs' per-query APs.

    Prints `observed n_minus n_plus trials p seed` and the 0.05 verdict.
    """
    qrels = evaluation.load_qrels(qrels_path)
    data_a = evaluation.load_run(run_a)
    data_b = evaluation.load_run(run_b)
    _, ap_a, ap_b = evaluation.paired_ap_lists(data_a, data_b, qrels)
    result = evaluation.randomization_test(
        ap_a, ap_b, trials=trials, seed=seed,
        exhaustive=False if force_sampling else None)
    click.echo(result.format_line())
    verdict = "yes" if result.significant else "no"
    mode = "exhaustive" if result.exhaustive else "sampled"
    click.echo(f"significant at {evaluation.SIGNIFICANCE_THRESHOLD}: {verdict} ({mode})")


@main.command("plot-data")
@click.argument("qrels_path", type=click.Path(exists=True))
@click.argument("run_paths", type=click.Path(exists=True), nargs=-1, required=True)
@click.option("--out", "-O", "out_path", type=click.Path(), required=True)
def cmd_plot_data(qrels_path, run_paths, out_path):
    """Write averaged P-R/F-R curves for one or more runs as a long CSV."""
    qrels = evaluation.load_qrels(qrels_path)
    curves = {}
    for run_path in run_paths:
        run = evaluation.load_run(run_path)
        report = evaluation.evaluate_run(run, qrels)
        curves[run.tag] = report.mean_curve
    evaluation.write_plot_csv(out_path, curves)
    click.echo(f"curves={len(curves)} out={out_path}")


@main.command("serve")
@click.option("--index", "index_path", type=click.Path(exists=True), default=None)
@click.option("--ontology", "ontology_path", type=click.Path(exists=True), default=None)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def cmd_serve(index_path, ontology_path, host, port):
    """Run the HTTP service (index/ontology may also be loaded via POST /load)."""
    import uvicorn

    from latentsearch.service.app import create_app

    app = create_app(index_path=index_path, ontology_path=ontology_path)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
