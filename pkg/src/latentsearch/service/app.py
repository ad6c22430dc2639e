"""FastAPI service wrapping the search engine.

Endpoints operate on server-local paths (the service is a single-box
research tool); the engine holding the loaded index and ontology lives in
``app.state`` and is swapped atomically by POST /load.
"""

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse

from latentsearch import __version__, evaluation
from latentsearch.engine import EngineConfigError, SearchEngine, load_engine
from latentsearch.indexing import CorpusError, build_index, read_corpus, save_index
from latentsearch.ontology import OntologyError, load_ontology
from latentsearch.service import schemas


def _expansion_payload(result) -> dict:
    return {
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


def create_app(index_path: str | None = None,
               ontology_path: str | None = None) -> FastAPI:
    app = FastAPI(title="latentsearch", version=__version__)
    app.state.engine = None
    if index_path is not None:
        app.state.engine = load_engine(index_path, ontology_path)

    def engine_or_409() -> SearchEngine:
        engine = app.state.engine
        if engine is None:
            raise HTTPException(status_code=409,
                                detail="no index loaded; POST /load first")
        return engine

    @app.exception_handler(FileNotFoundError)
    async def _missing_file(request, exc):
        return JSONResponse(status_code=404, content={"detail": str(exc)})

    @app.get("/health", response_model=schemas.StatusResponse)
    def health():
        engine = app.state.engine
        return schemas.StatusResponse(
            index_loaded=engine is not None,
            ontology_loaded=engine is not None and engine.ontology is not None,
            doc_count=engine.index.doc_count if engine else None,
            vocabulary_size=len(engine.index.doc_freq) if engine else None)

    @app.post("/load", response_model=schemas.StatusResponse)
    def load(request: schemas.LoadRequest):
        try:
            app.state.engine = load_engine(request.index_path,
                                           request.ontology_path)
        except (CorpusError, OntologyError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return health()

    @app.post("/index", response_model=schemas.IndexResponse)
    def index(request: schemas.IndexRequest):
        try:
            docs = read_corpus(request.corpus_path)
            built = build_index(docs)
        except CorpusError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        save_index(built, request.index_path)
        return schemas.IndexResponse(doc_count=built.doc_count,
                                     vocabulary_size=len(built.doc_freq),
                                     index_path=request.index_path)

    @app.post("/ontology/validate", response_model=schemas.ValidateOntologyResponse)
    def validate_ontology(request: schemas.ValidateOntologyRequest):
        try:
            ontology = load_ontology(request.ontology_path)
        except OntologyError as exc:
            return schemas.ValidateOntologyResponse(valid=False, error=str(exc))
        return schemas.ValidateOntologyResponse(valid=True, **ontology.summary())

    @app.post("/expand", response_model=schemas.ExpandResponse)
    def expand(request: schemas.ExpandRequest):
        engine = engine_or_409()
        try:
            result = engine.expand(request.query, request.method)
        except EngineConfigError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        return schemas.ExpandResponse(**_expansion_payload(result))

    @app.post("/search", response_model=schemas.SearchResponse)
    def search(request: schemas.SearchRequest):
        engine = engine_or_409()
        try:
            expansion, hits = engine.search(request.query, method=request.method,
                                            limit=request.limit)
        except EngineConfigError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        return schemas.SearchResponse(
            query=request.query,
            method_tag=expansion.method_tag,
            expanded_terms=list(expansion.expanded_terms),
            hits=[schemas.SearchHit(doc_id=h.doc_id, rank=h.rank, score=h.score)
                  for h in hits])

    @app.post("/evaluate", response_model=schemas.EvalResponse)
    def evaluate(request: schemas.EvalRequest):
        try:
            qrels = evaluation.load_qrels(request.qrels_path)
            run = evaluation.load_run(request.run_path)
            report = evaluation.evaluate_run(run, qrels)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        curve = [
            schemas.CurvePoint(level=level,
                               mean_precision=report.mean_curve.precision[i],
                               mean_f=report.mean_curve.f_measure[i])
            for i, level in enumerate(evaluation.RECALL_LEVELS)
        ]
        return schemas.EvalResponse(run_tag=run.tag,
                                    query_count=len(report.per_query_ap),
                                    map=report.map,
                                    per_query_ap=report.per_query_ap,
                                    curve=curve)

    @app.post("/sigtest", response_model=schemas.SigtestResponse)
    def sigtest(request: schemas.SigtestRequest):
        try:
            qrels = evaluation.load_qrels(request.qrels_path)
            run_a = evaluation.load_run(request.run_a_path)
            run_b = evaluation.load_run(request.run_b_path)
            _, ap_a, ap_b = evaluation.paired_ap_lists(run_a, run_b, qrels)
            result = evaluation.randomization_test(
                ap_a, ap_b, trials=request.trials, seed=request.seed)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return schemas.SigtestResponse(
            observed_diff=result.observed_diff,
            n_minus=result.n_minus,
            n_plus=result.n_plus,
            trials=result.trials,
            p_two_sided=result.p_two_sided,
            seed=result.seed,
            exhaustive=result.exhaustive,
            significant=result.significant)

    return app
