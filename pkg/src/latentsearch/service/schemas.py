"""Pydantic request/response models for the HTTP service."""

from typing import Literal, Optional

from pydantic import BaseModel, Field

Method = Literal["syntactic", "csa", "qocsa"]


class StatusResponse(BaseModel):
    status: str = "ok"
    index_loaded: bool
    ontology_loaded: bool
    doc_count: Optional[int] = None
    vocabulary_size: Optional[int] = None


class LoadRequest(BaseModel):
    index_path: str
    ontology_path: Optional[str] = None


class IndexRequest(BaseModel):
    corpus_path: str
    index_path: str


class IndexResponse(BaseModel):
    doc_count: int
    vocabulary_size: int
    index_path: str


class ValidateOntologyRequest(BaseModel):
    ontology_path: str


class ValidateOntologyResponse(BaseModel):
    valid: bool
    error: Optional[str] = None
    classes: int = 0
    entities: int = 0
    facts: int = 0
    phrases: int = 0
    interrogatives: int = 0


class RelationFormModel(BaseModel):
    initial_entity: str
    relation: str
    target_class: str
    orientation: str


class ActivatedEntityModel(BaseModel):
    entity_id: str
    main_alias: str
    form_index: Optional[int] = None


class ExpandRequest(BaseModel):
    query: str
    method: Method = "qocsa"


class ExpandResponse(BaseModel):
    query: str
    method_tag: str
    forms: list[RelationFormModel]
    activated: list[ActivatedEntityModel]
    original_terms: list[str]
    expanded_terms: list[str]
    expanded_text: str


class SearchRequest(BaseModel):
    query: str
    method: Method = "syntactic"
    limit: Optional[int] = Field(default=None, ge=1)


class SearchHit(BaseModel):
    doc_id: str
    rank: int
    score: float


class SearchResponse(BaseModel):
    query: str
    method_tag: str
    expanded_terms: list[str]
    hits: list[SearchHit]


class EvalRequest(BaseModel):
    run_path: str
    qrels_path: str


class CurvePoint(BaseModel):
    level: float
    mean_precision: float
    mean_f: float


class EvalResponse(BaseModel):
    run_tag: str
    query_count: int
    map: float
    per_query_ap: dict[str, float]
    curve: list[CurvePoint]


class SigtestRequest(BaseModel):
    run_a_path: str
    run_b_path: str
    qrels_path: str
    trials: int = Field(default=100_000, ge=1)
    seed: int = 42


class SigtestResponse(BaseModel):
    observed_diff: float
    n_minus: int
    n_plus: int
    trials: int
    p_two_sided: float
    seed: int
    exhaustive: bool
    significant: bool
