"""Vector space model ranking: query weighting, cosine similarity, search.

All functions are pure over an immutable ``PostingsIndex``; any number of
searches may run concurrently.
"""

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping

from latentsearch.indexing import PostingsIndex


class ZeroVectorError(ValueError):
    """Cosine similarity is undefined when either vector has zero norm."""


@dataclass(frozen=True)
class QueryVector:
    """Sparse tf.idf query vector; only positive-weight terms are kept."""

    weights: dict[str, float]
    norm: float

    def __bool__(self) -> bool:
        return bool(self.weights)


@dataclass(frozen=True)
class ScoredDoc:
    doc_id: str
    score: float
    rank: int


def weight_query(terms: Iterable[str], index: PostingsIndex) -> QueryVector:
    """Weight query terms with corpus tf.idf; out-of-vocabulary terms drop.

    Terms occurring in every document weigh 0 and are dropped too, so an
    empty vector signals "nothing retrievable" rather than an error.
    """
    counts = Counter(t for t in terms if t in index.doc_freq)
    weights = {}
    for term in sorted(counts):
        w = counts[term] * index.idf(term)
        if w > 0.0:
            weights[term] = w
    norm = math.sqrt(sum(w * w for w in weights.values()))
    return QueryVector(weights=weights, norm=norm)


def cosine(doc_weights: Mapping[str, float], query_weights: Mapping[str, float]) -> float:
    """Cosine of the angle between two sparse term-weight vectors."""
    norm_d = math.sqrt(sum(w * w for w in doc_weights.values()))
    norm_q = math.sqrt(sum(w * w for w in query_weights.values()))
    if norm_d == 0.0 or norm_q == 0.0:
        raise ZeroVectorError("cosine similarity undefined for a zero-norm vector")
    dot = sum(w * query_weights.get(term, 0.0) for term, w in sorted(doc_weights.items()))
    return dot / (norm_d * norm_q)


def search(query: QueryVector, index: PostingsIndex,
           limit: int | None = None) -> list[ScoredDoc]:
    """Rank all documents with similarity > 0, term-at-a-time.

    Only documents sharing at least one query term are scored, which is
    equivalent to exhaustive scoring because disjoint supports score 0.
    Ties break on ascending doc_id for cross-platform determinism.
    """
    if limit is not None and limit < 1:
        raise ValueError(f"limit must be positive, got {limit}")
    if not query.weights:
        return []
    acc: dict[str, float] = {}
    for term, q_weight in query.weights.items():
        idf = index.idf(term)
        for doc_id, tf in index.postings[term]:
            acc[doc_id] = acc.get(doc_id, 0.0) + tf * idf * q_weight
    scored = []
    for doc_id in sorted(acc):
        doc_norm = index.doc_norms.get(doc_id, 0.0)
        if doc_norm == 0.0:
            continue
        score = acc[doc_id] / (doc_norm * query.norm)
        if score > 0.0:
            scored.append((doc_id, score))
    scored.sort(key=lambda item: (-item[1], item[0]))
    if limit is not None:
        scored = scored[:limit]
    return [ScoredDoc(doc_id=d, score=s, rank=i + 1)
            for i, (d, s) in enumerate(scored)]


def format_run_line(query_id: str, hit: ScoredDoc, run_tag: str) -> str:
    """One result in the standard six-column run format."""
    return f"{query_id} Q0 {hit.doc_id} {hit.rank} {hit.score:.6f} {run_tag}"


def write_run_file(path, rows: Iterable[tuple[str, ScoredDoc, str]]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for query_id, hit, run_tag in rows:
            fh.write(format_run_line(query_id, hit, run_tag) + "\n")
