"""Semantic text search with ontology-driven query expansion.

Builds a stemmed tf.idf inverted index, expands natural-language queries
with latent ontology entities (query-oriented constrained spreading
activation, plus a distance-1 baseline), ranks documents by cosine
similarity, and scores runs with standard retrieval measures.
"""

__version__ = "0.1.0"

from latentsearch.engine import SearchEngine, load_engine
from latentsearch.expansion import expand_query_csa, expand_query_qocsa
from latentsearch.indexing import Document, PostingsIndex, build_index, load_index, save_index
from latentsearch.ontology import Ontology, load_ontology
from latentsearch.ranking import QueryVector, ScoredDoc, cosine, search, weight_query

__all__ = [
    "Document",
    "Ontology",
    "PostingsIndex",
    "QueryVector",
    "ScoredDoc",
    "SearchEngine",
    "build_index",
    "cosine",
    "expand_query_csa",
    "expand_query_qocsa",
    "load_engine",
    "load_index",
    "load_ontology",
    "save_index",
    "search",
    "weight_query",
]
