"""Search engine facade: one loaded index plus an optional ontology.

Wires the three search models together: syntactic (no expansion),
csa (distance-1 spreading) and qocsa (query-oriented constrained
spreading). Instances are immutable and safe for concurrent searches.
"""

from dataclasses import dataclass
from pathlib import Path

from latentsearch.expansion import (
    METHOD_NONE,
    ExpansionResult,
    expand_query_csa,
    expand_query_qocsa,
)
from latentsearch.indexing import PostingsIndex, load_index
from latentsearch.ontology import Ontology, load_ontology
from latentsearch.ranking import ScoredDoc, search, weight_query
from latentsearch.textproc import analyze

METHODS = ("syntactic", "csa", "qocsa")


class EngineConfigError(ValueError):
    """A search method was requested without the resources it needs."""


@dataclass(frozen=True)
class SearchEngine:
    index: PostingsIndex
    ontology: Ontology | None = None

    def _check_method(self, method: str) -> None:
        if method not in METHODS:
            raise EngineConfigError(
                f"unknown method {method!r}; expected one of {METHODS}")
        if method in ("csa", "qocsa") and self.ontology is None:
            raise EngineConfigError(f"method {method!r} requires an ontology")

    def expand(self, query: str, method: str) -> ExpansionResult:
        self._check_method(method)
        if method == "qocsa":
            return expand_query_qocsa(query, self.ontology)
        if method == "csa":
            return expand_query_csa(query, self.ontology)
        terms = tuple(analyze(query))
        return ExpansionResult(
            query=query, original_terms=terms, forms=(), activated=(),
            expanded_terms=terms, method_tag=METHOD_NONE)

    def search(self, query: str, method: str = "syntactic",
               limit: int | None = None) -> tuple[ExpansionResult, list[ScoredDoc]]:
        expansion = self.expand(query, method)
        vector = weight_query(expansion.expanded_terms, self.index)
        return expansion, search(vector, self.index, limit=limit)


def load_engine(index_path: str | Path,
                ontology_path: str | Path | None = None) -> SearchEngine:
    ontology = load_ontology(ontology_path) if ontology_path else None
    return SearchEngine(index=load_index(index_path), ontology=ontology)


def read_queries(path: str | Path) -> list[tuple[str, str]]:
    """Parse a queries file of `query_id<TAB>text` lines."""
    queries = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            if "\t" not in line:
                raise ValueError(f"{path}:{lineno}: expected query_id<TAB>text")
            query_id, text = line.split("\t", 1)
            queries.append((query_id.strip(), text.strip()))
    return queries
