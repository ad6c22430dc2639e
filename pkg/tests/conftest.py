from pathlib import Path

import pytest

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def fixture_ontology():
    from latentsearch.ontology import load_ontology
    return load_ontology(FIXTURES / "ontology.tsv")


@pytest.fixture(scope="session")
def fixture_index():
    from latentsearch.indexing import build_index, read_corpus
    return build_index(read_corpus(FIXTURES / "corpus"))


@pytest.fixture(scope="session")
def fixture_engine(fixture_index, fixture_ontology):
    from latentsearch.engine import SearchEngine
    return SearchEngine(index=fixture_index, ontology=fixture_ontology)
