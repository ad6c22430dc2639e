"""Inverted index with tf.idf statistics over a document corpus.

A built ``PostingsIndex`` is immutable and safe for any number of
concurrent readers; construction is single-writer.
"""

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from latentsearch.textproc import analyze

INDEX_FORMAT_VERSION = "1"


class CorpusError(ValueError):
    """Raised for unusable corpus input (duplicate or malformed doc ids)."""


@dataclass
class Document:
    doc_id: str
    raw_text: str


def term_weight(tf: int, df: int, doc_count: int) -> float:
    """tf.idf weight: tf * log10(N/df).

    The weight is 0 exactly when df == N, so corpus-wide terms never
    contribute to retrieval.
    """
    if df <= 0 or df > doc_count:
        raise ValueError(f"invalid index statistics: df={df}, N={doc_count}")
    return tf * math.log10(doc_count / df)


@dataclass(frozen=True)
class PostingsIndex:
    """Term postings plus the corpus statistics needed for tf.idf scoring.

    postings maps term -> [(doc_id, tf), ...] sorted by doc_id; doc_norms
    holds the Euclidean norm of each document's weighted vector and omits
    documents whose vector is all-zero (every term occurring in all N
    documents), since those can never be retrieved.
    """

    doc_count: int
    postings: dict[str, list[tuple[str, int]]] = field(default_factory=dict)
    doc_freq: dict[str, int] = field(default_factory=dict)
    token_counts: dict[str, int] = field(default_factory=dict)
    doc_norms: dict[str, float] = field(default_factory=dict)

    @property
    def vocabulary(self):
        return self.doc_freq.keys()

    def idf(self, term: str) -> float:
        return math.log10(self.doc_count / self.doc_freq[term])


def _validate_doc_id(doc_id: str, seen: dict) -> None:
    if not doc_id or any(ch.isspace() for ch in doc_id):
        raise CorpusError(f"doc_id must be non-empty without whitespace: {doc_id!r}")
    if doc_id in seen:
        raise CorpusError(f"duplicate doc_id: {doc_id!r}")


def _finish_index(token_counts: dict[str, int],
                  raw_postings: dict[str, list[tuple[str, int]]]) -> PostingsIndex:
    doc_count = len(token_counts)
    postings: dict[str, list[tuple[str, int]]] = {}
    doc_freq: dict[str, int] = {}
    norms_sq: dict[str, float] = {}
    for term in sorted(raw_postings):
        plist = sorted(raw_postings[term])
        postings[term] = plist
        doc_freq[term] = len(plist)
        idf = math.log10(doc_count / len(plist))
        if idf <= 0.0:
            continue
        for doc_id, tf in plist:
            w = tf * idf
            norms_sq[doc_id] = norms_sq.get(doc_id, 0.0) + w * w
    doc_norms = {d: math.sqrt(v) for d, v in sorted(norms_sq.items()) if v > 0.0}
    return PostingsIndex(
        doc_count=doc_count,
        postings=postings,
        doc_freq=doc_freq,
        token_counts=token_counts,
        doc_norms=doc_norms,
    )


def build_index(docs: Iterable[Document]) -> PostingsIndex:
    """Tokenize, stop-filter, stem and index a stream of documents."""
    token_counts: dict[str, int] = {}
    raw_postings: dict[str, list[tuple[str, int]]] = {}
    for doc in docs:
        _validate_doc_id(doc.doc_id, token_counts)
        terms = analyze(doc.raw_text)
        token_counts[doc.doc_id] = len(terms)
        for term, tf in Counter(terms).items():
            raw_postings.setdefault(term, []).append((doc.doc_id, tf))
    return _finish_index(token_counts, raw_postings)


def save_index(index: PostingsIndex, path: str | Path) -> None:
    """Persist to a single text file: version line then one JSON record."""
    payload = {
        "doc_count": index.doc_count,
        "token_counts": index.token_counts,
        "postings": {t: [[d, tf] for d, tf in plist]
                     for t, plist in index.postings.items()},
    }
    body = json.dumps(payload, sort_keys=True, ensure_ascii=False,
                      separators=(",", ":"))
    Path(path).write_text(f"{INDEX_FORMAT_VERSION}\n{body}\n", encoding="utf-8")


def load_index(path: str | Path) -> PostingsIndex:
    text = Path(path).read_text(encoding="utf-8")
    version, _, body = text.partition("\n")
    if version.strip() != INDEX_FORMAT_VERSION:
        raise CorpusError(
            f"unsupported index format version {version.strip()!r} in {path}")
    payload = json.loads(body)
    token_counts = {d: int(c) for d, c in payload["token_counts"].items()}
    if len(token_counts) != int(payload["doc_count"]):
        raise CorpusError(f"corrupt index file: document count mismatch in {path}")
    raw_postings = {t: [(d, int(tf)) for d, tf in plist]
                    for t, plist in payload["postings"].items()}
    return _finish_index(token_counts, raw_postings)


def read_corpus_dir(path: str | Path) -> list[Document]:
    """Read every file under a directory; doc_id is the relative path."""
    root = Path(path)
    docs = []
    for file in sorted(p for p in root.rglob("*") if p.is_file()):
        docs.append(Document(doc_id=file.relative_to(root).as_posix(),
                             raw_text=file.read_text(encoding="utf-8")))
    return docs


def read_corpus_jsonl(path: str | Path) -> list[Document]:
    """Read a line-delimited records file with `doc_id` and `text` fields."""
    docs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
                docs.append(Document(doc_id=str(record["doc_id"]),
                                     raw_text=str(record["text"])))
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise CorpusError(f"{path}:{lineno}: bad corpus record: {exc}") from exc
    return docs


def read_corpus(path: str | Path) -> list[Document]:
    """Directory of plain-text files, or a JSONL records file."""
    p = Path(path)
    if p.is_dir():
        return read_corpus_dir(p)
    return read_corpus_jsonl(p)
