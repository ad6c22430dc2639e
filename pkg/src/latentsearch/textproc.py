"""Text analysis pipeline: tokenization, stop filtering, stemming.

The same pipeline is applied to documents and to queries so that both
sides of the retrieval match live in one term space.
"""

import re
from functools import lru_cache
from importlib import resources

from latentsearch.porter import porter_stem

# Alphanumeric runs, Unicode-aware; underscore excluded, digits kept.
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def tokenize(text: str) -> list[str]:
    """Lowercase and split on non-alphanumeric boundaries; drops empties."""
    return _TOKEN_RE.findall(text.lower())


@lru_cache(maxsize=1)
def stopwords() -> frozenset[str]:
    """The fixed English stop list shipped with the package."""
    data = resources.files("latentsearch.data").joinpath("stopwords_en.txt")
    words = []
    for line in data.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.append(line)
    return frozenset(words)


def normalize(tokens: list[str]) -> list[str]:
    """Stop-filter then Porter-stem a list of lowercase tokens."""
    stopset = stopwords()
    return [porter_stem(tok) for tok in tokens if tok not in stopset]


def analyze(text: str) -> list[str]:
    """Full pipeline: tokenize + normalize raw text into index terms."""
    return normalize(tokenize(text))
