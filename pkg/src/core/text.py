"""
Tokenization and tf-idf statistics.

The tokenizer is the only place text is normalized; every tf-idf number in
the package (revealing-post scores, platform search, feature vectors,
idf suppression) is computed from its output.

Conventions
-----------
idf(t) = ln(N / df(t)) where N is the number of documents and df(t) the
number of documents containing t. Documents without tokens still count in
N. What counts as a document is decided by the caller: posts for
revealing-post extraction and idf suppression, users with at least one post
(concatenated posts) for search and feature vectors.
"""

import math
import re
from collections import Counter
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from types import MappingProxyType

# Anything that is not a letter or digit separates tokens. "_" is a word
# character for \w, so it is listed explicitly.
_SPLIT = re.compile(r"[\W_]+", re.UNICODE)

MIN_TOKEN_LENGTH = 2


def tokenize(text: str) -> list[str]:
    """Lowercase, split on every non-alphanumeric codepoint, drop 1-char tokens."""
    return [tok for tok in _SPLIT.split(text.lower()) if len(tok) >= MIN_TOKEN_LENGTH]


def round_half_up(value: float) -> int:
    """Round to nearest integer, halves away from zero (never banker's rounding)."""
    return int(Decimal(repr(value)).quantize(Decimal(1), rounding=ROUND_HALF_UP))


@dataclass(frozen=True)
class CorpusStats:
    """Document count and document frequencies of a corpus."""

    n_documents: int
    document_frequency: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "document_frequency", MappingProxyType(dict(self.document_frequency)))

    def __reduce__(self):
        return (CorpusStats, (self.n_documents, dict(self.document_frequency)))

    @classmethod
    def from_documents(cls, documents: Iterable[Sequence[str]]) -> "CorpusStats":
        """Build from token sequences, one per document."""
        n = 0
        df: Counter[str] = Counter()
        for tokens in documents:
            n += 1
            df.update(set(tokens))
        return cls(n, df)

    @property
    def vocabulary(self) -> list[str]:
        return sorted(self.document_frequency)

    def idf(self, token: str) -> float:
        """ln(N/df); 0 for tokens the corpus has never seen."""
        df = self.document_frequency.get(token, 0)
        if df == 0:
            return 0.0
        return math.log(self.n_documents / df)


def term_frequencies(tokens: Iterable[str]) -> Counter[str]:
    return Counter(tokens)


def tfidf_vector(tokens: Iterable[str], stats: CorpusStats) -> dict[str, float]:
    """Raw tf-idf weights; zero weights are left out of the sparse map."""
    vector = {}
    for token, tf in sorted(term_frequencies(tokens).items()):
        weight = tf * stats.idf(token)
        if weight > 0.0:
            vector[token] = weight
    return vector


def l2_normalize(vector: Mapping[str, float]) -> dict[str, float]:
    norm = math.sqrt(sum(w * w for w in vector.values()))
    if norm == 0.0:
        return {}
    return {token: w / norm for token, w in vector.items()}
