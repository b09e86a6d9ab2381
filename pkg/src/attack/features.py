"""
Feature profiles and similarity (attack step 3).

A profile has four parts, compared pairwise by cosine:

  text_vector       L2-normalized tf-idf of the user's concatenated posts
  nbr_degree_hist   L1-normalized histogram of the neighbors' degrees
  nbr_text_vector   L2-normalized sum of the neighbors' text vectors
  nbr_degree_hist2  L1-normalized histogram of the 2-hop degree list

The combined score is the weighted sum of the four cosines. All inputs are
non-negative, so every cosine and the score lie in [0, 1].
"""

import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from src.attack.config import N_BUCKETS, DegreeBuckets
from src.core.model import Post, UserId
from src.core.text import CorpusStats, l2_normalize, tfidf_vector

SparseVector = Mapping[str, float]


def _zeros() -> np.ndarray:
    return np.zeros(N_BUCKETS, dtype=np.float64)


@dataclass(frozen=True, eq=False)
class FeatureProfile:
    text_vector: SparseVector = field(default_factory=dict)
    nbr_degree_hist: np.ndarray = field(default_factory=_zeros)
    nbr_text_vector: SparseVector = field(default_factory=dict)
    nbr_degree_hist2: np.ndarray = field(default_factory=_zeros)

    def is_zero(self) -> bool:
        return (
            not self.text_vector
            and not self.nbr_text_vector
            and not self.nbr_degree_hist.any()
            and not self.nbr_degree_hist2.any()
        )


def text_vector(posts: Iterable[Post], idf_source: CorpusStats) -> dict[str, float]:
    return l2_normalize(tfidf_vector((t for p in posts for t in p.tokens), idf_source))


def degree_histogram(degrees: Iterable[int], buckets: DegreeBuckets = DegreeBuckets.LOG2) -> np.ndarray:
    """L1-normalized bucket counts; all zeros for an empty degree list."""
    hist = _zeros()
    for d in degrees:
        hist[buckets.index(d)] += 1.0
    total = hist.sum()
    if total > 0:
        hist /= total
    return hist


def sum_vectors(vectors: Iterable[SparseVector]) -> dict[str, float]:
    acc: dict[str, float] = {}
    for vec in vectors:
        for token, w in vec.items():
            acc[token] = acc.get(token, 0.0) + w
    return acc


def build_feature_profile(
    posts: Sequence[Post],
    neighbors: Sequence[UserId],
    neighbor_posts: Mapping[UserId, Sequence[Post]],
    neighbor_degrees: Mapping[UserId, int],
    neighbor2_degrees: Sequence[int],
    idf_source: CorpusStats,
    buckets: DegreeBuckets = DegreeBuckets.LOG2,
    neighbor_vectors: Mapping[UserId, SparseVector] | None = None,
) -> FeatureProfile:
    """
    ``neighbor_vectors`` may carry already computed text vectors of the
    neighbors (same idf source); missing ones are computed from
    ``neighbor_posts``.
    """
    known = neighbor_vectors or {}
    nbr_vectors = [
        known[v] if v in known else text_vector(neighbor_posts.get(v, ()), idf_source) for v in neighbors
    ]
    return FeatureProfile(
        text_vector=text_vector(posts, idf_source),
        nbr_degree_hist=degree_histogram((neighbor_degrees[v] for v in neighbors), buckets),
        nbr_text_vector=l2_normalize(sum_vectors(nbr_vectors)),
        nbr_degree_hist2=degree_histogram(neighbor2_degrees, buckets),
    )


def cosine(a: SparseVector | np.ndarray, b: SparseVector | np.ndarray) -> float:
    """Cosine similarity; 0 when either side is all-zero. Clipped to [0, 1]."""
    if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
        a = np.asarray(a, dtype=np.float64)
        b = np.asarray(b, dtype=np.float64)
        na = math.sqrt(float(np.dot(a, a)))
        nb = math.sqrt(float(np.dot(b, b)))
        if na == 0.0 or nb == 0.0:
            return 0.0
        dot = float(np.dot(a, b))
    else:
        if not a or not b:
            return 0.0
        # sorted shared keys keep the float sum identical for (a, b) and (b, a)
        shared = sorted(a.keys() & b.keys())
        dot = math.fsum(a[t] * b[t] for t in shared)
        na = math.sqrt(math.fsum(w * w for w in a.values()))
        nb = math.sqrt(math.fsum(w * w for w in b.values()))
        if na == 0.0 or nb == 0.0:
            return 0.0
    return min(1.0, max(0.0, dot / (na * nb)))


def component_similarities(u: FeatureProfile, c: FeatureProfile) -> tuple[float, float, float, float]:
    return (
        cosine(u.text_vector, c.text_vector),
        cosine(u.nbr_degree_hist, c.nbr_degree_hist),
        cosine(u.nbr_text_vector, c.nbr_text_vector),
        cosine(u.nbr_degree_hist2, c.nbr_degree_hist2),
    )


def score_candidate(profile_u: FeatureProfile, profile_c: FeatureProfile, weights: Sequence[float]) -> float:
    sims = component_similarities(profile_u, profile_c)
    return math.fsum(w * s for w, s in zip(weights, sims))
