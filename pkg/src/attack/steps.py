"""
Attack steps 1 and 2.

Step 1 ranks the target's own posts by mean tf-idf against the anonymized
corpus (posts are the documents) and keeps the top k as the most revealing
information. Step 2 sends each revealing post to the platform search and
merges the ranked lists into one candidate set.
"""

import logging
from collections import defaultdict
from collections.abc import Iterable, Sequence

from src.Platform import PlatformClient
from src.core.errors import ConfigError, throw_exception
from src.core.model import Post, UserId
from src.core.text import CorpusStats, term_frequencies

logger = logging.getLogger(__name__)


def post_corpus_stats(posts: Iterable[Post]) -> CorpusStats:
    """idf statistics with every post as one document."""
    return CorpusStats.from_documents(p.tokens for p in posts)


def post_score(post: Post, stats: CorpusStats) -> float:
    """Sum over distinct terms of tf*idf, divided by the post's token count."""
    if not post.tokens:
        return 0.0
    total = 0.0
    for term, tf in sorted(term_frequencies(post.tokens).items()):
        total += tf * stats.idf(term)
    return total / len(post.tokens)


def extract_revealing_posts(
    target_posts: Sequence[Post],
    anon_corpus: CorpusStats | Iterable[Post],
    k: int,
) -> list[Post]:
    """Top-k posts by score, ties by ascending post_id."""
    if not isinstance(k, int) or k < 1:
        throw_exception(ConfigError, "OutOfRange", f"k must be >= 1, got {k!r}", "attack.extract_revealing_posts()")
    stats = anon_corpus if isinstance(anon_corpus, CorpusStats) else post_corpus_stats(anon_corpus)
    ranked = sorted(target_posts, key=lambda p: (-post_score(p, stats), p.post_id))
    return ranked[:k]


def select_candidates(platform: PlatformClient, revealing: Sequence[Post], m: int) -> list[tuple[UserId, float]]:
    """
    One search per revealing post (limit m); scores summed per user across
    queries; top m kept, ties by ascending user id.
    """
    if not isinstance(m, int) or m < 1:
        throw_exception(ConfigError, "OutOfRange", f"m must be >= 1, got {m!r}", "attack.select_candidates()")
    merged: dict[UserId, float] = defaultdict(float)
    for post in revealing:
        for user, score in platform.search(list(post.tokens), m):
            merged[user] += score
    ranked = sorted(merged.items(), key=lambda item: (-item[1], item[0]))
    return ranked[:m]
