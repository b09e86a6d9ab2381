"""
Textual anonymization.

idf_suppression
    Removes the round(rate * |vocabulary|) terms with the highest idf (posts
    are the documents, ties broken lexicographically) from every post.
    These are exactly the terms the attack's revealing-post step ranks on.

random_substitution
    Replaces each token position, with probability ``rate``, by a term drawn
    uniformly from the corpus vocabulary. Token counts per post are kept.

Neither technique creates or deletes posts; post ids and authors are
untouched. Anonymized text is the space-joined token list so that
``post.tokens == tokenize(post.text)`` still holds.
"""

import logging
from collections.abc import Iterable
from dataclasses import dataclass
from enum import Enum

import numpy as np

from src.anonymizers.graph import check_seed, check_unit_interval
from src.core.errors import ConfigError, throw_exception
from src.core.model import Dataset, Post
from src.core.text import CorpusStats, round_half_up

logger = logging.getLogger(__name__)


class TextTechnique(str, Enum):
    IDF_SUPPRESSION = "idf_suppression"
    RANDOM_SUBSTITUTION = "random_substitution"


@dataclass(frozen=True)
class TextAnonConfig:
    technique: TextTechnique = TextTechnique.IDF_SUPPRESSION
    rate: float = 0.2
    seed: int = 0

    def __post_init__(self) -> None:
        origin = "anonymize_text.TextAnonConfig()"
        try:
            object.__setattr__(self, "technique", TextTechnique(self.technique))
        except ValueError:
            throw_exception(ConfigError, "UnknownTechnique", f"text technique {self.technique!r}", origin)
        object.__setattr__(self, "rate", check_unit_interval("rate", self.rate, origin))
        check_seed(self.seed, origin)


def _ordered(posts: Iterable[Post]) -> list[Post]:
    return sorted(posts, key=lambda p: (p.author, p.post_id))


def suppressed_terms(posts: Iterable[Post], rate: float) -> list[str]:
    """The terms idf_suppression removes, highest idf first."""
    stats = CorpusStats.from_documents(p.tokens for p in posts)
    vocabulary = stats.vocabulary
    count = round_half_up(rate * len(vocabulary))
    ranked = sorted(vocabulary, key=lambda t: (-stats.idf(t), t))
    return ranked[:count]


def idf_suppression(posts: Iterable[Post], rate: float) -> list[Post]:
    origin = "anonymize_text.idf_suppression()"
    check_unit_interval("rate", rate, origin)
    posts = _ordered(posts)
    removed = set(suppressed_terms(posts, rate))
    if not removed:
        return posts
    logger.info("idf_suppression: removing %d term(s) (rate=%s)", len(removed), rate)
    return [p.with_tokens(t for t in p.tokens if t not in removed) for p in posts]


def random_substitution(posts: Iterable[Post], rate: float, seed: int) -> list[Post]:
    origin = "anonymize_text.random_substitution()"
    check_unit_interval("rate", rate, origin)
    check_seed(seed, origin)
    posts = _ordered(posts)
    if rate == 0.0:
        return posts

    vocabulary = sorted({t for p in posts for t in p.tokens})
    total = sum(len(p.tokens) for p in posts)
    if not vocabulary:
        throw_exception(ConfigError, "EmptyVocabulary", f"cannot substitute at rate {rate} from an empty vocabulary", origin)

    rng = np.random.default_rng(seed)
    replace = rng.random(total) < rate
    draws = rng.integers(len(vocabulary), size=int(replace.sum()))

    out = []
    pos = 0
    drawn = 0
    for p in posts:
        tokens = list(p.tokens)
        for i in range(len(tokens)):
            if replace[pos]:
                tokens[i] = vocabulary[draws[drawn]]
                drawn += 1
            pos += 1
        out.append(p.with_tokens(tokens))
    logger.info("random_substitution: replaced %d of %d token(s) (rate=%s, seed=%d)", drawn, total, rate, seed)
    return out


def anonymize_posts(dataset: Dataset, config: TextAnonConfig) -> Dataset:
    """Return a copy of ``dataset`` with anonymized posts and the same graph."""
    if config.technique is TextTechnique.IDF_SUPPRESSION:
        posts = idf_suppression(dataset.all_posts(), config.rate)
    else:
        posts = random_substitution(dataset.all_posts(), config.rate, config.seed)
    return dataset.with_posts(posts)
