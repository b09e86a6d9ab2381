"""
Pseudonymized release of a public dataset (PII removal baseline).

Every user id is replaced by a fresh random pseudonym and every post id is
re-randomized; structure and text are copied verbatim. The bijection is
returned separately as ground truth and checked right away.
"""

import logging

import numpy as np

from src.anonymizers.graph import check_seed
from src.core.errors import EvaluationError, throw_exception
from src.core.model import Dataset, GroundTruth

logger = logging.getLogger(__name__)

PSEUDONYM_PREFIX = "anon"
POST_PREFIX = "post"


def _fresh_ids(count: int, prefix: str, taken: set[str], rng: np.random.Generator) -> list[str]:
    ids: list[str] = []
    seen: set[str] = set()
    while len(ids) < count:
        candidate = f"{prefix}{int(rng.integers(2**63)):016x}"
        if candidate in taken or candidate in seen:
            continue
        seen.add(candidate)
        ids.append(candidate)
    return ids


def make_release(public: Dataset, seed: int) -> tuple[Dataset, GroundTruth]:
    check_seed(seed, "release.make_release()")
    rng = np.random.default_rng(seed)
    users = list(public.vertices)
    posts = public.all_posts()
    taken = set(users) | {p.post_id for p in posts}

    pseudonyms = _fresh_ids(len(users), PSEUDONYM_PREFIX, taken, rng)
    to_anon = dict(zip(users, pseudonyms))
    post_ids = _fresh_ids(len(posts), POST_PREFIX, taken | set(pseudonyms), rng)

    graph = public.graph.relabel(to_anon)
    anon_posts = [p.renamed(pid, to_anon[p.author]) for p, pid in zip(posts, post_ids)]
    anon = Dataset.build(graph, anon_posts, "anon-release")
    truth = GroundTruth({anon_id: pub for pub, anon_id in to_anon.items()})

    check_release(public, anon, truth)
    logger.info("released %r under %d pseudonyms (seed=%d)", anon, len(truth), seed)
    return anon, truth


def check_release(public: Dataset, anon: Dataset, truth: GroundTruth) -> None:
    """Bijection over all users, edge-by-edge isomorphism, texts preserved."""
    origin = "release.check_release()"
    if not truth.covers(anon) or set(truth.inverse()) != set(public.vertices):
        throw_exception(EvaluationError, "BadRelease", "ground truth does not cover both vertex sets", origin)
    if anon.graph.edge_count != public.graph.edge_count:
        throw_exception(EvaluationError, "BadRelease", "edge counts differ", origin)
    for u, v in anon.graph.edges():
        if not public.graph.has_edge(truth[u], truth[v]):
            throw_exception(EvaluationError, "BadRelease", f"edge ({u}, {v}) has no public counterpart", origin)
    if anon.post_count() != public.post_count():
        throw_exception(EvaluationError, "BadRelease", "post counts differ", origin)
    for anon_user, anon_posts in anon.posts.items():
        public_texts = sorted(p.text for p in public.posts_of(truth[anon_user]))
        if sorted(p.text for p in anon_posts) != public_texts:
            throw_exception(EvaluationError, "BadRelease", f"posts of {anon_user} differ from the public user's", origin)
