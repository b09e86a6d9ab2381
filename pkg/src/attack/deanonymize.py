"""
End-to-end de-anonymization of anonymized users.

Information boundary
--------------------
An ``Adversary`` is bound to the anonymized dataset, a ``PlatformClient``
and an ``AttackConfig``. It never receives ground truth or the public
dataset; everything it learns about real profiles arrives through logged
platform calls. Worker adversaries share search statistics that the parent
fetched with one logged call.

Caching
-------
Within one target every platform response is fetched once. Across targets
only derived vectors of platform users are memoized, never the responses:
each target still issues every call its profiles need, so
``queries_used`` depends on the target alone and results are identical for
any number of workers.
"""

import logging
from collections.abc import Sequence

import numpy as np
from multiprocess import Pool

from src.Platform import PlatformClient, PlatformIndex, QueryLog
from src.attack.config import AttackConfig
from src.attack.features import FeatureProfile, build_feature_profile, score_candidate, text_vector
from src.attack.results import MappingResult
from src.attack.steps import extract_revealing_posts, post_corpus_stats, select_candidates
from src.core.errors import ConfigError, QueryBudgetExceeded, UnknownUserError, throw_exception
from src.core.model import Dataset, GroundTruth, Post, UserId
from src.core.text import CorpusStats

logger = logging.getLogger(__name__)


def _check_boundary(*inputs: object) -> None:
    for item in inputs:
        if isinstance(item, GroundTruth):
            raise AssertionError("ground truth must never reach the attack")
        if isinstance(item, PlatformIndex):
            raise AssertionError("the attack queries the platform through a PlatformClient only")


class _TargetSession:
    """Per-target response memo in front of the platform client."""

    def __init__(self, platform: PlatformClient) -> None:
        self._platform = platform
        self._neighbors: dict[UserId, tuple[UserId, ...]] = {}
        self._posts: dict[UserId, tuple[Post, ...]] = {}

    def neighbors(self, user: UserId) -> tuple[UserId, ...]:
        if user not in self._neighbors:
            self._neighbors[user] = self._platform.get_neighbors(user)
        return self._neighbors[user]

    def posts(self, user: UserId) -> tuple[Post, ...]:
        if user not in self._posts:
            self._posts[user] = self._platform.get_posts(user)
        return self._posts[user]


class Adversary:
    """
    Query-only attacker.

    Parameters
    ----------
    anon:
        The anonymized release under attack.
    platform:
        Client of the public platform; its log records every call.
    config:
        Attack parameters.
    platform_stats:
        Search statistics already fetched through a client of the same
        platform; when omitted they are requested from ``platform``.
    """

    def __init__(
        self,
        anon: Dataset,
        platform: PlatformClient,
        config: AttackConfig,
        platform_stats: CorpusStats | None = None,
    ) -> None:
        _check_boundary(anon, platform, config, platform_stats)
        self.anon = anon
        self.platform = platform
        self.config = config

        # ------------------------------------------------------------------
        # Statistics the adversary can compute or ask for
        # ------------------------------------------------------------------
        self._post_stats = post_corpus_stats(anon.all_posts())
        self._anon_user_stats = CorpusStats.from_documents(
            [t for p in posts for t in p.tokens] for posts in anon.posts.values() if posts
        )
        self._platform_stats = platform.corpus_stats() if platform_stats is None else platform_stats

        self._anon_vectors: dict[UserId, dict[str, float]] = {}
        self._platform_vectors: dict[UserId, dict[str, float]] = {}
        self._platform_profiles: dict[UserId, FeatureProfile] = {}

    # ------------------------------------------------------------------
    # Profiles
    # ------------------------------------------------------------------

    def _anon_vector(self, user: UserId) -> dict[str, float]:
        if user not in self._anon_vectors:
            self._anon_vectors[user] = text_vector(self.anon.posts_of(user), self._anon_user_stats)
        return self._anon_vectors[user]

    def target_profile(self, target: UserId) -> FeatureProfile:
        graph = self.anon.graph
        neighbors = graph.neighbors(target)
        return build_feature_profile(
            posts=self.anon.posts_of(target),
            neighbors=neighbors,
            neighbor_posts={v: self.anon.posts_of(v) for v in neighbors},
            neighbor_degrees={v: graph.degree(v) for v in neighbors},
            neighbor2_degrees=[graph.degree(w) for v in neighbors for w in graph.neighbors(v) if w != target],
            idf_source=self._anon_user_stats,
            buckets=self.config.histogram_buckets,
            neighbor_vectors={v: self._anon_vector(v) for v in neighbors},
        )

    def candidate_profile(self, candidate: UserId, session: _TargetSession) -> FeatureProfile:
        """Fetch everything the profile needs, then build it (or reuse it)."""
        posts = session.posts(candidate)
        neighbors = session.neighbors(candidate)
        neighbor_posts = {v: session.posts(v) for v in neighbors}
        neighbor_lists = {v: session.neighbors(v) for v in neighbors}
        two_hop = [len(session.neighbors(w)) for v in neighbors for w in neighbor_lists[v] if w != candidate]

        cached = self._platform_profiles.get(candidate)
        if cached is not None:
            return cached

        for v in neighbors:
            if v not in self._platform_vectors:
                self._platform_vectors[v] = text_vector(neighbor_posts[v], self._platform_stats)
        profile = build_feature_profile(
            posts=posts,
            neighbors=neighbors,
            neighbor_posts=neighbor_posts,
            neighbor_degrees={v: len(neighbor_lists[v]) for v in neighbors},
            neighbor2_degrees=two_hop,
            idf_source=self._platform_stats,
            buckets=self.config.histogram_buckets,
            neighbor_vectors=self._platform_vectors,
        )
        self._platform_profiles[candidate] = profile
        return profile

    # ------------------------------------------------------------------
    # Attack
    # ------------------------------------------------------------------

    def map_user(self, target: UserId) -> MappingResult:
        if target not in self.anon.graph:
            throw_exception(UnknownUserError, "UnknownTarget", f"{target!r} is not in the anonymized dataset", "attack.map_user()")

        self.platform.reset_budget()
        start = self.platform.log.count
        session = _TargetSession(self.platform)
        config = self.config

        revealing = extract_revealing_posts(self.anon.posts_of(target), self._post_stats, config.top_k_posts)
        scored: list[tuple[UserId, float]] = []
        try:
            candidates = select_candidates(self.platform, revealing, config.candidate_limit)
            profile_u = self.target_profile(target)
            for candidate, _ in candidates:
                profile_c = self.candidate_profile(candidate, session)
                scored.append((candidate, score_candidate(profile_u, profile_c, config.weights)))
        except QueryBudgetExceeded:
            logger.warning("query budget exhausted for %s after %d candidate(s)", target, len(scored))

        scored.sort(key=lambda item: (-item[1], item[0]))
        claimed, score = scored[0] if scored else (None, 0.0)
        result = MappingResult(
            target=target,
            claimed=claimed,
            score=score,
            ranked_candidates=tuple(scored),
            queries_used=self.platform.log.count - start,
        )
        logger.debug("mapped %s -> %s (score %.6f, %d queries)", target, claimed, score, result.queries_used)
        return result


def map_user(target: UserId, anon: Dataset, platform: PlatformClient, config: AttackConfig) -> MappingResult:
    """One-shot attack on a single target."""
    return Adversary(anon, platform, config).map_user(target)


# ----------------------------------------------------------------------
# Many targets, optionally in parallel
# ----------------------------------------------------------------------

_worker_adversary: Adversary | None = None


def _init_worker(anon: Dataset, index: PlatformIndex, config: AttackConfig, stats: CorpusStats) -> None:
    global _worker_adversary
    _worker_adversary = Adversary(anon, PlatformClient(index, budget=config.query_budget), config, stats)


def _attack_chunk(targets: list[UserId]) -> tuple[list[MappingResult], list[tuple[str, str]]]:
    adversary = _worker_adversary
    start = adversary.platform.log.count
    results = [adversary.map_user(t) for t in targets]
    return results, adversary.platform.log.entries[start:]


def sample_targets(anon: Dataset, sample: int | None, seed: int) -> list[UserId]:
    """All users, or ``sample`` of them chosen with a seeded draw; sorted."""
    users = sorted(anon.vertices)
    if sample is None or sample >= len(users):
        return users
    if sample < 1:
        throw_exception(ConfigError, "OutOfRange", f"sample must be >= 1, got {sample}", "attack.sample_targets()")
    rng = np.random.default_rng(seed)
    picked = rng.choice(len(users), size=sample, replace=False)
    return sorted(users[i] for i in picked)


def attack_all(
    anon: Dataset,
    index: PlatformIndex,
    config: AttackConfig,
    jobs: int = 1,
    targets: Sequence[UserId] | None = None,
) -> tuple[list[MappingResult], QueryLog]:
    """
    Run ``map_user`` for every target (default: every anonymized user).

    Results come back in ascending target order and do not depend on
    ``jobs``. The search statistics are requested once, before any target,
    so the returned log (that call, then the worker logs in chunk order)
    has the same length for every ``jobs``.
    """
    targets = sorted(anon.vertices) if targets is None else sorted(targets)
    if jobs < 1:
        throw_exception(ConfigError, "OutOfRange", f"jobs must be >= 1, got {jobs}", "attack.attack_all()")

    if jobs == 1 or len(targets) < 2:
        adversary = Adversary(anon, PlatformClient(index, budget=config.query_budget), config)
        results = [adversary.map_user(t) for t in targets]
        return results, adversary.platform.log

    n_chunks = min(len(targets), jobs * 4)
    chunks = [list(c) for c in np.array_split(np.array(targets, dtype=object), n_chunks)]
    parent = PlatformClient(index, budget=config.query_budget)
    stats = parent.corpus_stats()
    log = parent.log
    results = []
    with Pool(processes=jobs, initializer=_init_worker, initargs=(anon, index, config, stats)) as pool:
        for chunk_results, entries in pool.map(_attack_chunk, chunks):
            results.extend(chunk_results)
            log = log.merge(QueryLog(entries))
    logger.info("attacked %d target(s) with %d worker(s), %d platform call(s)", len(results), jobs, log.count)
    return results, log
