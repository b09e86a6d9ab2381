"""
Public social media platform, query-only.

Owns the public dataset in indexed form and answers exactly three kinds of
calls: keyword search, neighbor lists and post lists (plus the aggregate
search statistics). The attack never sees the public Dataset object; it
holds a ``PlatformClient`` which forwards to the index, logs every call
and enforces the optional query budget.

Search convention
-----------------
Users are the documents (a profile is what search returns):

    N       = number of users with at least one post
    df(t)   = number of those users whose posts contain t
    idf(t)  = ln(N / df(t))
    score(u)= sum over query tokens q of tf(q, u) * idf(q)

Every occurrence of a token in the query contributes. Users scoring 0 are
left out; results are ordered by descending score, then ascending user id.

Persistence
-----------
``save_platform`` writes ``platform.h5``: root attributes ``magic``
(``DEANON-PLATFORM``), ``format_version`` and a JSON ``metadata`` string,
next to raw arrays for users, edges, posts and the inverted index. Loading
rebuilds the index from the stored dataset and refuses the file if the
stored postings differ.
"""

import hashlib
import json
import logging
from collections import Counter, defaultdict
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType

import h5py
import numpy as np

from src import __version__
from src.core.errors import ConfigError, DatasetFormatError, QueryBudgetExceeded, UnknownUserError, throw_exception
from src.core.io import EDGES_FILE, POSTS_FILE, load_dataset_dir
from src.core.model import Dataset, Graph, Post, UserId
from src.core.text import CorpusStats

logger = logging.getLogger(__name__)

PLATFORM_FILE = "platform.h5"
PLATFORM_MAGIC = "DEANON-PLATFORM"
PLATFORM_FORMAT_VERSION = 1


class PlatformIndex:
    """
    Immutable inverted index + adjacency over the public dataset.

    Nothing here is logged; callers go through ``PlatformClient``.
    """

    def __init__(
        self,
        adjacency: Graph,
        posts: dict[UserId, tuple[Post, ...]],
        postings: dict[str, tuple[tuple[UserId, int], ...]],
        doc_lengths: dict[UserId, int],
        stats: CorpusStats,
    ) -> None:
        self._graph = adjacency
        self._posts = MappingProxyType(posts)
        self._postings = MappingProxyType(postings)
        self._doc_lengths = MappingProxyType(doc_lengths)
        self._stats = stats

    def __reduce__(self):
        return (
            PlatformIndex,
            (self._graph, dict(self._posts), dict(self._postings), dict(self._doc_lengths), self._stats),
        )

    # ------------------------------------------------------------------
    # Read-only views
    # ------------------------------------------------------------------

    @property
    def users(self) -> tuple[UserId, ...]:
        return self._graph.vertices

    @property
    def corpus_stats(self) -> CorpusStats:
        return self._stats

    @property
    def doc_lengths(self) -> MappingProxyType:
        return self._doc_lengths

    def postings(self, token: str) -> tuple[tuple[UserId, int], ...]:
        return self._postings.get(token, ())

    def vocabulary(self) -> list[str]:
        return sorted(self._postings)

    def __contains__(self, user: object) -> bool:
        return user in self._graph

    def __len__(self) -> int:
        return len(self._graph)

    # ------------------------------------------------------------------
    # Query implementations
    # ------------------------------------------------------------------

    def scores(self, query: Sequence[str]) -> dict[UserId, float]:
        """Accumulate tf*idf per user in query order."""
        acc: dict[UserId, float] = defaultdict(float)
        for token in query:
            idf = self._stats.idf(token)
            for user, tf in self._postings.get(token, ()):
                acc[user] += tf * idf
        return acc

    def ranked(self, query: Sequence[str], limit: int) -> list[tuple[UserId, float]]:
        scored = [(u, s) for u, s in self.scores(query).items() if s > 0.0]
        scored.sort(key=lambda item: (-item[1], item[0]))
        return scored[:limit]

    def neighbors(self, user: UserId, origin: str) -> tuple[UserId, ...]:
        if user not in self._graph:
            throw_exception(UnknownUserError, "UnknownUser", f"no platform user {user!r}", origin)
        return self._graph.neighbors(user)

    def posts(self, user: UserId, origin: str) -> tuple[Post, ...]:
        if user not in self._graph:
            throw_exception(UnknownUserError, "UnknownUser", f"no platform user {user!r}", origin)
        return self._posts.get(user, ())

    def to_dataset(self, label: str = "public") -> Dataset:
        return Dataset(self._graph, dict(self._posts), label)


def build_index(public: Dataset) -> PlatformIndex:
    """Index the public dataset; users with at least one post are the documents."""
    tf_by_user: dict[UserId, Counter[str]] = {}
    for user, posts in public.posts.items():
        if not posts:
            continue
        tf_by_user[user] = Counter(t for p in posts for t in p.tokens)

    postings: dict[str, list[tuple[UserId, int]]] = defaultdict(list)
    for user in sorted(tf_by_user):
        for token, tf in tf_by_user[user].items():
            postings[token].append((user, tf))

    frozen = {token: tuple(postings[token]) for token in sorted(postings)}
    stats = CorpusStats(len(tf_by_user), {token: len(plist) for token, plist in frozen.items()})
    doc_lengths = {user: sum(tf.values()) for user, tf in tf_by_user.items()}
    posts = {user: ps for user, ps in public.posts.items() if ps}

    index = PlatformIndex(public.graph, posts, frozen, doc_lengths, stats)
    logger.info("built platform index: %d users, %d searchable, %d terms", len(index), stats.n_documents, len(frozen))
    return index


# ----------------------------------------------------------------------
# Query log and client
# ----------------------------------------------------------------------


@dataclass
class QueryLog:
    """
    Append-only record of platform calls as (operation, argument digest).

    One log per worker; ``merge`` folds worker logs together in a fixed
    order.
    """

    entries: list[tuple[str, str]] = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.entries)

    def append(self, operation: str, digest: str) -> None:
        self.entries.append((operation, digest))

    def merge(self, other: "QueryLog") -> "QueryLog":
        return QueryLog(self.entries + other.entries)

    def by_operation(self) -> Counter[str]:
        return Counter(op for op, _ in self.entries)


def _digest(*parts: object) -> str:
    h = hashlib.blake2b(digest_size=8)
    for part in parts:
        h.update(str(part).encode("utf-8"))
        h.update(b"\x00")
    return h.hexdigest()


class PlatformClient:
    """
    The only handle the attack receives.

    Parameters
    ----------
    index:
        Platform to query.
    budget:
        Maximum calls between two ``reset_budget`` calls; None = unlimited.
    log:
        Shared log to append to; a fresh one is created when omitted.
    """

    def __init__(self, index: PlatformIndex, budget: int | None = None, log: QueryLog | None = None) -> None:
        if budget is not None and budget < 1:
            throw_exception(ConfigError, "BadBudget", f"query budget must be >= 1, got {budget}", "platform.PlatformClient()")
        self._index = index
        self._budget = budget
        self._spent = 0
        self.log = log if log is not None else QueryLog()

    def reset_budget(self) -> None:
        self._spent = 0

    @property
    def remaining(self) -> int | None:
        return None if self._budget is None else self._budget - self._spent

    def _record(self, operation: str, digest: str) -> None:
        if self._budget is not None and self._spent >= self._budget:
            throw_exception(
                QueryBudgetExceeded,
                "QueryBudgetExceeded",
                f"budget of {self._budget} calls spent, refused {operation}",
                f"platform.{operation}()",
            )
        self._spent += 1
        self.log.append(operation, digest)

    # ------------------------------------------------------------------
    # Platform calls
    # ------------------------------------------------------------------

    def search(self, query: Sequence[str], limit: int) -> list[tuple[UserId, float]]:
        """Ranked (user, score) pairs, at most ``limit``; empty query -> []."""
        if limit < 1:
            throw_exception(ConfigError, "BadLimit", f"limit must be >= 1, got {limit}", "platform.search()")
        self._record("search", _digest(limit, *query))
        if not query:
            return []
        return self._index.ranked(query, limit)

    def get_neighbors(self, user: UserId) -> tuple[UserId, ...]:
        self._record("get_neighbors", user)
        return self._index.neighbors(user, "platform.get_neighbors()")

    def get_posts(self, user: UserId) -> tuple[Post, ...]:
        self._record("get_posts", user)
        return self._index.posts(user, "platform.get_posts()")

    def corpus_stats(self) -> CorpusStats:
        self._record("corpus_stats", "")
        return self._index.corpus_stats


def search(index: PlatformIndex, query: Sequence[str], limit: int) -> list[UserId]:
    """Unlogged convenience wrapper returning only user ids."""
    return [user for user, _ in PlatformClient(index).search(query, limit)]


# ----------------------------------------------------------------------
# Persistence
# ----------------------------------------------------------------------


def _str_array(values: Sequence[str]) -> np.ndarray:
    return np.array(values, dtype=h5py.string_dtype(encoding="utf-8"))


def save_platform(index: PlatformIndex, directory: str | Path) -> Path:
    """Write ``platform.h5`` into ``directory`` and return its path."""
    origin = "platform.save_platform()"
    directory = Path(directory)
    path = directory / PLATFORM_FILE
    users = list(index.users)
    user_idx = {u: i for i, u in enumerate(users)}
    dataset = index.to_dataset()
    edges = np.array([(user_idx[u], user_idx[v]) for u, v in dataset.graph.edges()], dtype=np.int64).reshape(-1, 2)
    posts = dataset.all_posts()

    tokens = index.vocabulary()
    offsets = [0]
    posting_users: list[int] = []
    posting_tf: list[int] = []
    for token in tokens:
        for user, tf in index.postings(token):
            posting_users.append(user_idx[user])
            posting_tf.append(tf)
        offsets.append(len(posting_users))

    metadata = {
        "users": len(users),
        "edges": int(edges.shape[0]),
        "posts": len(posts),
        "terms": len(tokens),
        "writer": f"deanon-bench {__version__}",
    }
    try:
        directory.mkdir(parents=True, exist_ok=True)
        with h5py.File(path, "w") as f:
            f.attrs["magic"] = PLATFORM_MAGIC
            f.attrs["format_version"] = PLATFORM_FORMAT_VERSION
            f.attrs["metadata"] = json.dumps(metadata, sort_keys=True)

            def put(name: str, data: np.ndarray) -> None:
                f.create_dataset(name, data=data, track_times=False)

            put("users", _str_array(users))
            put("edges", edges)
            put("post_ids", _str_array([p.post_id for p in posts]))
            put("post_authors", np.array([user_idx[p.author] for p in posts], dtype=np.int64))
            put("post_texts", _str_array([p.text for p in posts]))
            put("terms", _str_array(tokens))
            put("posting_offsets", np.array(offsets, dtype=np.int64))
            put("posting_users", np.array(posting_users, dtype=np.int64))
            put("posting_tf", np.array(posting_tf, dtype=np.int64))
    except OSError as e:
        throw_exception(DatasetFormatError, "WriteFailed", f"{path}: {e}", origin)
    logger.info("saved platform index to %s (%s)", path, metadata)
    return path


def _decode(values: np.ndarray) -> list[str]:
    return [v.decode("utf-8") if isinstance(v, bytes) else str(v) for v in values]


def load_platform(directory: str | Path) -> PlatformIndex:
    """
    Load a platform directory.

    A directory holding ``platform.h5`` is read and verified; a directory
    holding ``edges.tsv`` + ``posts.jsonl`` is indexed in memory.
    """
    origin = "platform.load_platform()"
    directory = Path(directory)
    path = directory / PLATFORM_FILE
    if not path.exists():
        if (directory / EDGES_FILE).exists() and (directory / POSTS_FILE).exists():
            return build_index(load_dataset_dir(directory, "public"))
        throw_exception(DatasetFormatError, "MissingPlatform", f"{directory} holds neither {PLATFORM_FILE} nor a dataset", origin)

    try:
        with h5py.File(path, "r") as f:
            magic = f.attrs.get("magic")
            version = f.attrs.get("format_version")
            if magic != PLATFORM_MAGIC:
                throw_exception(DatasetFormatError, "BadMagic", f"{path}: magic {magic!r}", origin)
            if version != PLATFORM_FORMAT_VERSION:
                throw_exception(
                    DatasetFormatError,
                    "UnsupportedVersion",
                    f"{path}: format_version {version!r}, expected {PLATFORM_FORMAT_VERSION}",
                    origin,
                )
            users = _decode(f["users"][()])
            edges = f["edges"][()]
            post_ids = _decode(f["post_ids"][()])
            post_authors = f["post_authors"][()]
            post_texts = _decode(f["post_texts"][()])
            terms = _decode(f["terms"][()])
            offsets = f["posting_offsets"][()]
            posting_users = f["posting_users"][()]
            posting_tf = f["posting_tf"][()]
    except KeyError as e:
        throw_exception(DatasetFormatError, "MissingArray", f"{path}: {e}", origin)
    except OSError as e:
        throw_exception(DatasetFormatError, "ReadFailed", f"{path}: {e}", origin)

    graph = Graph.from_edges(((users[i], users[j]) for i, j in edges), users)
    posts = [Post(pid, users[a], text) for pid, a, text in zip(post_ids, post_authors, post_texts)]
    index = build_index(Dataset.build(graph, posts, "public"))

    stored = {
        term: tuple((users[posting_users[k]], int(posting_tf[k])) for k in range(offsets[i], offsets[i + 1]))
        for i, term in enumerate(terms)
    }
    if stored != {t: index.postings(t) for t in index.vocabulary()}:
        throw_exception(DatasetFormatError, "CorruptIndex", f"{path}: stored postings differ from the stored posts", origin)
    return index
