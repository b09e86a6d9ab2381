"""
Canonical data types shared by every module.

All types are immutable after construction: adjacency lists are sorted
tuples behind read-only mappings, posts per user are sorted tuples. Every
construction path (loading, synthesis, anonymization, pseudonymization)
goes through ``Graph.from_edges`` / ``Dataset.build`` so the invariants
below are checked in one place.

Graph invariants
----------------
  - symmetric: v in adj(u) <=> u in adj(v)
  - no self-loops, no duplicate edges
  - edge_count == sum(len(adj(u))) / 2
"""

from collections import defaultdict
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from types import MappingProxyType

import networkx as nx

from src.core.errors import DatasetFormatError, EvaluationError, throw_exception
from src.core.text import tokenize

# Opaque UTF-8 identifier (pseudonym or real handle)
UserId = str

_RESERVED = ("\t", "\n", "\r")


def validate_user_id(user: str, origin: str = "model.validate_user_id()") -> str:
    if not isinstance(user, str) or not user:
        throw_exception(DatasetFormatError, "BadUserId", f"user id must be a non-empty string, got {user!r}", origin)
    if any(ch in user for ch in _RESERVED):
        throw_exception(DatasetFormatError, "BadUserId", f"user id {user!r} contains a tab or newline", origin)
    return user


@dataclass(frozen=True)
class Post:
    """One post. ``tokens`` is derived from ``text`` and never passed in."""

    post_id: str
    author: UserId
    text: str
    tokens: tuple[str, ...] = field(init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        validate_user_id(self.author, "model.Post()")
        if not self.post_id:
            throw_exception(DatasetFormatError, "BadPostId", f"empty post_id for author {self.author!r}", "model.Post()")
        object.__setattr__(self, "tokens", tuple(tokenize(self.text)))

    def with_tokens(self, tokens: Iterable[str]) -> "Post":
        """Same post_id and author, text replaced by the space-joined tokens."""
        return Post(self.post_id, self.author, " ".join(tokens))

    def renamed(self, post_id: str, author: UserId) -> "Post":
        return Post(post_id, author, self.text)


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected simple graph over string vertex ids."""

    adjacency: Mapping[UserId, tuple[UserId, ...]]
    edge_count: int

    def __post_init__(self) -> None:
        if not isinstance(self.adjacency, MappingProxyType):
            object.__setattr__(self, "adjacency", MappingProxyType(dict(self.adjacency)))

    def __reduce__(self):
        # mappingproxy does not pickle; ship a plain dict to worker processes
        return (Graph, (dict(self.adjacency), self.edge_count))

    # ------------------------------------------------------------------
    # Construction
    # ------------------------------------------------------------------

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[UserId, UserId]], vertices: Iterable[UserId] = ()) -> "Graph":
        """Build from an edge iterable; duplicates and self-loops are dropped."""
        adj: dict[UserId, set[UserId]] = {}
        for v in vertices:
            adj.setdefault(validate_user_id(v, "model.Graph.from_edges()"), set())
        for u, v in edges:
            validate_user_id(u, "model.Graph.from_edges()")
            validate_user_id(v, "model.Graph.from_edges()")
            adj.setdefault(u, set())
            adj.setdefault(v, set())
            if u == v:
                continue
            adj[u].add(v)
            adj[v].add(u)
        return cls._from_sets(adj)

    @classmethod
    def _from_sets(cls, adj: Mapping[UserId, set[UserId]]) -> "Graph":
        frozen = {u: tuple(sorted(adj[u])) for u in sorted(adj)}
        edge_count = sum(len(nbrs) for nbrs in frozen.values()) // 2
        return cls(MappingProxyType(frozen), edge_count)

    @classmethod
    def empty(cls) -> "Graph":
        return cls(MappingProxyType({}), 0)

    @classmethod
    def from_networkx(cls, g: nx.Graph) -> "Graph":
        return cls.from_edges(((str(u), str(v)) for u, v in g.edges()), (str(v) for v in g.nodes()))

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.adjacency)
        g.add_edges_from(self.edges())
        return g

    # ------------------------------------------------------------------
    # Queries
    # ------------------------------------------------------------------

    @property
    def vertices(self) -> tuple[UserId, ...]:
        return tuple(self.adjacency)

    def __contains__(self, user: object) -> bool:
        return user in self.adjacency

    def __len__(self) -> int:
        return len(self.adjacency)

    def neighbors(self, user: UserId) -> tuple[UserId, ...]:
        return self.adjacency[user]

    def degree(self, user: UserId) -> int:
        return len(self.adjacency[user])

    def degrees(self) -> dict[UserId, int]:
        return {u: len(nbrs) for u, nbrs in self.adjacency.items()}

    def has_edge(self, u: UserId, v: UserId) -> bool:
        nbrs = self.adjacency.get(u, ())
        return v in nbrs

    def edges(self) -> Iterator[tuple[UserId, UserId]]:
        """Each undirected edge once as (u, v) with u < v, in sorted order."""
        for u, nbrs in self.adjacency.items():
            for v in nbrs:
                if u < v:
                    yield u, v

    def edge_set(self) -> frozenset[tuple[UserId, UserId]]:
        return frozenset(self.edges())

    def relabel(self, mapping: Mapping[UserId, UserId]) -> "Graph":
        return Graph.from_edges(
            ((mapping[u], mapping[v]) for u, v in self.edges()),
            (mapping[u] for u in self.adjacency),
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return dict(self.adjacency) == dict(other.adjacency)

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"Graph(vertices={len(self)}, edges={self.edge_count})"


@dataclass(frozen=True, eq=False)
class Dataset:
    """Graph + posts. ``label`` is informational and ignored by equality."""

    graph: Graph
    posts: Mapping[UserId, tuple[Post, ...]]
    label: str = ""

    def __post_init__(self) -> None:
        if not isinstance(self.posts, MappingProxyType):
            object.__setattr__(self, "posts", MappingProxyType(dict(self.posts)))

    def __reduce__(self):
        return (Dataset, (self.graph, dict(self.posts), self.label))

    @classmethod
    def build(cls, graph: Graph, posts: Iterable[Post], label: str = "") -> "Dataset":
        """Group posts by author (sorted by post_id) and add authors to the vertex set."""
        by_author: dict[UserId, list[Post]] = defaultdict(list)
        seen: set[str] = set()
        for post in posts:
            if post.post_id in seen:
                throw_exception(
                    DatasetFormatError, "DuplicatePostId", f"post_id {post.post_id!r} occurs twice", "model.Dataset.build()"
                )
            seen.add(post.post_id)
            by_author[post.author].append(post)

        missing = [a for a in by_author if a not in graph]
        if missing:
            graph = Graph.from_edges(graph.edges(), [*graph.vertices, *missing])

        frozen = {a: tuple(sorted(by_author[a], key=lambda p: p.post_id)) for a in sorted(by_author)}
        return cls(graph, MappingProxyType(frozen), label)

    @property
    def vertices(self) -> tuple[UserId, ...]:
        return self.graph.vertices

    def degree(self, user: UserId) -> int:
        return self.graph.degree(user)

    def posts_of(self, user: UserId) -> tuple[Post, ...]:
        return self.posts.get(user, ())

    def all_posts(self) -> list[Post]:
        """Every post, ordered by (author, post_id)."""
        return [p for author in self.posts for p in self.posts[author]]

    def post_count(self) -> int:
        return sum(len(ps) for ps in self.posts.values())

    def with_graph(self, graph: Graph, label: str | None = None) -> "Dataset":
        return Dataset.build(graph, self.all_posts(), self.label if label is None else label)

    def with_posts(self, posts: Iterable[Post], label: str | None = None) -> "Dataset":
        return Dataset.build(self.graph, posts, self.label if label is None else label)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return self.graph == other.graph and dict(self.posts) == dict(other.posts)

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"Dataset(label={self.label!r}, users={len(self.graph)}, edges={self.graph.edge_count}, posts={self.post_count()})"


@dataclass(frozen=True, eq=False)
class GroundTruth:
    """Bijection anonymized UserId -> public UserId. Evaluation only."""

    mapping: Mapping[UserId, UserId]

    def __post_init__(self) -> None:
        frozen = dict(self.mapping)
        if len(set(frozen.values())) != len(frozen):
            throw_exception(EvaluationError, "NotBijective", "two anonymized users map to the same public user", "model.GroundTruth()")
        object.__setattr__(self, "mapping", MappingProxyType(dict(sorted(frozen.items()))))

    def __reduce__(self):
        return (GroundTruth, (dict(self.mapping),))

    def __getitem__(self, anon_user: UserId) -> UserId:
        return self.mapping[anon_user]

    def __contains__(self, anon_user: object) -> bool:
        return anon_user in self.mapping

    def __len__(self) -> int:
        return len(self.mapping)

    def items(self):
        return self.mapping.items()

    def inverse(self) -> dict[UserId, UserId]:
        return {pub: anon for anon, pub in self.mapping.items()}

    def covers(self, dataset: Dataset) -> bool:
        return set(self.mapping) == set(dataset.vertices)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GroundTruth):
            return NotImplemented
        return dict(self.mapping) == dict(other.mapping)

    __hash__ = None  # type: ignore[assignment]
