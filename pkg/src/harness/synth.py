"""
Synthetic heterogeneous social data with known structure-text coupling.

Graph
    Preferential attachment grown from a clique of ``edges_per_new_vertex``
    vertices; each new vertex links to that many existing vertices with
    probability proportional to their degree. |E| = m(n - m) + m(m - 1)/2.

Communities
    Clique vertices draw a community uniformly. Every later vertex, with
    probability 0.7, joins the community of one of the vertices it attached
    to (uniform pick), otherwise draws uniformly. Linked users therefore
    tend to share a community vocabulary.

Posts
    Each token is a personal term (10 per user, never shared) with
    probability ``personal_term_prob``; otherwise a community term (70%) or
    a shared term (30%), uniform within the chosen vocabulary.
"""

import logging
from dataclasses import dataclass

import networkx as nx
import numpy as np

from src.anonymizers.graph import check_seed, check_unit_interval
from src.core.errors import ConfigError, throw_exception
from src.core.model import Dataset, Graph, Post

logger = logging.getLogger(__name__)

PERSONAL_VOCABULARY = 10
SAME_COMMUNITY_PROB = 0.7
COMMUNITY_TERM_SHARE = 0.7


@dataclass(frozen=True)
class SynthConfig:
    n_users: int = 500
    edges_per_new_vertex: int = 4
    posts_per_user: int = 20
    tokens_per_post: int = 12
    vocab_shared: int = 2000
    vocab_per_community: int = 300
    n_communities: int = 10
    personal_term_prob: float = 0.3
    seed: int = 7

    def __post_init__(self) -> None:
        origin = "synth.SynthConfig()"
        for name in (
            "n_users",
            "edges_per_new_vertex",
            "posts_per_user",
            "tokens_per_post",
            "vocab_shared",
            "vocab_per_community",
            "n_communities",
        ):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                throw_exception(ConfigError, "OutOfRange", f"{name} must be an integer >= 1, got {value!r}", origin)
        object.__setattr__(self, "personal_term_prob", check_unit_interval("personal_term_prob", self.personal_term_prob, origin))
        check_seed(self.seed, origin)


def user_name(i: int) -> str:
    return f"user{i:05d}"


def personal_term(user: int, j: int) -> str:
    return f"p{user}x{j}"


def community_term(community: int, j: int) -> str:
    return f"c{community}w{j}"


def shared_term(j: int) -> str:
    return f"w{j}"


def grow_graph(n: int, m: int, seed: int) -> nx.Graph:
    """Preferential attachment from an m-clique (m=1: a single edge)."""
    if m >= n:
        throw_exception(
            ConfigError, "OutOfRange", f"edges_per_new_vertex ({m}) must be < n_users ({n})", "synth.generate_synthetic()"
        )
    initial = nx.complete_graph(m) if m >= 2 else None
    return nx.barabasi_albert_graph(n, m, seed=seed, initial_graph=initial)


def assign_communities(g: nx.Graph, m: int, n_communities: int, rng: np.random.Generator) -> list[int]:
    n = g.number_of_nodes()
    community = [0] * n
    # vertices of the initial graph (networkx starts m=1 from a 2-vertex star)
    seed_size = max(m, 2)
    for v in range(n):
        if v < seed_size:
            community[v] = int(rng.integers(n_communities))
            continue
        earlier = sorted(u for u in g.neighbors(v) if u < v)
        if earlier and rng.random() < SAME_COMMUNITY_PROB:
            community[v] = community[earlier[int(rng.integers(len(earlier)))]]
        else:
            community[v] = int(rng.integers(n_communities))
    return community


def generate_synthetic(config: SynthConfig) -> Dataset:
    """Public dataset, deterministic given ``config.seed``."""
    g = grow_graph(config.n_users, config.edges_per_new_vertex, config.seed)
    rng = np.random.default_rng(config.seed)
    community = assign_communities(g, config.edges_per_new_vertex, config.n_communities, rng)

    posts = []
    for user in range(config.n_users):
        name = user_name(user)
        for j in range(config.posts_per_user):
            tokens = []
            for _ in range(config.tokens_per_post):
                if rng.random() < config.personal_term_prob:
                    tokens.append(personal_term(user, int(rng.integers(PERSONAL_VOCABULARY))))
                elif rng.random() < COMMUNITY_TERM_SHARE:
                    tokens.append(community_term(community[user], int(rng.integers(config.vocab_per_community))))
                else:
                    tokens.append(shared_term(int(rng.integers(config.vocab_shared))))
            posts.append(Post(f"{name}-{j:04d}", name, " ".join(tokens)))

    graph = Graph.from_edges(
        ((user_name(u), user_name(v)) for u, v in g.edges()), (user_name(v) for v in g.nodes())
    )
    dataset = Dataset.build(graph, posts, "public")
    logger.info("generated %r (seed=%d)", dataset, config.seed)
    return dataset
