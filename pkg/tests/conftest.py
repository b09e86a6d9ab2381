"""
Shared pytest fixtures.

Small hand-checkable inputs (a star graph and a 3-post corpus), one small
synthetic instance generated once per session, and 100 seeded random
corpora for the oracle comparisons.
"""

import numpy as np
import pytest

from src.Platform import build_index
from src.core.model import Dataset, Graph, Post
from src.harness.release import make_release
from src.harness.synth import SynthConfig, generate_synthetic

TINY_SYNTH = SynthConfig(
    n_users=20,
    edges_per_new_vertex=2,
    posts_per_user=5,
    tokens_per_post=8,
    vocab_shared=200,
    vocab_per_community=40,
    n_communities=3,
    personal_term_prob=0.3,
    seed=3,
)


@pytest.fixture
def star_graph() -> Graph:
    """5-vertex star: center "c", leaves "l1".."l4"."""
    return Graph.from_edges([("c", f"l{i}") for i in range(1, 5)])


@pytest.fixture
def three_posts() -> list[Post]:
    return [
        Post("d1", "u1", "apple banana"),
        Post("d2", "u2", "apple cherry"),
        Post("d3", "u3", "banana banana"),
    ]


@pytest.fixture
def three_user_dataset(three_posts) -> Dataset:
    """One user per post, no edges."""
    return Dataset.build(Graph.empty(), three_posts, "three")


@pytest.fixture(scope="session")
def tiny_public() -> Dataset:
    return generate_synthetic(TINY_SYNTH)


@pytest.fixture(scope="session")
def tiny_release(tiny_public):
    """(anon, truth) pseudonymized copy of the tiny public dataset."""
    return make_release(tiny_public, 11)


@pytest.fixture(scope="session")
def tiny_index(tiny_public):
    return build_index(tiny_public)


def random_corpus(rng: np.random.Generator, max_posts: int = 50, n_authors: int = 10, n_terms: int = 20) -> list[Post]:
    """Up to ``max_posts`` posts over a small vocabulary so terms repeat."""
    posts = []
    for i in range(int(rng.integers(1, max_posts + 1))):
        author = f"u{int(rng.integers(n_authors))}"
        words = [f"w{int(t)}" for t in rng.integers(n_terms, size=int(rng.integers(1, 9)))]
        posts.append(Post(f"p{i:02d}", author, " ".join(words)))
    return posts


@pytest.fixture(scope="session")
def random_corpora() -> list[list[Post]]:
    rng = np.random.default_rng(2024)
    return [random_corpus(rng) for _ in range(100)]
