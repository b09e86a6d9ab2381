import pickle

import pytest

from src.core.errors import DatasetFormatError, EvaluationError
from src.core.model import Dataset, Graph, GroundTruth, Post


class TestGraph:

    def test_symmetric(self, star_graph):
        for u in star_graph.vertices:
            for v in star_graph.neighbors(u):
                assert u in star_graph.neighbors(v)

    def test_duplicates_and_loops_dropped(self):
        g = Graph.from_edges([("a", "b"), ("b", "a"), ("a", "a")])
        assert g.edge_count == 1
        assert g.neighbors("a") == ("b",)

    def test_edge_count_is_half_the_degree_sum(self, star_graph):
        assert star_graph.edge_count == sum(star_graph.degrees().values()) // 2 == 4

    def test_edges_sorted_once(self, star_graph):
        assert list(star_graph.edges()) == [("c", "l1"), ("c", "l2"), ("c", "l3"), ("c", "l4")]

    def test_isolated_vertex(self):
        g = Graph.from_edges([], ["solo"])
        assert g.degree("solo") == 0

    def test_tab_in_id_rejected(self):
        with pytest.raises(DatasetFormatError):
            Graph.from_edges([("a\tb", "c")])

    def test_networkx_round_trip(self, star_graph):
        assert Graph.from_networkx(star_graph.to_networkx()) == star_graph

    def test_pickles(self, star_graph):
        assert pickle.loads(pickle.dumps(star_graph)) == star_graph


class TestPost:

    def test_tokens_derived(self):
        assert Post("p1", "u", "Hi THERE x").tokens == ("hi", "there")

    def test_with_tokens(self):
        post = Post("p1", "u", "one two").with_tokens(["two"])
        assert (post.post_id, post.author, post.tokens) == ("p1", "u", ("two",))


class TestDataset:

    def test_authors_become_vertices(self, three_user_dataset):
        assert set(three_user_dataset.vertices) == {"u1", "u2", "u3"}

    def test_degree(self, tiny_public):
        assert all(tiny_public.degree(u) == tiny_public.graph.degree(u) for u in tiny_public.vertices)
        assert Dataset.build(Graph.empty(), [Post("a", "u", "x")]).degree("u") == 0

    def test_posts_sorted_by_id(self):
        d = Dataset.build(Graph.empty(), [Post("b", "u", "x1"), Post("a", "u", "x2")])
        assert [p.post_id for p in d.posts_of("u")] == ["a", "b"]

    def test_duplicate_post_id(self):
        with pytest.raises(DatasetFormatError):
            Dataset.build(Graph.empty(), [Post("a", "u", "x1"), Post("a", "v", "x2")])

    def test_equality_ignores_label(self, three_posts):
        assert Dataset.build(Graph.empty(), three_posts, "x") == Dataset.build(Graph.empty(), three_posts[::-1], "y")

    def test_pickles(self, tiny_public):
        assert pickle.loads(pickle.dumps(tiny_public)) == tiny_public


class TestGroundTruth:

    def test_not_bijective(self):
        with pytest.raises(EvaluationError):
            GroundTruth({"a": "x", "b": "x"})

    def test_inverse(self):
        truth = GroundTruth({"a": "x", "b": "y"})
        assert truth.inverse() == {"x": "a", "y": "b"}
        assert truth["a"] == "x"
