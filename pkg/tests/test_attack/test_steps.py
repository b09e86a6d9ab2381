import math
from collections import defaultdict

import pytest

from src.Platform import PlatformClient, build_index
from src.attack.steps import extract_revealing_posts, post_corpus_stats, post_score, select_candidates
from src.core.errors import ConfigError
from src.core.model import Dataset, Graph, Post


class TestExtractRevealingPosts:

    def test_hand_scores(self, three_posts):
        stats = post_corpus_stats(three_posts)
        assert post_score(three_posts[0], stats) == pytest.approx(math.log(1.5))
        assert post_score(three_posts[1], stats) == pytest.approx((math.log(1.5) + math.log(3)) / 2)
        assert post_score(three_posts[2], stats) == pytest.approx(math.log(1.5))

    def test_top1(self, three_posts):
        assert extract_revealing_posts(three_posts, three_posts, 1) == [three_posts[1]]

    def test_k_above_post_count(self, three_posts):
        out = extract_revealing_posts(three_posts, three_posts, 10)
        # d1 and d3 tie, broken by post_id
        assert [p.post_id for p in out] == ["d2", "d1", "d3"]

    def test_uniform_term_scores_zero(self):
        posts = [Post("a", "u", "same"), Post("b", "v", "same same")]
        stats = post_corpus_stats(posts)
        assert post_score(posts[1], stats) == 0.0

    def test_empty_post(self):
        assert post_score(Post("a", "u", "!"), post_corpus_stats([])) == 0.0

    def test_bad_k(self, three_posts):
        with pytest.raises(ConfigError):
            extract_revealing_posts(three_posts, three_posts, 0)

    def test_scores_match_brute_force(self, random_corpora):
        for posts in random_corpora:
            documents = [p.tokens for p in posts]
            stats = post_corpus_stats(posts)
            for post in posts:
                expected = 0.0
                for term in set(post.tokens):
                    df = sum(1 for d in documents if term in d)
                    expected += post.tokens.count(term) * math.log(len(documents) / df)
                expected /= len(post.tokens)
                assert post_score(post, stats) == pytest.approx(expected, abs=1e-9)

    def test_selection_matches_brute_force_order(self, random_corpora):
        for posts in random_corpora:
            stats = post_corpus_stats(posts)
            expected = sorted(posts, key=lambda p: (-post_score(p, stats), p.post_id))[:3]
            assert extract_revealing_posts(posts, posts, 3) == expected


class TestSelectCandidates:

    def test_no_revealing_posts(self, three_user_dataset):
        client = PlatformClient(build_index(three_user_dataset))
        assert select_candidates(client, [], 5) == []
        assert client.log.count == 0

    def test_unique_tokens(self, three_user_dataset):
        client = PlatformClient(build_index(three_user_dataset))
        out = select_candidates(client, [Post("q", "x", "cherry")], 5)
        assert [u for u, _ in out] == ["u2"]

    def test_disjoint_queries_merge(self):
        posts = [
            Post("p1", "amy", "kiwi kiwi"),
            Post("p2", "bob", "kiwi"),
            Post("p3", "cat", "plum"),
            Post("p4", "dan", "plum plum plum"),
            Post("p5", "eve", "fig"),
        ]
        index = build_index(Dataset.build(Graph.empty(), posts))
        revealing = [Post("q1", "x", "kiwi"), Post("q2", "x", "plum")]

        merged = defaultdict(float)
        for q in revealing:
            for user, score in index.ranked(list(q.tokens), 10):
                merged[user] += score
        expected = sorted(merged.items(), key=lambda i: (-i[1], i[0]))

        out = select_candidates(PlatformClient(index), revealing, 10)
        assert [u for u, _ in out] == [u for u, _ in expected] == ["dan", "amy", "bob", "cat"]
        assert [s for _, s in out] == pytest.approx([s for _, s in expected])

    def test_one_search_per_post(self, tiny_public, tiny_index):
        client = PlatformClient(tiny_index)
        revealing = list(tiny_public.all_posts()[:3])
        out = select_candidates(client, revealing, 4)
        assert len(out) <= 4
        assert client.log.by_operation()["search"] == 3

    def test_single_query_monotone_in_m(self, tiny_public, tiny_index):
        revealing = [tiny_public.all_posts()[0]]
        previous: set = set()
        for m in range(1, 12):
            current = {u for u, _ in select_candidates(PlatformClient(tiny_index), revealing, m)}
            assert previous <= current
            previous = current
