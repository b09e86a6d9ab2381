import math

import numpy as np
import pytest

import src.attack.features as features
from src.attack.config import AttackConfig, DegreeBuckets
from src.attack.features import (
    FeatureProfile,
    build_feature_profile,
    cosine,
    degree_histogram,
    score_candidate,
    text_vector,
)
from src.core.model import Post
from src.core.text import CorpusStats


class TestDegreeBuckets:

    @pytest.mark.parametrize("degree, slot", [(0, 0), (1, 0), (2, 1), (3, 2), (4, 2), (5, 3), (8, 3), (9, 4), (2048, 11), (2049, 12), (10**6, 12)])
    def test_log2(self, degree, slot):
        assert DegreeBuckets.LOG2.index(degree) == slot

    @pytest.mark.parametrize("degree, slot", [(1, 0), (2, 1), (12, 11), (13, 12), (400, 12)])
    def test_linear(self, degree, slot):
        assert DegreeBuckets.LINEAR.index(degree) == slot


class TestProfile:

    def test_empty_profile_is_zero(self):
        profile = build_feature_profile([], [], {}, {}, [], CorpusStats(0, {}))
        assert profile.is_zero()

    def test_histogram(self):
        hist = degree_histogram([1, 1, 2])
        assert hist[0] == pytest.approx(2 / 3)
        assert hist[1] == pytest.approx(1 / 3)
        assert hist[2:].sum() == 0.0

    def test_text_vector_unit_norm(self):
        rng = np.random.default_rng(1)
        vocabulary = [f"t{i}" for i in range(60)]
        stats = CorpusStats(100, {t: int(rng.integers(1, 100)) for t in vocabulary})
        for i in range(1000):
            words = [vocabulary[j] for j in rng.integers(len(vocabulary), size=int(rng.integers(1, 12)))]
            vec = text_vector([Post(f"p{i}", "u", " ".join(words))], stats)
            if vec:
                assert math.sqrt(sum(w * w for w in vec.values())) == pytest.approx(1.0, abs=1e-9)

    def test_neighbor_parts(self):
        stats = CorpusStats(4, {"aa": 1, "bb": 1, "cc": 2})
        profile = build_feature_profile(
            posts=[Post("p0", "u", "aa")],
            neighbors=["v", "w"],
            neighbor_posts={"v": [Post("p1", "v", "bb")], "w": []},
            neighbor_degrees={"v": 1, "w": 3},
            neighbor2_degrees=[2],
            idf_source=stats,
        )
        assert profile.text_vector == {"aa": pytest.approx(1.0)}
        assert profile.nbr_text_vector == {"bb": pytest.approx(1.0)}
        assert profile.nbr_degree_hist[0] == profile.nbr_degree_hist[2] == pytest.approx(0.5)
        assert profile.nbr_degree_hist2[1] == pytest.approx(1.0)


class TestCosine:

    def test_identical(self):
        assert cosine({"aa": 0.3, "bb": 0.7}, {"aa": 0.3, "bb": 0.7}) == pytest.approx(1.0)

    def test_disjoint(self):
        assert cosine({"aa": 1.0}, {"bb": 1.0}) == 0.0

    def test_hand_value(self):
        assert cosine(np.array([1.0, 1.0]), np.array([1.0, 0.0])) == pytest.approx(1 / math.sqrt(2))
        assert cosine({"x": 1.0, "y": 1.0}, {"x": 1.0}) == pytest.approx(0.70711, abs=1e-5)

    def test_zero_vector(self):
        assert cosine({}, {"aa": 1.0}) == 0.0
        assert cosine(np.zeros(3), np.ones(3)) == 0.0

    def test_symmetric(self):
        a = {f"t{i}": 1.0 / (i + 1) for i in range(40)}
        b = {f"t{i}": math.sqrt(i + 2) for i in range(0, 80, 3)}
        assert cosine(a, b) == cosine(b, a)


class TestScoreCandidate:

    def _profile(self) -> FeatureProfile:
        return FeatureProfile(
            text_vector={"aa": 1.0},
            nbr_degree_hist=degree_histogram([1, 4]),
            nbr_text_vector={"bb": 0.6, "cc": 0.8},
            nbr_degree_hist2=degree_histogram([2, 2, 9]),
        )

    def test_self_similarity(self):
        p = self._profile()
        assert score_candidate(p, p, AttackConfig().weights) == pytest.approx(1.0)

    def test_all_zero(self):
        assert score_candidate(self._profile(), FeatureProfile(), AttackConfig().weights) == 0.0

    def test_weighted_sum(self, monkeypatch):
        monkeypatch.setattr(features, "component_similarities", lambda u, c: (0.5, 1.0, 0.0, 0.2))
        assert score_candidate(FeatureProfile(), FeatureProfile(), (0.4, 0.2, 0.25, 0.15)) == pytest.approx(0.43)
