"""Attack parameters and the degree bucketing schemes."""

import math
from collections.abc import Sequence
from dataclasses import dataclass
from enum import Enum

from src.core.errors import ConfigError, throw_exception

N_BUCKETS = 13

WEIGHT_TOLERANCE = 1e-9


class DegreeBuckets(str, Enum):
    """
    log2:   [1], [2], [3,4], [5,8], ..., [1025,2048], >2048 pooled in slot 12
    linear: one slot per degree 1..12, >12 pooled in slot 12
    Degree 0 shares slot 0 with degree 1 in both schemes.
    """

    LOG2 = "log2"
    LINEAR = "linear"

    def index(self, degree: int) -> int:
        if degree <= 1:
            return 0
        if self is DegreeBuckets.LOG2:
            return min(N_BUCKETS - 1, (degree - 1).bit_length())
        return min(N_BUCKETS - 1, degree - 1)


def normalize_weights(raw: Sequence[float]) -> tuple[float, float, float, float]:
    """Scale four non-negative weights to sum to 1."""
    origin = "attack.normalize_weights()"
    if len(raw) != 4:
        throw_exception(ConfigError, "BadWeights", f"expected 4 weights, got {len(raw)}", origin)
    if any(not math.isfinite(w) or w < 0 for w in raw):
        throw_exception(ConfigError, "BadWeights", f"weights must be finite and >= 0, got {list(raw)}", origin)
    total = math.fsum(raw)
    if total <= 0:
        throw_exception(ConfigError, "BadWeights", "at least one weight must be positive", origin)
    w_text, w_struct, w_nbr_text, w_nbr_struct = (w / total for w in raw)
    return w_text, w_struct, w_nbr_text, w_nbr_struct


@dataclass(frozen=True)
class AttackConfig:
    """
    top_k_posts:       revealing posts used as search queries
    candidate_limit:   m, size of the candidate set (and per-query search limit)
    weights:           (w_text, w_struct, w_nbr_text, w_nbr_struct), summing to 1
    histogram_buckets: degree bucketing of the structural features
    query_budget:      platform calls allowed per target, None = unlimited
    """

    top_k_posts: int = 5
    candidate_limit: int = 50
    weights: tuple[float, float, float, float] = (0.40, 0.20, 0.25, 0.15)
    histogram_buckets: DegreeBuckets = DegreeBuckets.LOG2
    query_budget: int | None = None

    def __post_init__(self) -> None:
        origin = "attack.AttackConfig()"
        for name in ("top_k_posts", "candidate_limit"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                throw_exception(ConfigError, "OutOfRange", f"{name} must be an integer >= 1, got {value!r}", origin)
        weights = tuple(float(w) for w in self.weights)
        if len(weights) != 4 or any(w < 0 for w in weights) or abs(math.fsum(weights) - 1.0) > WEIGHT_TOLERANCE:
            throw_exception(ConfigError, "BadWeights", f"weights must be 4 values >= 0 summing to 1, got {list(self.weights)}", origin)
        object.__setattr__(self, "weights", weights)
        try:
            object.__setattr__(self, "histogram_buckets", DegreeBuckets(self.histogram_buckets))
        except ValueError:
            throw_exception(ConfigError, "UnknownBuckets", f"histogram_buckets {self.histogram_buckets!r}", origin)
        if self.query_budget is not None and (not isinstance(self.query_budget, int) or self.query_budget < 1):
            throw_exception(ConfigError, "OutOfRange", f"query_budget must be >= 1 or unset, got {self.query_budget!r}", origin)

    @classmethod
    def with_raw_weights(cls, raw: Sequence[float], **kwargs) -> "AttackConfig":
        return cls(weights=normalize_weights(raw), **kwargs)
