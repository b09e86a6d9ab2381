"""
Structural anonymization.

Two interchangeable techniques:

edge_perturbation
    Delete round(fraction * |E|) uniformly chosen edges and insert the same
    number of edges uniformly among vertex pairs that were not adjacent in
    the input. |V| and |E| are preserved exactly.

k_degree
    Edge-addition-only k-degree anonymity. Vertices are sorted by descending
    degree (seeded tie-breaks) and cut into groups of k (a short tail joins
    the previous group). Each member is raised to its group's maximum degree
    by linking it to its lowest-degree non-neighbors. Links raise the
    partner's degree too, so passes repeat until every present degree value
    is shared by at least k vertices. Every non-final pass adds at least
    one edge, which bounds the loop by the complete graph.
"""

import logging
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from itertools import combinations

import numpy as np

from src.core.errors import AnonymizationError, ConfigError, throw_exception
from src.core.model import Graph
from src.core.text import round_half_up

logger = logging.getLogger(__name__)

MAX_SEED = 2**64 - 1


class GraphTechnique(str, Enum):
    EDGE_PERTURBATION = "edge_perturbation"
    K_DEGREE = "k_degree"


def check_seed(seed: int, origin: str) -> int:
    if not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed <= MAX_SEED:
        throw_exception(ConfigError, "BadSeed", f"seed must be an unsigned 64-bit integer, got {seed!r}", origin)
    return seed


def check_unit_interval(name: str, value: float, origin: str) -> float:
    if not isinstance(value, (int, float)) or isinstance(value, bool) or not 0.0 <= value <= 1.0:
        throw_exception(ConfigError, "OutOfRange", f"{name} must be in [0, 1], got {value!r}", origin)
    return float(value)


@dataclass(frozen=True)
class GraphAnonConfig:
    """``fraction`` is read by edge_perturbation only, ``k`` by k_degree only."""

    technique: GraphTechnique = GraphTechnique.K_DEGREE
    fraction: float = 0.2
    k: int = 5
    seed: int = 0

    def __post_init__(self) -> None:
        origin = "anonymize_graph.GraphAnonConfig()"
        try:
            object.__setattr__(self, "technique", GraphTechnique(self.technique))
        except ValueError:
            throw_exception(ConfigError, "UnknownTechnique", f"graph technique {self.technique!r}", origin)
        object.__setattr__(self, "fraction", check_unit_interval("fraction", self.fraction, origin))
        if not isinstance(self.k, int) or isinstance(self.k, bool) or self.k < 1:
            throw_exception(ConfigError, "OutOfRange", f"k must be an integer >= 1, got {self.k!r}", origin)
        check_seed(self.seed, origin)


# ----------------------------------------------------------------------
# Edge perturbation
# ----------------------------------------------------------------------


def _sample_non_edges(
    vertices: list[str],
    existing: frozenset[tuple[str, str]],
    count: int,
    rng: np.random.Generator,
) -> list[tuple[str, str]]:
    """Draw ``count`` distinct vertex pairs absent from ``existing``, uniformly."""
    n = len(vertices)
    available = n * (n - 1) // 2 - len(existing)
    if available <= 4 * count:
        pool = [pair for pair in combinations(vertices, 2) if pair not in existing]
        picked = rng.choice(len(pool), size=count, replace=False)
        return [pool[i] for i in picked]

    chosen: dict[tuple[str, str], None] = {}
    while len(chosen) < count:
        i, j = rng.integers(n, size=2)
        if i == j:
            continue
        pair = (vertices[i], vertices[j]) if i < j else (vertices[j], vertices[i])
        if pair in existing or pair in chosen:
            continue
        chosen[pair] = None
    return list(chosen)


def perturb_edges(graph: Graph, fraction: float, seed: int) -> Graph:
    """Rewire exactly round(fraction * |E|) edges; deterministic given seed."""
    origin = "anonymize_graph.perturb_edges()"
    check_unit_interval("fraction", fraction, origin)
    check_seed(seed, origin)

    edges = list(graph.edges())
    count = round_half_up(fraction * len(edges))
    if count == 0:
        return graph

    vertices = list(graph.vertices)
    n = len(vertices)
    available = n * (n - 1) // 2 - len(edges)
    if available < count:
        throw_exception(
            AnonymizationError,
            "GraphTooDense",
            f"need {count} new edges but only {available} non-adjacent pairs exist (shortfall {count - available})",
            origin,
        )

    rng = np.random.default_rng(seed)
    removed = set(rng.choice(len(edges), size=count, replace=False).tolist())
    kept = [e for i, e in enumerate(edges) if i not in removed]
    inserted = _sample_non_edges(vertices, frozenset(edges), count, rng)

    logger.info("perturb_edges: rewired %d of %d edges (fraction=%s, seed=%d)", count, len(edges), fraction, seed)
    return Graph.from_edges(kept + inserted, vertices)


# ----------------------------------------------------------------------
# k-degree anonymity
# ----------------------------------------------------------------------


def is_k_degree_anonymous(graph: Graph, k: int) -> bool:
    """Every degree value present in the graph occurs at least k times."""
    return all(count >= k for count in Counter(graph.degrees().values()).values())


def _groups(order: np.ndarray, k: int) -> list[np.ndarray]:
    groups = [order[i : i + k] for i in range(0, len(order), k)]
    if len(groups) > 1 and len(groups[-1]) < k:
        tail = groups.pop()
        groups[-1] = np.concatenate([groups[-1], tail])
    return groups


def k_degree_anonymize(graph: Graph, k: int, seed: int) -> Graph:
    """Add edges until the degree multiset is k-anonymous."""
    origin = "anonymize_graph.k_degree_anonymize()"
    check_seed(seed, origin)
    n = len(graph)
    if not isinstance(k, int) or isinstance(k, bool) or k < 1:
        throw_exception(ConfigError, "OutOfRange", f"k must be an integer >= 1, got {k!r}", origin)
    if k > n:
        throw_exception(ConfigError, "OutOfRange", f"k={k} exceeds the vertex count {n}", origin)
    if k == 1 or is_k_degree_anonymous(graph, k):
        return graph

    vertices = list(graph.vertices)
    index = {v: i for i, v in enumerate(vertices)}
    adj = np.zeros((n, n), dtype=bool)
    for u, v in graph.edges():
        adj[index[u], index[v]] = adj[index[v], index[u]] = True

    rng = np.random.default_rng(seed)
    rank = rng.permutation(n)
    deg = adj.sum(axis=1).astype(np.int64)
    added = 0
    passes = 0

    while True:
        counts = Counter(deg.tolist())
        if all(c >= k for c in counts.values()):
            break
        passes += 1
        order = np.lexsort((rank, -deg))
        for group in _groups(order, k):
            target = int(deg[group].max())
            for v in group:
                need = target - int(deg[v])
                if need <= 0:
                    continue
                eligible = ~adj[v]
                eligible[v] = False
                candidates = np.flatnonzero(eligible)
                if len(candidates) < need:
                    throw_exception(
                        AnonymizationError,
                        "BlockedVertex",
                        f"vertex {vertices[v]!r} needs {need} more edges but has only {len(candidates)} non-neighbors",
                        origin,
                    )
                key = deg[candidates] * n + rank[candidates]
                partners = candidates[np.argsort(key, kind="stable")[:need]]
                adj[v, partners] = True
                adj[partners, v] = True
                deg[v] += need
                deg[partners] += 1
                added += need

    logger.info("k_degree_anonymize: k=%d, added %d edges in %d pass(es), seed=%d", k, added, passes, seed)
    rows, cols = np.nonzero(np.triu(adj, k=1))
    return Graph.from_edges(((vertices[i], vertices[j]) for i, j in zip(rows, cols)), vertices)


def anonymize_graph(graph: Graph, config: GraphAnonConfig) -> Graph:
    if config.technique is GraphTechnique.EDGE_PERTURBATION:
        return perturb_edges(graph, config.fraction, config.seed)
    return k_degree_anonymize(graph, config.k, config.seed)
