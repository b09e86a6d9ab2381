"""
Re-identification metrics per case.

top1_accuracy       fraction of targets whose claim is their true identity
candidate_recall    fraction whose true identity is anywhere in the candidates
mean_rank_of_truth  mean 1-based rank of the truth over recalled targets
                    (NaN when nothing is recalled)
random_baseline     1 / number of users in the ground truth
"""

import math
import statistics
from collections.abc import Sequence
from dataclasses import dataclass, replace

from src.attack.results import MappingResult
from src.core.errors import EvaluationError, throw_exception
from src.core.model import GroundTruth
from src.harness.cases import CaseId


@dataclass(frozen=True)
class CaseReport:
    case: CaseId
    top1_accuracy: float
    candidate_recall: float
    mean_rank_of_truth: float
    n_targets: int
    mean_queries: float
    params_digest: str = ""
    seed: int | None = None
    # spread over seeds; only set on aggregate rows
    top1_std: float = 0.0
    recall_std: float = 0.0
    n_seeds: int = 1
    # 1 / n_users, the accuracy of guessing
    random_baseline: float = 0.0

    @property
    def is_aggregate(self) -> bool:
        return self.seed is None


def evaluate_attack(mapping: Sequence[MappingResult], truth: GroundTruth, case: CaseId = CaseId.CASE1) -> CaseReport:
    """Core metrics; absent claims count as misses."""
    hits = recalled = 0
    ranks = []
    queries = 0
    for result in mapping:
        if result.target not in truth:
            throw_exception(EvaluationError, "UnknownTarget", f"{result.target!r} is not in the ground truth", "metrics.evaluate_attack()")
        real = truth[result.target]
        if result.claimed is not None and result.claimed == real:
            hits += 1
        rank = result.rank_of(real)
        if rank is not None:
            recalled += 1
            ranks.append(rank)
        queries += result.queries_used

    n = len(mapping)
    return CaseReport(
        case=case,
        top1_accuracy=hits / n if n else 0.0,
        candidate_recall=recalled / n if n else 0.0,
        mean_rank_of_truth=statistics.fmean(ranks) if ranks else math.nan,
        n_targets=n,
        mean_queries=queries / n if n else 0.0,
        random_baseline=1 / len(truth) if len(truth) else 0.0,
    )


def _std(values: list[float]) -> float:
    return statistics.stdev(values) if len(values) > 1 else 0.0


def _mean(values: list[float]) -> float:
    finite = [v for v in values if not math.isnan(v)]
    return statistics.fmean(finite) if finite else math.nan


def aggregate_reports(reports: Sequence[CaseReport]) -> list[CaseReport]:
    """One row per case (in case order): mean and sample std over seeds."""
    rows = []
    for case in sorted({r.case for r in reports}, key=lambda c: c.number):
        per_seed = [r for r in reports if r.case == case and not r.is_aggregate]
        top1 = [r.top1_accuracy for r in per_seed]
        recall = [r.candidate_recall for r in per_seed]
        rows.append(
            replace(
                per_seed[0],
                top1_accuracy=statistics.fmean(top1),
                candidate_recall=statistics.fmean(recall),
                mean_rank_of_truth=_mean([r.mean_rank_of_truth for r in per_seed]),
                n_targets=sum(r.n_targets for r in per_seed),
                mean_queries=statistics.fmean([r.mean_queries for r in per_seed]),
                seed=None,
                top1_std=_std(top1),
                recall_std=_std(recall),
                n_seeds=len(per_seed),
            )
        )
    return rows
