"""
The four anonymization cases.

            structural   textual
    case1       -           -       pseudonymization only
    case2       -           x
    case3       x           -
    case4       x           x       graph first, then text
"""

from enum import Enum

from src.anonymizers.graph import GraphAnonConfig, anonymize_graph
from src.anonymizers.text import TextAnonConfig, anonymize_posts
from src.core.errors import ConfigError, throw_exception
from src.core.model import Dataset


class CaseId(str, Enum):
    CASE1 = "case1"
    CASE2 = "case2"
    CASE3 = "case3"
    CASE4 = "case4"

    @property
    def structural(self) -> bool:
        return self in (CaseId.CASE3, CaseId.CASE4)

    @property
    def textual(self) -> bool:
        return self in (CaseId.CASE2, CaseId.CASE4)

    @property
    def number(self) -> int:
        return int(self.value[-1])

    @classmethod
    def parse(cls, value: "str | int | CaseId") -> "CaseId":
        """Accepts "case3", "3" or 3."""
        text = str(value.value if isinstance(value, CaseId) else value).strip().lower()
        if not text.startswith("case"):
            text = f"case{text}"
        try:
            return cls(text)
        except ValueError:
            throw_exception(ConfigError, "UnknownCase", f"{value!r} is not one of case1..case4", "cases.CaseId.parse()")


ALL_CASES = (CaseId.CASE1, CaseId.CASE2, CaseId.CASE3, CaseId.CASE4)


def apply_case(anon: Dataset, case: CaseId, g: GraphAnonConfig, t: TextAnonConfig) -> Dataset:
    out = anon
    if case.structural:
        out = out.with_graph(anonymize_graph(out.graph, g))
    if case.textual:
        out = anonymize_posts(out, t)
    return Dataset(out.graph, out.posts, f"anon-{case.value}")
