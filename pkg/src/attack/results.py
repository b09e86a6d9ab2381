"""
Mapping results and their files.

mapping.tsv       ``<anon_id>\\t<claimed_id or ->\\t<score, 6 decimals>``
candidates.tsv    ``<anon_id>\\t<rank>\\t<candidate_id>\\t<score, 6 decimals>``
                  written next to the mapping as ``<stem>.candidates.tsv``
"""

from dataclasses import dataclass
from pathlib import Path

from src.core.errors import DatasetFormatError, throw_exception
from src.core.model import UserId

NO_CLAIM = "-"


@dataclass(frozen=True)
class MappingResult:
    target: UserId
    claimed: UserId | None
    score: float
    ranked_candidates: tuple[tuple[UserId, float], ...]
    queries_used: int

    @property
    def candidates(self) -> list[UserId]:
        return [user for user, _ in self.ranked_candidates]

    def rank_of(self, user: UserId) -> int | None:
        """1-based rank of ``user`` among the candidates, None if absent."""
        for rank, (candidate, _) in enumerate(self.ranked_candidates, start=1):
            if candidate == user:
                return rank
        return None


def candidates_path(mapping_path: str | Path) -> Path:
    mapping_path = Path(mapping_path)
    return mapping_path.with_name(f"{mapping_path.stem}.candidates.tsv")


def save_mapping(results: list[MappingResult], path: str | Path) -> None:
    origin = "attack.save_mapping()"
    path = Path(path)
    ordered = sorted(results, key=lambda r: r.target)
    mapping_lines = [f"{r.target}\t{r.claimed or NO_CLAIM}\t{r.score:.6f}\n" for r in ordered]
    candidate_lines = [
        f"{r.target}\t{rank}\t{user}\t{score:.6f}\n"
        for r in ordered
        for rank, (user, score) in enumerate(r.ranked_candidates, start=1)
    ]
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.writelines(mapping_lines)
        with open(candidates_path(path), "w", encoding="utf-8", newline="\n") as f:
            f.writelines(candidate_lines)
    except OSError as e:
        throw_exception(DatasetFormatError, "WriteFailed", f"{path}: {e}", origin)


def _rows(path: Path, width: int, origin: str) -> list[tuple[int, list[str]]]:
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        throw_exception(DatasetFormatError, "ReadFailed", f"{path}: {e}", origin)
    rows = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        fields = line.split("\t")
        if len(fields) != width or not all(fields):
            throw_exception(DatasetFormatError, "MalformedLine", f"{path}:{line_no}: expected {width} tab-separated fields", origin)
        rows.append((line_no, fields))
    return rows


def load_mapping(path: str | Path) -> list[MappingResult]:
    """
    Read mapping.tsv and, when present, its candidates file. Without the
    candidates file each result carries its claim as the only candidate;
    ``queries_used`` is not stored and reads back as 0.
    """
    origin = "attack.load_mapping()"
    path = Path(path)
    ranked: dict[UserId, list[tuple[int, UserId, float]]] = {}
    cand_file = candidates_path(path)
    if cand_file.exists():
        for line_no, (target, rank, user, score) in _rows(cand_file, 4, origin):
            try:
                ranked.setdefault(target, []).append((int(rank), user, float(score)))
            except ValueError:
                throw_exception(DatasetFormatError, "MalformedLine", f"{cand_file}:{line_no}: bad rank or score", origin)

    results = []
    for line_no, (target, claimed, score) in _rows(path, 3, origin):
        try:
            value = float(score)
        except ValueError:
            throw_exception(DatasetFormatError, "MalformedLine", f"{path}:{line_no}: bad score {score!r}", origin)
        claim = None if claimed == NO_CLAIM else claimed
        if cand_file.exists():
            cands = tuple((user, s) for _, user, s in sorted(ranked.get(target, [])))
        else:
            cands = ((claim, value),) if claim is not None else ()
        results.append(MappingResult(target, claim, value, cands, 0))
    return results
