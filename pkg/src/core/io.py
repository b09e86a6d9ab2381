"""
File ingestion and serialization.

Formats (UTF-8, LF line endings)
--------------------------------
edges.tsv         ``<user_id>\\t<user_id>`` per line, undirected, either orientation
posts.jsonl       one JSON object per line with exactly "user_id", "post_id", "text"
ground_truth.tsv  ``<anon_id>\\t<public_id>`` per line

Writers sort everything (edges by endpoint, posts by user then post_id,
ground truth by anon id) so saving the same object twice produces
byte-identical files.
"""

import json
import logging
from collections.abc import Iterator
from pathlib import Path

from src.core.errors import DatasetFormatError, throw_exception
from src.core.model import Dataset, Graph, GroundTruth, Post

logger = logging.getLogger(__name__)

EDGES_FILE = "edges.tsv"
POSTS_FILE = "posts.jsonl"
GROUND_TRUTH_FILE = "ground_truth.tsv"

_POST_KEYS = {"user_id", "post_id", "text"}


def _read_lines(path: Path, origin: str) -> Iterator[tuple[int, str]]:
    """Yield (1-based line number, line without trailing LF)."""
    try:
        raw = path.read_bytes()
    except OSError as e:
        throw_exception(DatasetFormatError, "ReadFailed", f"{path}: {e}", origin)
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as e:
        line_no = raw[: e.start].count(b"\n") + 1
        throw_exception(DatasetFormatError, "NotUtf8", f"{path}:{line_no}: invalid UTF-8 byte at offset {e.start}", origin)
    if not text:
        return
    lines = text.split("\n")
    if lines[-1] == "":
        lines.pop()
    yield from enumerate(lines, start=1)


def _split_pair(path: Path, line_no: int, line: str, origin: str) -> tuple[str, str]:
    fields = line.split("\t")
    if len(fields) != 2 or not fields[0] or not fields[1] or any("\r" in f for f in fields):
        throw_exception(
            DatasetFormatError,
            "MalformedLine",
            f"{path}:{line_no}: expected '<id>\\t<id>', got {line!r}",
            origin,
        )
    return fields[0], fields[1]


def read_edges(path: Path) -> tuple[list[tuple[str, str]], int, int]:
    """Return (unique edges, dropped duplicates, dropped self-loops)."""
    origin = "io.load_dataset()"
    edges: list[tuple[str, str]] = []
    seen: set[tuple[str, str]] = set()
    duplicates = loops = 0
    for line_no, line in _read_lines(Path(path), origin):
        u, v = _split_pair(Path(path), line_no, line, origin)
        if u == v:
            loops += 1
            continue
        key = (u, v) if u < v else (v, u)
        if key in seen:
            duplicates += 1
            continue
        seen.add(key)
        edges.append(key)
    return edges, duplicates, loops


def read_posts(path: Path) -> list[Post]:
    origin = "io.load_dataset()"
    posts = []
    for line_no, line in _read_lines(Path(path), origin):
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as e:
            throw_exception(DatasetFormatError, "MalformedLine", f"{path}:{line_no}: invalid JSON ({e.msg})", origin)
        if not isinstance(obj, dict) or set(obj) != _POST_KEYS or not all(isinstance(obj[k], str) for k in _POST_KEYS):
            throw_exception(
                DatasetFormatError,
                "MalformedLine",
                f"{path}:{line_no}: expected an object with exactly string keys user_id, post_id, text",
                origin,
            )
        try:
            posts.append(Post(obj["post_id"], obj["user_id"], obj["text"]))
        except DatasetFormatError as e:
            throw_exception(DatasetFormatError, e.reason, f"{path}:{line_no}: {e.desc}", origin)
    return posts


def load_dataset(edges_path: str | Path, posts_path: str | Path, label: str) -> Dataset:
    """Load a Dataset; duplicate edges and self-loops are dropped and counted."""
    edges, duplicates, loops = read_edges(Path(edges_path))
    if duplicates or loops:
        logger.warning(
            "%s: dropped %d duplicate edge(s) and %d self-loop(s)", edges_path, duplicates, loops
        )
    posts = read_posts(Path(posts_path))
    dataset = Dataset.build(Graph.from_edges(edges), posts, label)
    logger.info("loaded %r", dataset)
    return dataset


def load_dataset_dir(directory: str | Path, label: str) -> Dataset:
    directory = Path(directory)
    return load_dataset(directory / EDGES_FILE, directory / POSTS_FILE, label)


def _write_text(path: Path, lines: list[str], origin: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            for line in lines:
                f.write(line)
                f.write("\n")
    except OSError as e:
        throw_exception(DatasetFormatError, "WriteFailed", f"{path}: {e}", origin)


def _ensure_dir(directory: Path, origin: str) -> None:
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        throw_exception(DatasetFormatError, "WriteFailed", f"{directory}: {e}", origin)


def save_dataset(dataset: Dataset, out_dir: str | Path) -> None:
    """Write edges.tsv and posts.jsonl into out_dir.

    Isolated vertices without posts have no representation in either file
    and do not survive a round trip.
    """
    origin = "io.save_dataset()"
    out_dir = Path(out_dir)
    _ensure_dir(out_dir, origin)

    edge_lines = [f"{u}\t{v}" for u, v in dataset.graph.edges()]
    post_lines = [
        json.dumps({"user_id": p.author, "post_id": p.post_id, "text": p.text}, ensure_ascii=False)
        for p in dataset.all_posts()
    ]
    _write_text(out_dir / EDGES_FILE, edge_lines, origin)
    _write_text(out_dir / POSTS_FILE, post_lines, origin)
    logger.info("saved %r to %s", dataset, out_dir)


def save_ground_truth(truth: GroundTruth, path: str | Path) -> None:
    path = Path(path)
    _ensure_dir(path.parent, "io.save_ground_truth()")
    _write_text(path, [f"{anon}\t{pub}" for anon, pub in truth.items()], "io.save_ground_truth()")


def load_ground_truth(path: str | Path) -> GroundTruth:
    origin = "io.load_ground_truth()"
    mapping: dict[str, str] = {}
    for line_no, line in _read_lines(Path(path), origin):
        anon, pub = _split_pair(Path(path), line_no, line, origin)
        if anon in mapping:
            throw_exception(DatasetFormatError, "DuplicateId", f"{path}:{line_no}: anon id {anon!r} listed twice", origin)
        mapping[anon] = pub
    return GroundTruth(mapping)
