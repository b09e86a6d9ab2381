"""
Four-case matrix runner and parameter sweeps.

Per seed i (0-based):
    synth seed   = synth.seed + i      (also the release and sampling seed)
    graph seed   = graph.seed + i
    text seed    = text.seed + i
    generate -> index public -> pseudonymized release -> for each case:
    apply case -> attack every (or sampled) user -> evaluate

Config file (TOML)
------------------
Tables ``[synth]``, ``[graph]``, ``[text]``, ``[attack]`` take exactly the
field names of SynthConfig, GraphAnonConfig, TextAnonConfig and
AttackConfig; ``[run]`` takes ``n_seeds``, ``jobs`` and ``sample``.
Missing keys keep their defaults, unknown ones are rejected.

report.tsv
----------
A ``#`` comment line with the tool version and parameter digest, a header
line, one row per (case, seed) in case-then-seed order, then one aggregate
row per case (seed column ``mean``). Reals have 6 decimals.
"""

import dataclasses
import hashlib
import json
import logging
import math
import tomllib
from collections.abc import Sequence
from dataclasses import dataclass, field, fields, replace
from enum import Enum
from pathlib import Path

from src import __version__
from src.Platform import build_index
from src.anonymizers.graph import MAX_SEED, GraphAnonConfig
from src.anonymizers.text import TextAnonConfig
from src.attack.config import AttackConfig, normalize_weights
from src.attack.deanonymize import attack_all, sample_targets
from src.core.errors import ConfigError, DatasetFormatError, throw_exception
from src.harness.cases import ALL_CASES, apply_case
from src.harness.metrics import CaseReport, aggregate_reports, evaluate_attack
from src.harness.release import make_release
from src.harness.synth import SynthConfig, generate_synthetic

logger = logging.getLogger(__name__)

REPORT_COLUMNS = (
    "case",
    "seed",
    "top1_accuracy",
    "top1_std",
    "candidate_recall",
    "recall_std",
    "mean_rank_of_truth",
    "n_targets",
    "mean_queries",
    "random_baseline",
    "params_digest",
)


@dataclass(frozen=True)
class MatrixConfig:
    synth: SynthConfig = field(default_factory=SynthConfig)
    graph: GraphAnonConfig = field(default_factory=GraphAnonConfig)
    text: TextAnonConfig = field(default_factory=TextAnonConfig)
    attack: AttackConfig = field(default_factory=AttackConfig)
    n_seeds: int = 1
    jobs: int = 1
    sample: int | None = None

    def __post_init__(self) -> None:
        origin = "matrix.MatrixConfig()"
        if not isinstance(self.n_seeds, int) or self.n_seeds < 1:
            throw_exception(ConfigError, "OutOfRange", f"n_seeds must be >= 1, got {self.n_seeds!r}", origin)
        if not isinstance(self.jobs, int) or self.jobs < 1:
            throw_exception(ConfigError, "OutOfRange", f"jobs must be >= 1, got {self.jobs!r}", origin)
        if self.sample is not None and (not isinstance(self.sample, int) or self.sample < 1):
            throw_exception(ConfigError, "OutOfRange", f"sample must be >= 1, got {self.sample!r}", origin)


_SECTIONS = {"synth": SynthConfig, "graph": GraphAnonConfig, "text": TextAnonConfig, "attack": AttackConfig}
_RUN_KEYS = ("n_seeds", "jobs", "sample")


def _section(name: str, cls: type, values: dict) -> object:
    allowed = {f.name for f in fields(cls)}
    unknown = sorted(set(values) - allowed)
    if unknown:
        throw_exception(ConfigError, "UnknownKey", f"[{name}] does not take {', '.join(unknown)}", "matrix.load_matrix_config()")
    values = dict(values)
    if cls is AttackConfig and "weights" in values:
        values["weights"] = normalize_weights([float(w) for w in values["weights"]])
    return cls(**values)


def parse_matrix_config(data: dict) -> MatrixConfig:
    origin = "matrix.load_matrix_config()"
    unknown = sorted(set(data) - set(_SECTIONS) - {"run"})
    if unknown:
        throw_exception(ConfigError, "UnknownTable", f"unknown table(s): {', '.join(unknown)}", origin)
    parts = {name: _section(name, cls, data.get(name, {})) for name, cls in _SECTIONS.items()}
    run = data.get("run", {})
    bad = sorted(set(run) - set(_RUN_KEYS))
    if bad:
        throw_exception(ConfigError, "UnknownKey", f"[run] does not take {', '.join(bad)}", origin)
    return MatrixConfig(**parts, **run)


def load_matrix_config(path: str | Path) -> MatrixConfig:
    try:
        with open(path, "rb") as f:
            data = tomllib.load(f)
    except OSError as e:
        throw_exception(DatasetFormatError, "ReadFailed", f"{path}: {e}", "matrix.load_matrix_config()")
    except tomllib.TOMLDecodeError as e:
        throw_exception(ConfigError, "BadToml", f"{path}: {e}", "matrix.load_matrix_config()")
    return parse_matrix_config(data)


def _plain(value: object) -> object:
    if isinstance(value, Enum):
        return value.value
    if dataclasses.is_dataclass(value):
        return {f.name: _plain(getattr(value, f.name)) for f in fields(value)}
    if isinstance(value, tuple):
        return [_plain(v) for v in value]
    return value


def params_digest(config: MatrixConfig) -> str:
    """Short hash of every parameter except the worker count."""
    payload = _plain(replace(config, jobs=1))
    return hashlib.blake2b(json.dumps(payload, sort_keys=True).encode("utf-8"), digest_size=6).hexdigest()


def _offset(seed: int, i: int) -> int:
    return (seed + i) % (MAX_SEED + 1)


# ----------------------------------------------------------------------
# Runs
# ----------------------------------------------------------------------


def run_seed(config: MatrixConfig, i: int, digest: str) -> list[CaseReport]:
    synth = replace(config.synth, seed=_offset(config.synth.seed, i))
    g = replace(config.graph, seed=_offset(config.graph.seed, i))
    t = replace(config.text, seed=_offset(config.text.seed, i))

    public = generate_synthetic(synth)
    index = build_index(public)
    anon, truth = make_release(public, synth.seed)

    reports = []
    for case in ALL_CASES:
        released = apply_case(anon, case, g, t)
        targets = sample_targets(released, config.sample, synth.seed)
        mapping, _ = attack_all(released, index, config.attack, jobs=config.jobs, targets=targets)
        report = replace(evaluate_attack(mapping, truth, case), params_digest=digest, seed=synth.seed)
        logger.info(
            "seed %d %s: top1=%.4f recall=%.4f", synth.seed, case.value, report.top1_accuracy, report.candidate_recall
        )
        reports.append(report)
    return reports


def run_case_matrix(
    synth: SynthConfig,
    g: GraphAnonConfig,
    t: TextAnonConfig,
    a: AttackConfig,
    n_seeds: int,
    jobs: int = 1,
    sample: int | None = None,
) -> list[CaseReport]:
    """4 * n_seeds per-seed reports (case, then seed order) + 4 aggregates."""
    return run_matrix(MatrixConfig(synth, g, t, a, n_seeds, jobs, sample))


def run_matrix(config: MatrixConfig) -> list[CaseReport]:
    digest = params_digest(config)
    per_seed = [r for i in range(config.n_seeds) for r in run_seed(config, i, digest)]
    ordered = sorted(per_seed, key=lambda r: r.case.number)  # stable: seeds stay in order
    return ordered + aggregate_reports(ordered)


def with_parameter(config: MatrixConfig, dotted: str, raw: str) -> MatrixConfig:
    """Copy of ``config`` with ``section.field`` set from its string form."""
    origin = "matrix.with_parameter()"
    section, _, name = dotted.partition(".")
    if section not in _SECTIONS or not name:
        throw_exception(ConfigError, "UnknownParameter", f"{dotted!r} is not <synth|graph|text|attack>.<field>", origin)
    current = getattr(config, section)
    if name not in {f.name for f in fields(current)}:
        throw_exception(ConfigError, "UnknownParameter", f"{section} has no field {name!r}", origin)

    old = getattr(current, name)
    try:
        if name == "weights":
            value: object = normalize_weights([float(w) for w in raw.split(",")])
        elif isinstance(old, Enum):
            value = type(old)(raw)
        elif isinstance(old, bool):
            value = raw.lower() in ("1", "true", "yes")
        elif isinstance(old, int) or old is None:
            value = int(raw)
        else:
            value = float(raw)
    except ValueError:
        throw_exception(ConfigError, "BadValue", f"{raw!r} is not valid for {dotted}", origin)
    return replace(config, **{section: replace(current, **{name: value})})


def run_sweep(config: MatrixConfig, parameter: str, values: Sequence[str]) -> list[tuple[str, CaseReport]]:
    """Aggregate rows of a full matrix run for every value of one parameter."""
    rows = []
    for raw in values:
        swept = with_parameter(config, parameter, raw)
        for report in run_matrix(swept):
            if report.is_aggregate:
                rows.append((raw, report))
    return rows


# ----------------------------------------------------------------------
# report.tsv
# ----------------------------------------------------------------------


def _real(value: float) -> str:
    return "nan" if math.isnan(value) else f"{value:.6f}"


def report_row(report: CaseReport) -> list[str]:
    return [
        report.case.value,
        "mean" if report.is_aggregate else str(report.seed),
        _real(report.top1_accuracy),
        _real(report.top1_std),
        _real(report.candidate_recall),
        _real(report.recall_std),
        _real(report.mean_rank_of_truth),
        str(report.n_targets),
        _real(report.mean_queries),
        _real(report.random_baseline),
        report.params_digest,
    ]


def render_report(reports: Sequence[CaseReport], digest: str = "") -> str:
    """Column header, a "# deanon-bench <version>" line, then one row per report."""
    lines = ["\t".join(REPORT_COLUMNS), f"# deanon-bench {__version__} params={digest}"]
    lines += ["\t".join(report_row(r)) for r in reports]
    return "\n".join(lines) + "\n"


def render_sweep(rows: Sequence[tuple[str, CaseReport]], parameter: str) -> str:
    lines = ["\t".join(("value",) + REPORT_COLUMNS), f"# deanon-bench {__version__} sweep={parameter}"]
    lines += ["\t".join([value] + report_row(r)) for value, r in rows]
    return "\n".join(lines) + "\n"


def write_text(content: str, path: str | Path) -> None:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(content)
    except OSError as e:
        throw_exception(DatasetFormatError, "WriteFailed", f"{path}: {e}", "matrix.write_text()")


def write_report(reports: Sequence[CaseReport], path: str | Path, digest: str = "") -> None:
    write_text(render_report(reports, digest), path)


def write_sweep(rows: Sequence[tuple[str, CaseReport]], parameter: str, path: str | Path) -> None:
    write_text(render_sweep(rows, parameter), path)
