"""
Command line entry point: ``python -m src.cli <subcommand> ...``

    synth        public dataset, pseudonymized release and ground truth
    anonymize    apply one of the four cases to a release
    attack       de-anonymize a release against a platform directory
    evaluate     score a mapping against the ground truth
    case-matrix  full pipeline over all four cases and several seeds
    sweep        case-matrix repeated over the values of one parameter

Exit codes: 0 success, 1 domain error, 2 usage error.
"""

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from src import __version__
from src.Platform import load_platform, save_platform, build_index
from src.anonymizers.graph import GraphAnonConfig, GraphTechnique
from src.anonymizers.text import TextAnonConfig, TextTechnique
from src.attack.config import AttackConfig, DegreeBuckets, normalize_weights
from src.attack.deanonymize import attack_all, sample_targets
from src.attack.results import load_mapping, save_mapping
from src.core.errors import BenchError
from src.core.io import load_dataset_dir, load_ground_truth, save_dataset, save_ground_truth
from src.harness.cases import CaseId, apply_case
from src.harness.matrix import (
    MatrixConfig,
    load_matrix_config,
    params_digest,
    render_report,
    render_sweep,
    run_matrix,
    run_sweep,
    write_text,
)
from src.harness.metrics import evaluate_attack
from src.harness.release import make_release
from src.harness.synth import SynthConfig, generate_synthetic

logger = logging.getLogger(__name__)

PUBLIC_DIR = "public"
RELEASE_DIR = "release"
PLATFORM_DIR = "platform"
TRUTH_FILE = "ground_truth.tsv"
CASE_CHOICES = [str(i) for i in range(1, 5)] + [f"case{i}" for i in range(1, 5)]


def _weights(text: str) -> tuple[float, float, float, float]:
    try:
        raw = [float(w) for w in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 4 comma-separated numbers, got {text!r}")
    if len(raw) != 4:
        raise argparse.ArgumentTypeError(f"expected 4 weights, got {len(raw)}")
    try:
        return normalize_weights(raw)
    except BenchError as e:
        raise argparse.ArgumentTypeError(e.desc)


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {value}")
    return value


def _emit(content: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(content)
    else:
        write_text(content, out)


# ----------------------------------------------------------------------
# Subcommands
# ----------------------------------------------------------------------


def cmd_synth(args: argparse.Namespace) -> None:
    config = SynthConfig(
        n_users=args.users,
        edges_per_new_vertex=args.edges_per_vertex,
        posts_per_user=args.posts_per_user,
        tokens_per_post=args.tokens_per_post,
        vocab_shared=args.vocab_shared,
        vocab_per_community=args.vocab_per_community,
        n_communities=args.communities,
        personal_term_prob=args.personal_term_prob,
        seed=args.seed,
    )
    public = generate_synthetic(config)
    anon, truth = make_release(public, args.seed)
    out = Path(args.out_dir)
    save_dataset(public, out / PUBLIC_DIR)
    save_dataset(anon, out / RELEASE_DIR)
    save_ground_truth(truth, out / TRUTH_FILE)
    if args.with_index:
        save_platform(build_index(public), out / PLATFORM_DIR)


def cmd_anonymize(args: argparse.Namespace) -> None:
    case = CaseId.parse(args.case)
    anon = load_dataset_dir(args.in_dir, "anon-release")
    g = GraphAnonConfig(
        technique=GraphTechnique(args.graph_technique), fraction=args.graph_fraction, k=args.k_degree, seed=args.seed
    )
    t = TextAnonConfig(technique=TextTechnique(args.text_technique), rate=args.text_rate, seed=args.seed)
    save_dataset(apply_case(anon, case, g, t), args.out_dir)


def cmd_attack(args: argparse.Namespace) -> None:
    anon = load_dataset_dir(args.anon_dir, "anon")
    index = load_platform(args.platform_dir)
    config = AttackConfig(
        top_k_posts=args.top_k,
        candidate_limit=args.candidates,
        weights=args.weights,
        histogram_buckets=DegreeBuckets(args.buckets),
        query_budget=args.query_budget,
    )
    targets = sample_targets(anon, args.sample, args.seed)
    results, log = attack_all(anon, index, config, jobs=args.jobs, targets=targets)
    save_mapping(results, args.out)
    logger.info("platform calls by operation: %s", dict(sorted(log.by_operation().items())))


def cmd_evaluate(args: argparse.Namespace) -> None:
    mapping = load_mapping(args.mapping)
    truth = load_ground_truth(args.truth)
    report = replace(evaluate_attack(mapping, truth, CaseId.parse(args.case)), seed=args.seed)
    _emit(render_report([report]), args.out)


def _matrix_config(args: argparse.Namespace) -> MatrixConfig:
    config = load_matrix_config(args.config) if args.config else MatrixConfig()
    overrides = {k: getattr(args, k) for k in ("n_seeds", "jobs", "sample") if getattr(args, k) is not None}
    return replace(config, **overrides)


def cmd_case_matrix(args: argparse.Namespace) -> None:
    config = _matrix_config(args)
    reports = run_matrix(config)
    _emit(render_report(reports, params_digest(config)), args.out)


def cmd_sweep(args: argparse.Namespace) -> None:
    config = _matrix_config(args)
    values = [v.strip() for v in args.values.split(";" if ";" in args.values else ",") if v.strip()]
    rows = run_sweep(config, args.param, values)
    _emit(render_sweep(rows, args.param), args.out)


# ----------------------------------------------------------------------
# Parser
# ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="deanon-bench", description="Cross-aspect de-anonymization benchmark.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default="WARNING", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    sub = parser.add_subparsers(dest="command", required=True, metavar="<command>")

    d = SynthConfig()
    p = sub.add_parser("synth", help="generate a public dataset and its pseudonymized release")
    p.add_argument("--users", type=_positive, default=d.n_users)
    p.add_argument("--edges-per-vertex", type=_positive, default=d.edges_per_new_vertex)
    p.add_argument("--posts-per-user", type=_positive, default=d.posts_per_user)
    p.add_argument("--tokens-per-post", type=_positive, default=d.tokens_per_post)
    p.add_argument("--vocab-shared", type=_positive, default=d.vocab_shared)
    p.add_argument("--vocab-per-community", type=_positive, default=d.vocab_per_community)
    p.add_argument("--communities", type=_positive, default=d.n_communities)
    p.add_argument("--personal-term-prob", type=float, default=d.personal_term_prob)
    p.add_argument("--seed", type=int, default=d.seed)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--with-index", action="store_true", help=f"also write {PLATFORM_DIR}/platform.h5")
    p.set_defaults(func=cmd_synth)

    g, t = GraphAnonConfig(), TextAnonConfig()
    p = sub.add_parser("anonymize", help="apply one anonymization case to a release")
    p.add_argument("--in-dir", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--case", required=True, choices=CASE_CHOICES)
    p.add_argument("--graph-technique", default=g.technique.value, choices=[x.value for x in GraphTechnique])
    p.add_argument("--graph-fraction", type=float, default=g.fraction)
    p.add_argument("--k-degree", type=_positive, default=g.k)
    p.add_argument("--text-technique", default=t.technique.value, choices=[x.value for x in TextTechnique])
    p.add_argument("--text-rate", type=float, default=t.rate)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_anonymize)

    a = AttackConfig()
    p = sub.add_parser("attack", help="map every anonymized user to a platform user")
    p.add_argument("--anon-dir", required=True)
    p.add_argument("--platform-dir", required=True, help="directory with platform.h5 or edges.tsv + posts.jsonl")
    p.add_argument("--top-k", type=_positive, default=a.top_k_posts)
    p.add_argument("--candidates", type=_positive, default=a.candidate_limit)
    p.add_argument("--weights", type=_weights, default=a.weights, metavar="W1,W2,W3,W4")
    p.add_argument("--buckets", default=a.histogram_buckets.value, choices=[x.value for x in DegreeBuckets])
    p.add_argument("--query-budget", type=_positive, default=None, help="platform calls per target")
    p.add_argument("--jobs", type=_positive, default=1)
    p.add_argument("--sample", type=_positive, default=None, help="attack this many seeded-random targets")
    p.add_argument("--seed", type=int, default=0, help="seed of the target sample")
    p.add_argument("--out", required=True, help="mapping.tsv")
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("evaluate", help="score a mapping against the ground truth")
    p.add_argument("--mapping", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--case", default="1", choices=CASE_CHOICES, help="case label of the report row")
    p.add_argument("--seed", type=int, default=0, help="seed recorded in the report row")
    p.add_argument("--out", type=Path, default=None, help="report file (default: stdout)")
    p.set_defaults(func=cmd_evaluate)

    for name, func, helptext in (
        ("case-matrix", cmd_case_matrix, "run all four cases over several seeds"),
        ("sweep", cmd_sweep, "repeat the case matrix over one parameter's values"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", default=None, help="TOML file with [synth] [graph] [text] [attack] [run]")
        p.add_argument("--seeds", dest="n_seeds", type=_positive, default=None)
        p.add_argument("--jobs", type=_positive, default=None)
        p.add_argument("--sample", type=_positive, default=None)
        p.add_argument("--out", type=Path, default=None, help="report file (default: stdout)")
        if name == "sweep":
            p.add_argument("--param", required=True, help="dotted field name, e.g. text.rate")
            p.add_argument("--values", required=True, help="comma-separated values (';' when values hold commas)")
        p.set_defaults(func=func)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    logging.basicConfig(
        level=args.log_level, format="%(asctime)s %(levelname)s %(name)s: %(message)s", stream=sys.stderr, force=True
    )
    try:
        args.func(args)
    except BenchError as e:
        print(f"error [{e.origin}] {e.reason}: {e.desc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
