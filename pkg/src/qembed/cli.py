"""Command-line entry point.

    qembed sweep   --config study.ini --out results/ [--threads K] [--dry-run]
    qembed random  --config study.ini --out results/
    qembed ga      --config study.ini --out results/
    qembed run     --config study.ini --out results/      # strategy from [study]
    qembed compare --ga results/ga --random results/rs [--out dir]
    qembed synth   --config study.ini --out data.csv
    qembed defaults > study.ini

Exit codes: 0 success, 1 configuration error, 2 runtime or training failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path

from .config import StudyConfig
from .errors import ConfigurationError, InfeasibleError, QembedError, TrainingError
from .fitness import Evaluator, StubFitness, default_threads
from .reports import compare, load_report, render_compare, write_outputs
from .search import random_search, run_ga, sweep

log = logging.getLogger("qembed")


def run_study(cfg: StudyConfig, strategy: str, threads: int = 1, dry_run: bool = False, base_dir=None):
    """Run one search and return its :class:`~qembed.search.SearchReport`."""
    if dry_run:
        fitness = StubFitness(seed=cfg.seed)
    else:
        dataset = cfg.dataset.build(cfg.n_qubits, base_dir)
        fitness = Evaluator(dataset, cfg.train, cfg.noise)
    n = cfg.n_qubits
    if strategy == "sweep":
        return sweep(n, fitness, cap=cfg.sweep.cap, threads=threads)
    if strategy == "random":
        return random_search(n, cfg.random.budget, fitness, seed=cfg.random.seed, threads=threads)
    return run_ga(cfg.ga, n, fitness, threads=threads)


def _cmd_search(args, strategy: str | None) -> int:
    try:
        cfg = StudyConfig.load(args.config)
        strategy = strategy or cfg.strategy
        cfg = dataclasses.replace(cfg, strategy=strategy)
        threads = args.threads if args.threads is not None else default_threads()
        if threads < 1:
            raise ConfigurationError("--threads must be >= 1")
        if cfg.dataset.source == "csv" and not args.dry_run:
            # surface dataset problems as configuration errors before any output exists
            cfg.dataset.build(cfg.n_qubits, Path(args.config).parent)
    except (ConfigurationError, InfeasibleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    try:
        report = run_study(cfg, strategy, threads, args.dry_run, Path(args.config).parent)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except InfeasibleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (TrainingError, QembedError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    config = cfg.to_dict()
    config["dry_run"] = bool(args.dry_run)
    write_outputs(report, args.out, config)
    best = report.best
    print(f"{strategy}: best {best.perm} combined {best.combined:.2f} "
          f"(train {best.train_acc:.2f}, test {best.test_acc:.2f}); "
          f"budget {report.budget}, trainings {report.trainings}")
    return 0


def _cmd_compare(args) -> int:
    try:
        ga = load_report(args.ga)
        rs = load_report(args.random)
    except (OSError, ValueError) as exc:
        print(f"error: cannot read report: {exc}", file=sys.stderr)
        return 1
    row = compare(ga, rs)
    if row["budget_mismatch"]:
        log.warning("budget mismatch: ga=%s random=%s", row["budget_ga"], row["budget_rs"])
    text = render_compare(row)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "compare.txt").write_text(text)
    sys.stdout.write(text)
    return 0


def _cmd_synth(args) -> int:
    try:
        cfg = StudyConfig.load(args.config)
        if cfg.dataset.source != "synth":
            raise ConfigurationError("synth needs [dataset] source = synth")
        dataset = cfg.dataset.build(cfg.n_qubits)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    dataset.to_csv(out)
    print(f"wrote {dataset.features.shape[0]} rows x {dataset.num_features} features to {out}")
    return 0


def _cmd_defaults(args) -> int:
    sys.stdout.write(StudyConfig().to_ini())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qembed", description="Search feature-to-qubit angle embeddings.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (
        ("sweep", "evaluate every permutation"),
        ("random", "evaluate uniformly random permutations"),
        ("ga", "genetic-algorithm search"),
        ("run", "run the strategy named in the config"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True)
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--threads", type=int, default=None, help="worker processes (default: all cores)")
        p.add_argument("--dry-run", action="store_true", help="use a hash-based fitness stub, no training")
        p.set_defaults(func=lambda a, s=(None if name == "run" else name): _cmd_search(a, s))

    p = sub.add_parser("compare", help="compare a GA report against a random-search report")
    p.add_argument("--ga", required=True, help="GA report.json or its directory")
    p.add_argument("--random", required=True, help="random-search report.json or its directory")
    p.add_argument("--out", default=None, help="directory for compare.txt")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("synth", help="write the configured synthetic dataset as CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True, help="CSV path")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("defaults", help="print a config file with every default")
    p.set_defaults(func=_cmd_defaults)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
