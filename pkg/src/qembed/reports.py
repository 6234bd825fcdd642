"""Serialization of search results: records.csv, report.json, histogram.csv, compare.txt."""

from __future__ import annotations

import csv
import json
import math
import statistics
from pathlib import Path

from .fitness import CSV_FIELDS, FitnessRecord
from .search import SearchReport

HISTOGRAM_WIDTH = 1.0
HISTOGRAM_RANGE = (0.0, 100.0)


def record_to_dict(rec: FitnessRecord) -> dict:
    return {
        "perm": str(rec.perm),
        "train_acc": rec.train_acc,
        "test_acc": rec.test_acc,
        "combined": rec.combined,
        "noisy": rec.noisy,
        "seed": rec.seed,
        "wall_time": rec.wall_time,
    }


def write_records_csv(records, path: str | Path) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS, lineterminator="\n")
        writer.writeheader()
        for rec in records:
            writer.writerow(rec.to_row())


def read_records_csv(path: str | Path) -> list[FitnessRecord]:
    with Path(path).open(newline="") as fh:
        return [FitnessRecord.from_row(row) for row in csv.DictReader(fh)]


def histogram(scores, width: float = HISTOGRAM_WIDTH, range_=HISTOGRAM_RANGE) -> list[tuple[float, float, int]]:
    """Counts per ``[start, start + width)`` bin; the top edge falls in the last bin."""
    lo, hi = range_
    nbins = int(math.ceil((hi - lo) / width))
    counts = [0] * nbins
    for s in scores:
        k = int(math.floor((s - lo) / width))
        counts[min(max(k, 0), nbins - 1)] += 1
    return [(lo + i * width, lo + (i + 1) * width, c) for i, c in enumerate(counts)]


def write_histogram_csv(scores, path: str | Path, width: float = HISTOGRAM_WIDTH) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["bin_start", "bin_end", "count"])
        for start, end, count in histogram(scores, width):
            writer.writerow([f"{start:g}", f"{end:g}", count])


def runtime_summary(report: SearchReport) -> dict:
    """Mean training time T and the linear ``budget * T`` runtime estimate."""
    times = [r.wall_time for r in report.records]
    mean_t = statistics.fmean(times) if times else 0.0
    return {
        "mean_eval_time": mean_t,
        "trained_time": math.fsum(times),
        "predicted_runtime": report.budget * mean_t,
    }


def report_to_dict(report: SearchReport, config: dict | None = None) -> dict:
    out = {
        "strategy": report.strategy,
        "config": config if config is not None else report.config,
        "budget": report.budget,
        "evaluations": report.evaluations,
        "trainings": report.trainings,
        "unique_permutations": report.unique_permutations,
        "total_time": report.total_time,
        "runtime": runtime_summary(report),
        "best": record_to_dict(report.best),
        "records": [record_to_dict(r) for r in report.records],
    }
    if report.generations:
        out["generations"] = [
            [{"perm": str(r.perm), "combined": r.combined} for r in gen] for gen in report.generations
        ]
    return out


def write_report_json(report: SearchReport, path: str | Path, config: dict | None = None) -> None:
    Path(path).write_text(json.dumps(report_to_dict(report, config), indent=2) + "\n")


def load_report(path: str | Path) -> dict:
    path = Path(path)
    if path.is_dir():
        path = path / "report.json"
    return json.loads(path.read_text())


def write_outputs(report: SearchReport, out_dir: str | Path, config: dict | None = None) -> None:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_records_csv(report.records, out_dir / "records.csv")
    write_report_json(report, out_dir / "report.json", config)
    write_histogram_csv(report.scores, out_dir / "histogram.csv")


def compare(ga: dict, rs: dict) -> dict:
    """Random-vs-GA summary row in the layout of a results table."""
    rs_scores = [r["combined"] for r in rs["records"]]
    best_rs = max(rs_scores)
    best_ga = ga["best"]["combined"]
    rs_time = rs["total_time"]
    ga_time = ga["total_time"]
    mismatch = ga["budget"] != rs["budget"]
    return {
        "mean_rs": statistics.fmean(rs_scores),
        "best_rs": best_rs,
        "best_ga": best_ga,
        "improvement": best_ga - best_rs,
        "runtime_rs": rs_time,
        "runtime_ga": ga_time,
        "runtime_delta_pct": 100.0 * (ga_time - rs_time) / rs_time if rs_time > 0 else 0.0,
        "budget_ga": ga["budget"],
        "budget_rs": rs["budget"],
        "budget_mismatch": mismatch,
    }


def render_compare(row: dict) -> str:
    lines = []
    if row["budget_mismatch"]:
        lines.append(
            f"WARNING: budget mismatch (ga={row['budget_ga']}, random={row['budget_rs']}); "
            "comparison is not like-for-like"
        )
    lines += [
        f"{'RS mean':<22}{row['mean_rs']:.2f}",
        f"{'RS best':<22}{row['best_rs']:.2f}",
        f"{'GA best':<22}{row['best_ga']:.2f}",
        f"{'Improvement (GA-RS)':<22}{row['improvement']:.1f}",
        f"{'RS runtime (s)':<22}{row['runtime_rs']:.2f}",
        f"{'GA runtime (s)':<22}{row['runtime_ga']:.2f}",
        f"{'Runtime delta (%)':<22}{row['runtime_delta_pct']:.1f}",
        f"{'Budget mismatch':<22}{'yes' if row['budget_mismatch'] else 'no'}",
    ]
    return "\n".join(lines) + "\n"
