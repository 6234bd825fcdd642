import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qembed.fitness import StubFitness
from qembed.reports import (
    compare,
    histogram,
    load_report,
    read_records_csv,
    render_compare,
    report_to_dict,
    write_outputs,
)
from qembed.search import GaConfig, random_search, run_ga, sweep


def fake(best_ga, rs_scores, budget_ga=100, budget_rs=100, t_ga=2.0, t_rs=1.0):
    ga = {"best": {"combined": best_ga}, "budget": budget_ga, "total_time": t_ga}
    rs = {"records": [{"combined": s} for s in rs_scores], "budget": budget_rs, "total_time": t_rs}
    return ga, rs


class TestHistogram:
    @given(st.lists(st.floats(0, 100), max_size=200))
    def test_counts_sum(self, scores):
        bins = histogram(scores)
        assert len(bins) == 100
        assert sum(c for *_, c in bins) == len(scores)

    def test_edges(self):
        bins = histogram([0.0, 0.999, 1.0, 100.0])
        assert bins[0][2] == 2 and bins[1][2] == 1 and bins[-1][2] == 1

    def test_sweep_histogram_total(self, tmp_path):
        report = sweep(3, StubFitness())
        write_outputs(report, tmp_path)
        rows = (tmp_path / "histogram.csv").read_text().splitlines()
        assert rows[0] == "bin_start,bin_end,count"
        assert sum(int(r.split(",")[2]) for r in rows[1:]) == 720


class TestOutputs:
    def test_report_json_fields(self, tmp_path):
        report = run_ga(GaConfig(), 3, StubFitness())
        write_outputs(report, tmp_path)
        data = json.loads((tmp_path / "report.json").read_text())
        assert data["budget"] == 100 and data["evaluations"] == 100 and data["trainings"] == 92
        assert data["best"]["combined"] == max(r["combined"] for r in data["records"])
        assert len(data["generations"]) == 5
        assert data["runtime"]["predicted_runtime"] == pytest.approx(100 * data["runtime"]["mean_eval_time"])

    def test_records_round_trip(self, tmp_path):
        report = random_search(2, 10, StubFitness(), seed=1)
        write_outputs(report, tmp_path)
        back = read_records_csv(tmp_path / "records.csv")
        assert [r.perm for r in back] == [r.perm for r in report.records]
        assert [r.combined for r in back] == [r.combined for r in report.records]

    def test_load_report_accepts_directory(self, tmp_path):
        report = random_search(2, 3, StubFitness(), seed=1)
        write_outputs(report, tmp_path)
        assert load_report(tmp_path) == load_report(tmp_path / "report.json")
        assert load_report(tmp_path)["strategy"] == "random"

    def test_report_dict_is_json_safe(self):
        json.dumps(report_to_dict(run_ga(GaConfig(g=2), 2, StubFitness())))


class TestCompare:
    def test_positive_improvement(self):
        row = compare(*fake(90.61, [80.0, 85.75]))
        assert row["improvement"] == pytest.approx(4.86)
        assert "Improvement (GA-RS)   4.9" in render_compare(row)

    def test_negative_improvement(self):
        row = compare(*fake(72.12, [66.65, 73.43]))
        assert row["mean_rs"] == pytest.approx(70.04)
        assert "-1.3" in render_compare(row)

    def test_identical(self):
        row = compare(*fake(85.0, [85.0]))
        assert row["improvement"] == 0.0

    def test_budget_mismatch_warns(self):
        row = compare(*fake(85.0, [80.0], budget_rs=50))
        assert row["budget_mismatch"]
        assert render_compare(row).startswith("WARNING: budget mismatch")

    def test_runtime_delta(self):
        row = compare(*fake(85.0, [80.0], t_ga=3.0, t_rs=2.0))
        assert row["runtime_delta_pct"] == pytest.approx(50.0)
