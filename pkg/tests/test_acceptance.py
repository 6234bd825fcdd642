"""End-to-end acceptance checks, one test per criterion.

Each test records a PASS/FAIL line that is printed in the terminal summary.
Search comparisons score permutations through a lookup table built from a full
sweep; training is deterministic per permutation, so a lookup returns exactly the
record a fresh training would.
"""

import json
import math
import statistics
import time

import numpy as np
import pytest

import oracles
from conftest import SEARCH_TRAIN, planted_task, record_criterion, three_qubit_task, toy_dataset
from qembed.cli import main
from qembed.config import DatasetSpec, StudyConfig
from qembed.data import pca_reduce, silhouette
from qembed.embedding import Permutation
from qembed.fitness import Evaluator, TableFitness, default_threads, evaluate
from qembed.noise import NoiseConfig, noisy_fitness
from qembed.reports import histogram
from qembed.search import GaConfig, crossover, mutate, random_search, run_ga, sweep, tournament_select
from qembed.simulator import GateOp, StateVector, apply_gate, apply_gates, init_zero_state
from qembed.training import QnnModel, TrainConfig, gradient
from test_cli import records_without_time
from test_simulator import dense, random_gate
from test_training import finite_difference


def check(number, name, passed, detail, elapsed=None, limit=None):
    if limit is not None:
        detail += f" ({elapsed:.1f}s, limit {limit:g}s)"
        passed = passed and elapsed < limit
    record_criterion(number, name, passed, detail)
    assert passed, detail


@pytest.fixture(scope="module")
def planted_sweep():
    started = time.perf_counter()
    report = sweep(2, Evaluator(planted_task(), SEARCH_TRAIN))
    return report, time.perf_counter() - started


@pytest.fixture(scope="module")
def three_qubit_sweep():
    started = time.perf_counter()
    report = sweep(3, Evaluator(three_qubit_task(), SEARCH_TRAIN), threads=default_threads())
    return report, time.perf_counter() - started


def test_criterion_01_ga_operators():
    started = time.perf_counter()
    p1, p2 = Permutation((3, 2, 1, 4, 5, 0)), Permutation((0, 5, 1, 2, 3, 4))
    child = crossover(p1, p2, pivot=p1.order.index(2))
    mutated = mutate(child, positions=(child.order.index(2), child.order.index(4)))
    a, b = Permutation((0, 1, 2, 3, 4, 5)), Permutation((5, 4, 3, 2, 1, 0))
    winner = tournament_select([(a, 82.63), (b, 91.18)], 2, np.random.default_rng(0))
    ok = child.order == (3, 2, 0, 5, 1, 4) and mutated.order == (3, 4, 0, 5, 1, 2) and winner == b
    check(1, "GA operator fidelity", ok, f"child {child}, mutated {mutated}, winner score 91.18={winner == b}",
          time.perf_counter() - started, 1)


def test_criterion_02_simulator():
    started = time.perf_counter()
    rng = np.random.default_rng(2)
    worst_unitary = 0.0
    for _ in range(500):
        m = random_gate(rng, 1).matrix()
        worst_unitary = max(worst_unitary, np.linalg.norm(m.conj().T @ m - np.eye(2)))
    cnot = GateOp.cnot(0, 1).matrix()
    worst_unitary = max(worst_unitary, np.linalg.norm(cnot.conj().T @ cnot - np.eye(4)))

    worst_drift = 0.0
    for n in range(1, 6):
        for _ in range(3):
            out = apply_gates(init_zero_state(n), [random_gate(rng, n) for _ in range(1000)])
            worst_drift = max(worst_drift, abs(out.norm() - 1))

    worst_local = 0.0
    for n in (1, 2, 3):
        for _ in range(100):
            v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
            s = StateVector(v / np.linalg.norm(v), n)
            g = random_gate(rng, n)
            worst_local = max(worst_local, np.abs(apply_gate(s, g).amplitudes - dense(g, n) @ s.amplitudes).max())
    ok = worst_unitary < 1e-12 and worst_drift < 1e-9 and worst_local < 1e-12
    check(2, "simulator correctness", ok,
          f"|U^dag U - I| {worst_unitary:.1e}, norm drift {worst_drift:.1e}, oracle gap {worst_local:.1e}",
          time.perf_counter() - started, 10)


def test_criterion_03_gradient_check():
    started = time.perf_counter()
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(1, 5))
        L = int(rng.integers(1, 3))
        perm = Permutation(tuple(rng.permutation(2 * n).tolist()))
        model = QnnModel.initialize(perm, L, seed=int(rng.integers(1 << 30)))
        B = int(rng.integers(1, 5))
        X = rng.uniform(0, math.pi, (B, 2 * n))
        y = rng.integers(0, 2, B)
        worst = max(worst, np.abs(gradient(model, (X, y)) - finite_difference(model, X, y)).max())
    check(3, "parameter-shift gradient", worst < 1e-4, f"max |shift - FD| {worst:.2e} over 50 instances",
          time.perf_counter() - started, 60)


def test_criterion_04_permutation_sensitivity(three_qubit_sweep):
    report, elapsed = three_qubit_sweep
    scores = report.scores
    occupied = sum(1 for *_, count in histogram(scores) if count)
    spread = scores.max() - scores.min()
    ok = len(scores) == 720 and spread > 0 and occupied >= 5
    check(4, "permutation sensitivity", ok,
          f"720 permutations, combined {scores.min():.2f}..{scores.max():.2f}, {occupied} occupied 1-point bins",
          elapsed, 1800)


def test_criterion_05_ga_finds_planted_optimum(planted_sweep):
    oracle, oracle_time = planted_sweep
    started = time.perf_counter() - oracle_time
    optimum = oracle.best.combined
    table = TableFitness(oracle.records)
    hits = []
    for seed in range(5):
        best = run_ga(GaConfig(s_pop=8, g=3, seed=seed), 2, table).best
        hits.append(best.combined == optimum)
    check(5, "GA vs sweep oracle", sum(hits) >= 4,
          f"optimum {optimum:.2f} ({oracle.best.perm}) found in {sum(hits)}/5 runs",
          time.perf_counter() - started, 300)


def _median_bests(sweep_report, n):
    table = TableFitness(sweep_report.records)
    ga = [run_ga(GaConfig(seed=s), n, table).best.combined for s in range(11)]
    rs = [random_search(n, GaConfig().budget, table, seed=s).best.combined for s in range(11)]
    return statistics.median(ga), statistics.median(rs)


def test_criterion_06_ga_vs_random(planted_sweep, three_qubit_sweep):
    # the charged time includes both oracle sweeps
    started = time.perf_counter() - planted_sweep[1] - three_qubit_sweep[1]
    ga2, rs2 = _median_bests(planted_sweep[0], 2)
    ga3, rs3 = _median_bests(three_qubit_sweep[0], 3)
    ok = ga2 >= rs2 and ga3 >= rs3
    check(6, "GA vs random at budget 100", ok,
          f"planted median GA {ga2:.2f} vs RS {rs2:.2f}; 3-qubit median GA {ga3:.2f} vs RS {rs3:.2f}",
          time.perf_counter() - started, 1800)


def test_criterion_07_noise_protocol():
    started = time.perf_counter()
    ds = toy_dataset()
    exact = True
    for perm in ((0, 1), (1, 0)):
        for runs in (1, 5):
            quiet = noisy_fitness(perm, ds, SEARCH_TRAIN, NoiseConfig(num_runs=runs))
            clean = evaluate(perm, ds, SEARCH_TRAIN)
            exact &= (quiet.train_acc, quiet.test_acc, quiet.combined) == (clean.train_acc, clean.test_acc, clean.combined)
    three = three_qubit_task()
    quiet = noisy_fitness((5, 1, 0, 2, 4, 3), three, SEARCH_TRAIN, NoiseConfig(num_runs=2))
    exact &= quiet.combined == evaluate((5, 1, 0, 2, 4, 3), three, SEARCH_TRAIN).combined

    drops = 0
    for k in range(5):
        cfg = TrainConfig(epochs=20, learning_rate=0.05, seed=k, init_seed=k)
        noisy = noisy_fitness((0, 1), ds, cfg, NoiseConfig(p1=0.01, p2=0.01, seed=k))
        drops += noisy.combined < evaluate((0, 1), ds, cfg).combined
    check(7, "noise protocol", exact and drops >= 4,
          f"zero-noise reduction bit-exact={exact}; p=0.01 degraded {drops}/5 paired runs",
          time.perf_counter() - started, 600)


def test_criterion_08_determinism(tmp_path):
    started = time.perf_counter()
    cfg = StudyConfig(n_qubits=2, seed=5, dataset=DatasetSpec(n_per_class=60, separation=8.0, planted=True),
                      train=SEARCH_TRAIN)
    path = tmp_path / "study.ini"
    cfg.save(path)
    for name in ("first", "second"):
        assert main(["ga", "--config", str(path), "--out", str(tmp_path / name), "--threads", "1"]) == 0
    a = records_without_time(tmp_path / "first" / "records.csv")
    b = records_without_time(tmp_path / "second" / "records.csv")
    check(8, "determinism", a == b and len(a) == 92, f"{len(a)} records identical across two ga runs",
          time.perf_counter() - started, 300)


def test_criterion_09_budget_accounting(tmp_path):
    started = time.perf_counter()
    counts = {}
    for cached in (False, True):
        cfg = StudyConfig(n_qubits=3, ga=GaConfig(cache_elites=cached))
        path = tmp_path / f"c{cached}.ini"
        cfg.save(path)
        out = tmp_path / f"out{cached}"
        assert main(["ga", "--config", str(path), "--out", str(out), "--dry-run", "--threads", "1"]) == 0
        report = json.loads((out / "report.json").read_text())
        counts[cached] = (report["evaluations"], report["trainings"], report["budget"])
    ok = counts[False] == (100, 100, 100) and counts[True] == (100, 92, 100)
    check(9, "budget accounting", ok,
          f"uncached evaluations/trainings {counts[False][:2]}, cached {counts[True][:2]}",
          time.perf_counter() - started, 1)


def test_criterion_10_silhouette_and_pca():
    started = time.perf_counter()
    rng = np.random.default_rng(10)
    mismatches = 0
    for _ in range(100):
        n = int(rng.integers(4, 40))
        X = rng.normal(size=(n, int(rng.integers(1, 8)))) * rng.uniform(0.01, 100)
        y = np.concatenate([[0, 0, 1, 1], rng.integers(0, 2, n - 4)])
        mismatches += silhouette(X, y) != oracles.silhouette_loop(X, y)
    worst = 0.0
    for _ in range(20):
        d = int(rng.integers(2, 9))
        X = rng.normal(size=(int(rng.integers(d + 1, 80)), d)) @ rng.normal(size=(d, d))
        Z = pca_reduce(X, d)
        worst = max(worst, abs(Z.var(axis=0, ddof=1).sum() - X.var(axis=0, ddof=1).sum()))
    check(10, "silhouette and PCA", mismatches == 0 and worst < 1e-8,
          f"{100 - mismatches}/100 silhouettes bit-identical to loop reference; variance gap {worst:.1e}",
          time.perf_counter() - started, 30)
