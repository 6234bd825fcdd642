"""Combined-score fitness: mean of train and test accuracy of a freshly trained model."""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .embedding import Permutation, as_permutation
from .training import QnnModel, TrainConfig, percent, train

CSV_FIELDS = ("perm", "train_acc", "test_acc", "combined", "noisy", "seed", "wall_time")


@dataclass(frozen=True)
class FitnessRecord:
    perm: Permutation
    train_acc: float
    test_acc: float
    combined: float
    noisy: bool = False
    seed: int = 0
    wall_time: float = 0.0

    @classmethod
    def from_accuracies(cls, perm, train_acc: float, test_acc: float, **kw) -> "FitnessRecord":
        return cls(as_permutation(perm), train_acc, test_acc, combined_score(train_acc, test_acc), **kw)

    @classmethod
    def from_counts(cls, perm, train_correct, train_total, test_correct, test_total, **kw):
        return cls.from_accuracies(
            perm, percent(train_correct, train_total), percent(test_correct, test_total), **kw
        )

    def to_row(self) -> dict[str, str]:
        return {
            "perm": str(self.perm),
            "train_acc": repr(float(self.train_acc)),
            "test_acc": repr(float(self.test_acc)),
            "combined": repr(float(self.combined)),
            "noisy": "1" if self.noisy else "0",
            "seed": str(int(self.seed)),
            "wall_time": f"{self.wall_time:.6f}",
        }

    @classmethod
    def from_row(cls, row: dict[str, str]) -> "FitnessRecord":
        return cls(
            Permutation.parse(row["perm"]),
            float(row["train_acc"]),
            float(row["test_acc"]),
            float(row["combined"]),
            noisy=row["noisy"].strip() in ("1", "true", "True"),
            seed=int(row["seed"]),
            wall_time=float(row["wall_time"]),
        )

    def same_scores(self, other: "FitnessRecord") -> bool:
        return (self.perm, self.train_acc, self.test_acc, self.combined, self.noisy) == (
            other.perm, other.train_acc, other.test_acc, other.combined, other.noisy
        )


def combined_score(train_acc: float, test_acc: float) -> float:
    return (train_acc + test_acc) / 2


def evaluate(perm, dataset, train_cfg: TrainConfig, noise_cfg=None) -> FitnessRecord:
    """Train a fresh model for ``perm`` and score it.

    Every permutation starts from the same weights (``train_cfg.init_seed``), so only
    the embedding differs between records. With ``noise_cfg`` the averaged noisy
    protocol is used instead.
    """
    perm = as_permutation(perm)
    if noise_cfg is not None:
        from .noise import noisy_fitness

        return noisy_fitness(perm, dataset, train_cfg, noise_cfg)
    started = time.perf_counter()
    model = QnnModel.initialize(perm, train_cfg.num_layers, train_cfg.init_seed, train_cfg.readout_qubit)
    result = train(model, dataset, train_cfg)
    return FitnessRecord.from_counts(
        perm,
        result.train_correct, result.train_total, result.test_correct, result.test_total,
        noisy=False,
        seed=train_cfg.init_seed,
        wall_time=time.perf_counter() - started,
    )


FitnessFn = Callable[[Permutation], FitnessRecord]


@dataclass(frozen=True)
class Evaluator:
    """Picklable ``perm -> FitnessRecord`` closure over a dataset and configs."""

    dataset: object
    train_cfg: TrainConfig
    noise_cfg: object = None

    @property
    def num_qubits(self) -> int:
        return self.dataset.num_qubits

    def __call__(self, perm) -> FitnessRecord:
        return evaluate(perm, self.dataset, self.train_cfg, self.noise_cfg)


class TableFitness:
    """Fitness looked up from precomputed records (e.g. a finished sweep)."""

    def __init__(self, records: Iterable[FitnessRecord]):
        self.table = {r.perm: r for r in records}
        self.calls = 0

    def __call__(self, perm) -> FitnessRecord:
        self.calls += 1
        return self.table[as_permutation(perm)]


class StubFitness:
    """Deterministic pseudo-fitness for dry runs; no training happens.

    Scores are a hash of the permutation, so equal permutations always score equally.
    """

    def __init__(self, seed: int = 0, test_size: int = 40, train_size: int = 160):
        self.seed = seed
        self.test_size = test_size
        self.train_size = train_size
        self.calls = 0

    def __call__(self, perm) -> FitnessRecord:
        self.calls += 1
        perm = as_permutation(perm)
        rng = np.random.default_rng([self.seed, *perm.order])
        train_correct = int(rng.integers(self.train_size // 2, self.train_size + 1))
        test_correct = int(rng.integers(self.test_size // 2, self.test_size + 1))
        return FitnessRecord.from_counts(
            perm, train_correct, self.train_size, test_correct, self.test_size, seed=self.seed
        )


def default_threads() -> int:
    return os.cpu_count() or 1


def evaluate_many(fn: FitnessFn, perms: Sequence[Permutation], threads: int = 1) -> list[FitnessRecord]:
    """Evaluate permutations in order; ``threads > 1`` fans out to a process pool."""
    perms = [as_permutation(p) for p in perms]
    if threads <= 1 or len(perms) <= 1:
        return [fn(p) for p in perms]
    chunk = max(1, len(perms) // (4 * threads))
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, perms, chunksize=chunk))
