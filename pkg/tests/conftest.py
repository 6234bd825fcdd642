import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from qembed.data import Dataset, stratified_split, synth_blobs  # noqa: E402
from qembed.training import TrainConfig  # noqa: E402

# Shared experimental tasks. Fixed once, used by unit and acceptance tests alike.
# The search tasks train with lr 0.05: at 3e-3 the ~35 Adam steps of a 5-epoch run
# barely move the weights, and scores mostly reflect the random initialization.
SEARCH_TRAIN = TrainConfig(learning_rate=0.05)


def planted_task() -> Dataset:
    """2 qubits, 4 features; only features 0 and 1 separate the classes."""
    return synth_blobs(4, 60, 8.0, seed=0, planted=True)


def three_qubit_task() -> Dataset:
    return synth_blobs(6, 60, 4.0, seed=0)


def toy_dataset() -> Dataset:
    """20 linearly separable points for one qubit: the class is the sign of feature 0."""
    rng = np.random.default_rng(11)
    f0 = np.concatenate([rng.uniform(-1.0, -0.2, 10), rng.uniform(0.2, 1.0, 10)])
    f1 = rng.uniform(-1.0, 1.0, 20)
    y = np.repeat([0, 1], 10)
    train, test = stratified_split(y, 0.8, seed=0)
    return Dataset(np.column_stack([f0, f1]), y, train, test, name="toy")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


ACCEPTANCE_LINES: dict[int, str] = {}


def record_criterion(number: int, name: str, passed: bool, detail: str) -> None:
    ACCEPTANCE_LINES[number] = f"[{'PASS' if passed else 'FAIL'}] criterion {number:>2} {name}: {detail}"
    print(ACCEPTANCE_LINES[number])


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[number])
