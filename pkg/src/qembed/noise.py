"""Stochastic Pauli-trajectory noise and the averaged noisy-fitness protocol.

After every one-qubit gate the touched qubit suffers a uniformly chosen X, Y or Z
with probability ``p1``; after every CNOT each of its two qubits independently
does so with probability ``p2``. ``readout_flip`` flips decoded labels. Noise is
active during both training and evaluation of a run.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .embedding import as_permutation
from .errors import ConfigurationError, TrainingError
from .simulator import (
    GateOp,
    StateVector,
    apply_gate,
    apply_pauli_batch,
    sample_pauli_codes,
)

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class NoiseConfig:
    p1: float = 0.0
    p2: float = 0.0
    readout_flip: float = 0.0
    num_runs: int = 10
    seed: int = 0

    def __post_init__(self):
        for name in ("p1", "p2", "readout_flip"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigurationError(f"{name} must lie in [0, 1], got {value}")
        if self.num_runs < 1:
            raise ConfigurationError("num_runs must be >= 1")

    @property
    def is_silent(self) -> bool:
        return self.p1 == 0 and self.p2 == 0 and self.readout_flip == 0


def splitmix64(seed: int, index: int) -> int:
    """The ``index``-th SplitMix64 output for a stream started at ``seed``."""
    z = (seed + (index + 1) * 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def run_seed(cfg: NoiseConfig, run: int) -> int:
    return splitmix64(cfg.seed, run)


def apply_noisy_gate(
    state: StateVector, gate: GateOp, cfg: NoiseConfig, rng: np.random.Generator
) -> StateVector:
    state = apply_gate(state, gate)
    prob = cfg.p2 if gate.kind == "CNOT" else cfg.p1
    if prob <= 0:
        return state
    psi = state.amplitudes[None, :]
    for q in gate.qubits:
        psi = apply_pauli_batch(psi, state.num_qubits, q, sample_pauli_codes(1, prob, rng))
    return StateVector(psi[0], state.num_qubits)


def noisy_fitness(perm, dataset, train_cfg, noise_cfg: NoiseConfig):
    """Average ``num_runs`` noisy train+evaluate cycles into one fitness record.

    Run ``k`` draws its noise from ``splitmix64(noise_cfg.seed, k)``; the model
    initialization and shuffling seeds are shared by all runs. Accuracies are pooled
    over runs as total correct / total evaluated.
    """
    from .fitness import FitnessRecord
    from .training import QnnModel, train

    perm = as_permutation(perm)
    started = time.perf_counter()
    train_correct = train_total = test_correct = test_total = 0
    for run in range(noise_cfg.num_runs):
        rng = np.random.default_rng(run_seed(noise_cfg, run))
        model = QnnModel.initialize(perm, train_cfg.num_layers, train_cfg.init_seed,
                                    train_cfg.readout_qubit)
        try:
            result = train(model, dataset, train_cfg, noise=noise_cfg, rng=rng)
        except TrainingError as exc:
            raise exc.with_context(f"noise run {run}") from exc
        train_correct += result.train_correct
        train_total += result.train_total
        test_correct += result.test_correct
        test_total += result.test_total
    return FitnessRecord.from_counts(
        perm,
        train_correct, train_total, test_correct, test_total,
        noisy=True,
        seed=noise_cfg.seed,
        wall_time=time.perf_counter() - started,
    )
