"""QNN forward pass, MSE loss, parameter-shift gradients and the training loop.

The model reads ``<Z>`` on one qubit after ``SEL(embed(|0...0>, perm, x))``.
Label 0 maps to target +1 and label 1 to target -1; a prediction is label 0
whenever ``<Z> >= 0``.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .embedding import FEATURES_PER_QUBIT, AngleScaler, Permutation, as_permutation
from .errors import ConfigurationError, TrainingError, UsageError
from .simulator import (
    SelAnsatz,
    apply_1q_batch,
    apply_cnot_batch,
    expval_z_batch,
    random_pauli_batch,
    rot_matrix,
    rx_matrix,
    ry_matrix,
    sel_cnot_pairs,
    sel_ranges,
    zero_states,
)

if TYPE_CHECKING:
    from .data import Dataset
    from .noise import NoiseConfig

SHIFT = math.pi / 2
OPTIMIZERS = ("adam", "sgd")
# rows per simulator call during accuracy evaluation
_EVAL_CHUNK = 4096


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 5
    learning_rate: float = 3e-3
    batch_size: int = 16
    seed: int = 0
    optimizer: str = "adam"
    num_layers: int = 2
    init_seed: int = 0
    readout_qubit: int = 0
    angle_low: float = 0.0
    angle_high: float = math.pi

    def __post_init__(self):
        if self.epochs < 0:
            raise ConfigurationError("epochs must be >= 0")
        if not self.learning_rate > 0:
            raise ConfigurationError("learning_rate must be positive")
        if self.batch_size < 1:
            raise ConfigurationError("batch_size must be >= 1")
        if self.optimizer not in OPTIMIZERS:
            raise ConfigurationError(f"optimizer must be one of {OPTIMIZERS}, got {self.optimizer!r}")
        if self.num_layers < 1:
            raise ConfigurationError("num_layers must be >= 1")
        if self.readout_qubit < 0:
            raise ConfigurationError("readout_qubit must be >= 0")


@dataclass(frozen=True)
class QnnModel:
    ansatz: SelAnsatz
    perm: Permutation
    readout_qubit: int = 0

    def __post_init__(self):
        perm = as_permutation(self.perm)
        object.__setattr__(self, "perm", perm)
        if self.ansatz.num_qubits * FEATURES_PER_QUBIT != len(perm):
            raise ConfigurationError(
                f"ansatz has {self.ansatz.num_qubits} qubits but permutation has {len(perm)} features"
            )
        if not 0 <= self.readout_qubit < self.ansatz.num_qubits:
            raise ConfigurationError(f"readout qubit {self.readout_qubit} out of range")

    @classmethod
    def initialize(cls, perm, num_layers: int, seed: int, readout_qubit: int = 0) -> "QnnModel":
        perm = as_permutation(perm)
        weights = init_weights(perm.num_qubits, num_layers, seed)
        return cls(SelAnsatz(perm.num_qubits, num_layers, weights), perm, readout_qubit)

    @property
    def num_qubits(self) -> int:
        return self.ansatz.num_qubits

    @property
    def weights(self) -> np.ndarray:
        return self.ansatz.weights

    def with_weights(self, weights: np.ndarray) -> "QnnModel":
        ansatz = SelAnsatz(self.ansatz.num_qubits, self.ansatz.num_layers, weights)
        return replace(self, ansatz=ansatz)


@dataclass(frozen=True)
class TrainResult:
    train_accuracy: float
    test_accuracy: float
    loss_curve: tuple[float, ...]
    wall_time: float
    train_correct: int
    train_total: int
    test_correct: int
    test_total: int
    weights: np.ndarray = field(repr=False, compare=False)


def init_weights(num_qubits: int, num_layers: int, seed: int) -> np.ndarray:
    """Uniform ``[0, 2pi)`` weights drawn from a dedicated generator."""
    rng = np.random.default_rng(seed)
    return rng.uniform(0.0, 2 * math.pi, size=(num_layers, num_qubits, 3))


def run_circuits(
    perm: Permutation,
    X: np.ndarray,
    weights: np.ndarray,
    readout_qubit: int = 0,
    noise: "NoiseConfig | None" = None,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """``<Z>`` on the readout qubit for every row of angle matrix ``X``.

    ``weights`` is either one ``(L, n, 3)`` tensor shared by all rows or a
    ``(rows, L, n, 3)`` stack. With ``noise``, a random Pauli may follow every gate.
    """
    X = np.asarray(X, dtype=float)
    n = perm.num_qubits
    rows = X.shape[0]
    per_row = weights.ndim == 4
    num_layers = weights.shape[-3]
    p1 = noise.p1 if noise is not None else 0.0
    p2 = noise.p2 if noise is not None else 0.0
    if (p1 > 0 or p2 > 0) and rng is None:
        raise ConfigurationError("noisy simulation needs a random generator")

    psi = zero_states(rows, n)
    for q, (fx, fy) in enumerate(perm.qubit_pairs()):
        psi = apply_1q_batch(psi, rx_matrix(X[:, fx]), q)
        psi = random_pauli_batch(psi, n, q, p1, rng)
        psi = apply_1q_batch(psi, ry_matrix(X[:, fy]), q)
        psi = random_pauli_batch(psi, n, q, p1, rng)

    for layer, r in enumerate(sel_ranges(n, num_layers)):
        for q in range(n):
            if per_row:
                w = weights[:, layer, q, :]
                mat = rot_matrix(w[:, 0], w[:, 1], w[:, 2])
            else:
                mat = rot_matrix(*weights[layer, q])
            psi = apply_1q_batch(psi, mat, q)
            psi = random_pauli_batch(psi, n, q, p1, rng)
        for c, t in sel_cnot_pairs(n, r):
            psi = apply_cnot_batch(psi, n, c, t)
            psi = random_pauli_batch(psi, n, c, p2, rng)
            psi = random_pauli_batch(psi, n, t, p2, rng)

    return expval_z_batch(psi, n, readout_qubit)


def _as_batch(batch) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(batch, tuple) and len(batch) == 2 and np.ndim(batch[0]) == 2:
        X, y = batch
    else:
        batch = list(batch)
        if not batch:
            raise UsageError("batch is empty")
        X = [x for x, _ in batch]
        y = [label for _, label in batch]
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=int)
    if X.shape[0] == 0:
        raise UsageError("batch is empty")
    if X.ndim != 2 or y.shape != (X.shape[0],):
        raise ConfigurationError("batch features must be 2-D with one label per row")
    return X, y


def _check_features(model: QnnModel, X: np.ndarray) -> None:
    if X.shape[-1] != len(model.perm):
        raise ConfigurationError(
            f"model embeds {len(model.perm)} features, input has {X.shape[-1]}"
        )


def targets(labels: np.ndarray) -> np.ndarray:
    return np.where(np.asarray(labels) == 0, 1.0, -1.0)


def forward(model: QnnModel, x: Sequence[float]) -> float:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ConfigurationError("forward takes a single feature vector")
    _check_features(model, x)
    return float(run_circuits(model.perm, x[None, :], model.weights, model.readout_qubit)[0])


def forward_batch(model: QnnModel, X: np.ndarray, noise=None, rng=None) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    _check_features(model, X)
    out = []
    for start in range(0, X.shape[0], _EVAL_CHUNK):
        out.append(
            run_circuits(model.perm, X[start:start + _EVAL_CHUNK], model.weights,
                         model.readout_qubit, noise, rng)
        )
    return np.concatenate(out) if out else np.zeros(0)


def decide(expval) -> np.ndarray:
    """Label 0 for ``<Z> >= 0``, else 1."""
    return np.where(np.asarray(expval) >= 0.0, 0, 1)


def predict(model: QnnModel, x: Sequence[float]) -> int:
    return int(decide(forward(model, x)))


def loss(model: QnnModel, batch) -> float:
    """Mean squared error between ``<Z>`` and the +/-1 targets."""
    X, y = _as_batch(batch)
    _check_features(model, X)
    f = run_circuits(model.perm, X, model.weights, model.readout_qubit)
    return float(np.mean((f - targets(y)) ** 2))


def _shift_stack(weights: np.ndarray) -> np.ndarray:
    """Base weights followed by (+shift, -shift) copies for every parameter."""
    num = weights.size
    stack = np.repeat(weights[None], 2 * num + 1, axis=0)
    flat = stack.reshape(2 * num + 1, num)
    j = np.arange(num)
    flat[1 + 2 * j, j] += SHIFT
    flat[2 + 2 * j, j] -= SHIFT
    return stack


def loss_and_gradient(
    model: QnnModel,
    X: np.ndarray,
    y: np.ndarray,
    noise: "NoiseConfig | None" = None,
    rng: np.random.Generator | None = None,
) -> tuple[float, np.ndarray]:
    """MSE loss and its parameter-shift gradient, in one batched simulator call."""
    weights = model.weights
    num = weights.size
    B = X.shape[0]
    stack = _shift_stack(weights)
    W = np.repeat(stack, B, axis=0)
    Xs = np.tile(X, (2 * num + 1, 1))
    f = run_circuits(model.perm, Xs, W, model.readout_qubit, noise, rng).reshape(2 * num + 1, B)
    resid = f[0] - targets(y)
    dexp = 0.5 * (f[1::2] - f[2::2])
    grad = (2.0 / B) * (dexp @ resid)
    return float(np.mean(resid**2)), grad.reshape(weights.shape)


def gradient(model: QnnModel, batch) -> np.ndarray:
    X, y = _as_batch(batch)
    _check_features(model, X)
    return loss_and_gradient(model, X, y)[1]


class _Adam:
    def __init__(self, shape, lr: float, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.m = np.zeros(shape)
        self.v = np.zeros(shape)
        self.t = 0

    def step(self, w: np.ndarray, g: np.ndarray) -> np.ndarray:
        self.t += 1
        self.m = self.beta1 * self.m + (1 - self.beta1) * g
        self.v = self.beta2 * self.v + (1 - self.beta2) * g * g
        m_hat = self.m / (1 - self.beta1**self.t)
        v_hat = self.v / (1 - self.beta2**self.t)
        return w - self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


class _Sgd:
    def __init__(self, shape, lr: float):
        self.lr = lr

    def step(self, w: np.ndarray, g: np.ndarray) -> np.ndarray:
        return w - self.lr * g


def count_correct(
    model: QnnModel,
    X: np.ndarray,
    y: np.ndarray,
    noise: "NoiseConfig | None" = None,
    rng: np.random.Generator | None = None,
) -> int:
    pred = decide(forward_batch(model, X, noise, rng))
    flip = noise.readout_flip if noise is not None else 0.0
    if flip > 0:
        pred = pred ^ (rng.random(pred.shape[0]) < flip)
    return int(np.sum(pred == y))


def percent(correct: int, total: int) -> float:
    if total <= 0:
        raise UsageError("accuracy of an empty split is undefined")
    # integer numerator keeps equal ratios bit-identical across run counts
    return 100 * correct / total


def train(
    model: QnnModel,
    dataset: "Dataset",
    cfg: TrainConfig,
    noise: "NoiseConfig | None" = None,
    rng: np.random.Generator | None = None,
) -> TrainResult:
    """Minibatch training of the SEL weights; returns final train/test accuracies.

    Features are min-max scaled to ``[angle_low, angle_high]`` using the training split.
    Shuffling uses ``cfg.seed``; ``rng`` drives noise draws only.
    """
    started = time.perf_counter()
    if dataset.num_features != len(model.perm):
        raise ConfigurationError(
            f"dataset has {dataset.num_features} features, model embeds {len(model.perm)}"
        )
    scaler = AngleScaler.fit(dataset.X_train, cfg.angle_low, cfg.angle_high)
    X_train = scaler.transform(dataset.X_train)
    y_train = dataset.y_train
    X_test = scaler.transform(dataset.X_test)
    y_test = dataset.y_test
    if X_train.shape[0] == 0 or X_test.shape[0] == 0:
        raise UsageError("train and test splits must both be non-empty")

    opt = _Adam(model.weights.shape, cfg.learning_rate) if cfg.optimizer == "adam" else _Sgd(
        model.weights.shape, cfg.learning_rate
    )
    shuffler = np.random.default_rng(cfg.seed)
    weights = np.array(model.weights)
    loss_curve = []
    step = 0
    for _ in range(cfg.epochs):
        order = shuffler.permutation(X_train.shape[0])
        epoch_losses = []
        for start in range(0, order.size, cfg.batch_size):
            idx = order[start:start + cfg.batch_size]
            current = model.with_weights(weights)
            value, grad = loss_and_gradient(current, X_train[idx], y_train[idx], noise, rng)
            if not math.isfinite(value) or not np.all(np.isfinite(grad)):
                raise TrainingError("non-finite loss", step=step)
            weights = opt.step(weights, grad)
            if not np.all(np.isfinite(weights)):
                raise TrainingError("non-finite weights", step=step)
            epoch_losses.append(value)
            step += 1
        loss_curve.append(float(np.mean(epoch_losses)))

    trained = model.with_weights(weights)
    train_correct = count_correct(trained, X_train, y_train, noise, rng)
    test_correct = count_correct(trained, X_test, y_test, noise, rng)
    return TrainResult(
        train_accuracy=percent(train_correct, y_train.size),
        test_accuracy=percent(test_correct, y_test.size),
        loss_curve=tuple(loss_curve),
        wall_time=time.perf_counter() - started,
        train_correct=train_correct,
        train_total=int(y_train.size),
        test_correct=test_correct,
        test_total=int(y_test.size),
        weights=weights,
    )
