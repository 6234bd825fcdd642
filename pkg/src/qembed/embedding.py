"""Feature-to-qubit angle embedding.

Qubit ``q`` receives ``RX(x[order[2q]])`` followed by ``RY(x[order[2q+1]])``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigurationError
from .simulator import (
    StateVector,
    apply_1q_batch,
    init_zero_state,
    rx_matrix,
    ry_matrix,
)

FEATURES_PER_QUBIT = 2
MAX_COUNTABLE_FEATURES = 20


@dataclass(frozen=True)
class Permutation:
    """An ordering of feature indices; positions ``2q`` and ``2q+1`` feed qubit ``q``."""

    order: tuple[int, ...]

    def __post_init__(self):
        order = tuple(int(i) for i in self.order)
        if not order or len(order) % 2:
            raise ConfigurationError(f"permutation length must be even and positive, got {len(order)}")
        if sorted(order) != list(range(len(order))):
            raise ConfigurationError(f"not a permutation of 0..{len(order) - 1}: {order}")
        object.__setattr__(self, "order", order)

    @classmethod
    def identity(cls, num_qubits: int) -> "Permutation":
        return cls(tuple(range(FEATURES_PER_QUBIT * num_qubits)))

    @classmethod
    def parse(cls, text: str) -> "Permutation":
        try:
            return cls(tuple(int(tok) for tok in text.replace(" ", "").split(",")))
        except ValueError as exc:
            raise ConfigurationError(f"cannot parse permutation {text!r}: {exc}") from None

    @property
    def num_qubits(self) -> int:
        return len(self.order) // FEATURES_PER_QUBIT

    def qubit_pairs(self) -> list[tuple[int, int]]:
        """``(rx_feature, ry_feature)`` for each qubit."""
        return [(self.order[2 * q], self.order[2 * q + 1]) for q in range(self.num_qubits)]

    def __len__(self) -> int:
        return len(self.order)

    def __iter__(self):
        return iter(self.order)

    def __getitem__(self, i):
        return self.order[i]

    def __str__(self) -> str:
        return ",".join(map(str, self.order))


def as_permutation(perm: Permutation | Iterable[int]) -> Permutation:
    return perm if isinstance(perm, Permutation) else Permutation(tuple(perm))


def count_permutations(n: int) -> int:
    """Number of distinct embeddings of ``2n`` features on ``n`` qubits, ``(2n)!``."""
    if n < 1:
        raise ConfigurationError(f"qubit count must be >= 1, got {n}")
    features = FEATURES_PER_QUBIT * n
    if features > MAX_COUNTABLE_FEATURES:
        raise OverflowError(f"({features})! exceeds 64-bit range; exhaustive search is infeasible")
    return math.factorial(features)


def random_permutation(n: int, rng: np.random.Generator) -> Permutation:
    if n < 1:
        raise ConfigurationError(f"qubit count must be >= 1, got {n}")
    return Permutation(tuple(rng.permutation(FEATURES_PER_QUBIT * n).tolist()))


def embed_batch(psi: np.ndarray, perm: Permutation, X: np.ndarray) -> np.ndarray:
    """Embed each row of ``X`` into the matching row of ``psi`` (noiseless)."""
    for q, (fx, fy) in enumerate(perm.qubit_pairs()):
        psi = apply_1q_batch(psi, rx_matrix(X[:, fx]), q)
        psi = apply_1q_batch(psi, ry_matrix(X[:, fy]), q)
    return psi


def embed(state: StateVector, perm: Permutation | Sequence[int], x: Sequence[float]) -> StateVector:
    perm = as_permutation(perm)
    x = np.asarray(x, dtype=float)
    n = state.num_qubits
    if len(perm) != FEATURES_PER_QUBIT * n or x.shape != (len(perm),):
        raise ConfigurationError(
            f"{n} qubit(s) take {FEATURES_PER_QUBIT * n} features; "
            f"got permutation of length {len(perm)} and x of shape {x.shape}"
        )
    if not np.all(np.isfinite(x)):
        raise ConfigurationError("feature vector contains non-finite values")
    if not np.allclose(state.amplitudes, init_zero_state(n).amplitudes):
        raise ConfigurationError("embedding expects the |0...0> input state")
    out = embed_batch(state.amplitudes[None, :], perm, x[None, :])
    return StateVector(out[0], n)


@dataclass(frozen=True)
class AngleScaler:
    """Per-feature affine map of the training range onto ``[low, high]`` radians.

    Fit on the training split only; test rows are clipped to the same interval.
    """

    minimum: np.ndarray
    maximum: np.ndarray
    low: float = 0.0
    high: float = math.pi

    @classmethod
    def fit(cls, X: np.ndarray, low: float = 0.0, high: float = math.pi) -> "AngleScaler":
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[0] == 0:
            raise ConfigurationError("scaler needs a non-empty 2-D training matrix")
        if not np.all(np.isfinite(X)):
            raise ConfigurationError("training features contain non-finite values")
        if not -math.pi <= low < high <= math.pi:
            raise ConfigurationError(f"angle range [{low}, {high}] must lie inside [-pi, pi]")
        return cls(X.min(axis=0), X.max(axis=0), float(low), float(high))

    def transform(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if not np.all(np.isfinite(X)):
            raise ConfigurationError("features contain non-finite values")
        span = self.maximum - self.minimum
        safe = np.where(span > 0, span, 1.0)
        unit = np.where(span > 0, (X - self.minimum) / safe, 0.0)
        return self.low + (self.high - self.low) * np.clip(unit, 0.0, 1.0)
