"""Datasets: CSV ingestion, synthetic Gaussian blobs, PCA, silhouette, stratified splits."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigurationError, UsageError

DEFAULT_SPLIT_RATIO = 0.8


@dataclass(frozen=True)
class Dataset:
    features: np.ndarray
    labels: np.ndarray
    train_idx: np.ndarray
    test_idx: np.ndarray
    name: str = "dataset"
    planted_features: tuple[int, ...] = field(default=(), compare=False)

    def __post_init__(self):
        X = np.asarray(self.features, dtype=float)
        y = np.asarray(self.labels).astype(int)
        if X.ndim != 2 or y.shape != (X.shape[0],):
            raise ConfigurationError(f"features {X.shape} and labels {y.shape} do not line up")
        if X.shape[1] == 0 or X.shape[1] % 2:
            raise ConfigurationError(f"feature count must be even and positive, got {X.shape[1]}")
        if set(np.unique(y).tolist()) != {0, 1}:
            raise ConfigurationError("dataset needs exactly the two labels 0 and 1")
        train = np.asarray(self.train_idx, dtype=int)
        test = np.asarray(self.test_idx, dtype=int)
        if np.intersect1d(train, test).size:
            raise ConfigurationError("train and test splits overlap")
        if not np.array_equal(np.sort(np.concatenate([train, test])), np.arange(X.shape[0])):
            raise ConfigurationError("train and test splits must cover every row exactly once")
        for name, arr in (("features", X), ("labels", y), ("train_idx", train), ("test_idx", test)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def num_features(self) -> int:
        return self.features.shape[1]

    @property
    def num_qubits(self) -> int:
        return self.num_features // 2

    @property
    def X_train(self) -> np.ndarray:
        return self.features[self.train_idx]

    @property
    def y_train(self) -> np.ndarray:
        return self.labels[self.train_idx]

    @property
    def X_test(self) -> np.ndarray:
        return self.features[self.test_idx]

    @property
    def y_test(self) -> np.ndarray:
        return self.labels[self.test_idx]

    def to_csv(self, path: str | Path) -> None:
        """Write ``f0..f{k-1},label`` rows; :func:`load_csv` reads this back."""
        path = Path(path)
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow([f"f{i}" for i in range(self.num_features)] + ["label"])
            for row, label in zip(self.features, self.labels):
                writer.writerow([repr(float(v)) for v in row] + [int(label)])


def stratified_split(labels: np.ndarray, split_ratio: float, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Shuffle each class with ``seed`` and send ``round(ratio * count)`` rows to train."""
    if not 0.0 < split_ratio < 1.0:
        raise ConfigurationError(f"split ratio must lie in (0, 1), got {split_ratio}")
    labels = np.asarray(labels)
    rng = np.random.default_rng(seed)
    train, test = [], []
    for cls in np.unique(labels):
        idx = rng.permutation(np.flatnonzero(labels == cls))
        if idx.size < 2:
            raise ConfigurationError(f"class {cls} has {idx.size} sample(s); need at least 2")
        k = min(max(int(round(split_ratio * idx.size)), 1), idx.size - 1)
        train.append(idx[:k])
        test.append(idx[k:])
    return np.sort(np.concatenate(train)), np.sort(np.concatenate(test))


def _encode_labels(raw: list[str]) -> np.ndarray:
    classes = sorted(set(raw))
    if len(classes) != 2:
        raise ConfigurationError(f"binary classification needs exactly 2 classes, found {len(classes)}")
    if set(classes) == {"0", "1"}:
        mapping = {"0": 0, "1": 1}
    else:
        try:
            ordered = sorted(classes, key=float)
        except ValueError:
            ordered = classes
        mapping = {c: i for i, c in enumerate(ordered)}
    return np.array([mapping[v] for v in raw], dtype=int)


def load_csv(
    path: str | Path,
    label_column: str | int = "label",
    num_features: int | None = None,
    split_ratio: float = DEFAULT_SPLIT_RATIO,
    seed: int = 0,
    header: bool = True,
) -> Dataset:
    """Load a feature CSV; every column except ``label_column`` is a feature, in file order."""
    path = Path(path)
    with path.open(newline="") as fh:
        rows = [(lineno, row) for lineno, row in enumerate(csv.reader(fh), start=1) if row]
    if header:
        if not rows:
            raise ConfigurationError(f"{path}: empty file")
        names = [c.strip() for c in rows[0][1]]
        rows = rows[1:]
    else:
        names = None
    if not rows:
        raise ConfigurationError(f"{path}: no data rows")
    width = len(rows[0][1])

    if isinstance(label_column, str) and not label_column.lstrip("-").isdigit():
        if names is None or label_column not in names:
            raise ConfigurationError(f"{path}: label column {label_column!r} not found")
        label_pos = names.index(label_column)
    else:
        label_pos = int(label_column)
        if label_pos < 0:
            label_pos += width
        if not 0 <= label_pos < width:
            raise ConfigurationError(f"{path}: label column index {label_column} out of range")

    n_feat = width - 1
    if num_features is not None and num_features != n_feat:
        raise ConfigurationError(f"{path}: expected {num_features} feature columns, file has {n_feat}")
    if n_feat % 2:
        raise ConfigurationError(f"{path}: feature count must be even, got {n_feat}")

    feats, raw_labels = [], []
    for lineno, row in rows:
        if len(row) != width:
            raise ConfigurationError(f"{path}:{lineno}: expected {width} columns, got {len(row)}")
        values = [v.strip() for i, v in enumerate(row) if i != label_pos]
        try:
            parsed = [float(v) for v in values]
        except ValueError as exc:
            raise ConfigurationError(f"{path}:{lineno}: {exc}") from None
        if not all(math.isfinite(v) for v in parsed):
            raise ConfigurationError(f"{path}:{lineno}: non-finite feature value")
        feats.append(parsed)
        raw_labels.append(row[label_pos].strip())

    labels = _encode_labels(raw_labels)
    train, test = stratified_split(labels, split_ratio, seed)
    return Dataset(np.array(feats, dtype=float), labels, train, test, name=path.stem)


def synth_blobs(
    n_features: int,
    n_per_class: int,
    separation: float,
    seed: int,
    planted: bool = False,
    split_ratio: float = DEFAULT_SPLIT_RATIO,
    name: str | None = None,
) -> Dataset:
    """Two unit-variance isotropic Gaussian clusters whose centroids are ``separation`` apart.

    The separation direction is a seeded random unit vector. With ``planted`` it is
    confined to features 0 and 1, leaving every other feature pure noise.
    """
    if separation < 0:
        raise ConfigurationError("separation must be non-negative")
    if n_features < 2 or n_features % 2:
        raise ConfigurationError(f"feature count must be even and >= 2, got {n_features}")
    if n_per_class < 2:
        raise ConfigurationError("need at least 2 samples per class")
    rng = np.random.default_rng(seed)
    direction = np.zeros(n_features)
    signal = 2 if planted else n_features
    direction[:signal] = rng.normal(size=signal)
    direction /= np.linalg.norm(direction)
    offset = 0.5 * separation * direction
    X0 = rng.normal(size=(n_per_class, n_features)) - offset
    X1 = rng.normal(size=(n_per_class, n_features)) + offset
    X = np.vstack([X0, X1])
    y = np.repeat([0, 1], n_per_class)
    train, test = stratified_split(y, split_ratio, seed)
    if name is None:
        name = f"blobs{'-planted' if planted else ''}-{n_features}f-sep{separation:g}-s{seed}"
    return Dataset(X, y, train, test, name=name, planted_features=(0, 1) if planted else ())


def pca_reduce(features: np.ndarray, k: int, return_components: bool = False):
    """Project centred data onto the top-``k`` covariance eigenvectors.

    Eigenvectors are ordered by descending eigenvalue and signed so that each one's
    largest-magnitude entry is positive.
    """
    X = np.asarray(features, dtype=float)
    if X.ndim != 2:
        raise UsageError("PCA needs a 2-D matrix")
    rows, cols = X.shape
    if not 1 <= k <= min(rows, cols):
        raise UsageError(f"k={k} must lie in [1, min(rows, cols)={min(rows, cols)}]")
    centred = X - X.mean(axis=0)
    cov = centred.T @ centred / max(rows - 1, 1)
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1][:k]
    components = eigvecs[:, order]
    pivots = np.argmax(np.abs(components), axis=0)
    signs = np.sign(components[pivots, np.arange(k)])
    components = components * np.where(signs == 0, 1.0, signs)
    projected = centred @ components
    if return_components:
        return projected, components
    return projected


def silhouette(features: np.ndarray, labels: np.ndarray) -> float:
    """Mean silhouette coefficient with Euclidean distances.

    Sums are accumulated left to right (``cumsum``) so the result does not depend on
    numpy's pairwise-summation blocking.
    """
    X = np.asarray(features, dtype=float)
    y = np.asarray(labels)
    if X.ndim != 2 or y.shape != (X.shape[0],):
        raise UsageError("features must be 2-D with one label per row")
    classes, counts = np.unique(y, return_counts=True)
    if classes.size < 2:
        raise UsageError("silhouette needs at least two classes")
    if counts.min() < 2:
        raise UsageError("every class needs at least 2 samples")

    diff = X[:, None, :] - X[None, :, :]
    dist = np.sqrt(np.cumsum(diff * diff, axis=2)[..., -1])
    mean_to = np.empty((X.shape[0], classes.size))
    for c, (cls, count) in enumerate(zip(classes, counts)):
        member = (y == cls).astype(float)
        totals = np.cumsum(dist * member[None, :], axis=1)[:, -1]
        own = y == cls
        mean_to[:, c] = np.where(own, totals / (count - 1), totals / count)

    own_col = np.searchsorted(classes, y)
    rows = np.arange(X.shape[0])
    a = mean_to[rows, own_col]
    others = mean_to.copy()
    others[rows, own_col] = np.inf
    b = others.min(axis=1)
    denom = np.maximum(a, b)
    s = np.where(denom > 0, (b - a) / np.where(denom > 0, denom, 1.0), 0.0)
    return float(np.cumsum(s)[-1] / X.shape[0])
