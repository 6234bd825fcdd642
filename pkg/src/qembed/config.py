"""Study configuration: one INI file with a section per component.

Every key is optional; missing keys take their defaults and section seeds fall
back to ``[study] seed``. Unknown sections or keys are rejected.

    [study]     strategy, n_qubits, seed
    [dataset]   source (synth|csv), path, label_column, header, split_ratio, seed,
                n_per_class, separation, planted, raw_features
    [train]     epochs, learning_rate, batch_size, seed, init_seed, optimizer,
                num_layers, readout_qubit, angle_low, angle_high
    [noise]     enabled, p1, p2, readout_flip, num_runs, seed
    [ga]        s_pop, g, cr, rr, mr, tournament_size, seed, cache_elites
    [random]    budget, seed
    [sweep]     cap
"""

from __future__ import annotations

import configparser
import dataclasses
import io
from dataclasses import dataclass, field, fields
from pathlib import Path


from .data import DEFAULT_SPLIT_RATIO, Dataset, load_csv, pca_reduce, synth_blobs
from .errors import ConfigurationError
from .noise import NoiseConfig
from .search import DEFAULT_SWEEP_CAP, STRATEGIES, GaConfig
from .training import TrainConfig


@dataclass(frozen=True)
class DatasetSpec:
    source: str = "synth"
    path: str = ""
    label_column: str = "label"
    header: bool = True
    split_ratio: float = DEFAULT_SPLIT_RATIO
    seed: int = 0
    n_per_class: int = 200
    separation: float = 3.0
    planted: bool = False
    # > 0: generate this many raw features and PCA-reduce to 2 * n_qubits
    raw_features: int = 0

    def __post_init__(self):
        if self.source not in ("synth", "csv"):
            raise ConfigurationError(f"dataset source must be 'synth' or 'csv', got {self.source!r}")
        if self.source == "csv" and not self.path:
            raise ConfigurationError("csv dataset needs a path")

    def build(self, n_qubits: int, base_dir: Path | None = None) -> Dataset:
        k = 2 * n_qubits
        if self.source == "csv":
            path = Path(self.path)
            if base_dir is not None and not path.is_absolute():
                path = base_dir / path
            ds = load_csv(path, self.label_column, None, self.split_ratio, self.seed, self.header)
        else:
            width = self.raw_features if self.raw_features > 0 else k
            ds = synth_blobs(width, self.n_per_class, self.separation, self.seed,
                             planted=self.planted, split_ratio=self.split_ratio)
        if ds.num_features == k:
            return ds
        if ds.num_features < k:
            raise ConfigurationError(f"{n_qubits} qubits need {k} features; dataset has {ds.num_features}")
        return reduce_dataset(ds, k)


def reduce_dataset(ds: Dataset, k: int) -> Dataset:
    """PCA-reduce to ``k`` features, fitting the projection on the training rows."""
    _, components = pca_reduce(ds.X_train, k, return_components=True)
    reduced = (ds.features - ds.X_train.mean(axis=0)) @ components
    return Dataset(reduced, ds.labels, ds.train_idx, ds.test_idx, name=f"{ds.name}-pca{k}")


@dataclass(frozen=True)
class RandomParams:
    budget: int = 100
    seed: int = 0


@dataclass(frozen=True)
class SweepParams:
    cap: int = DEFAULT_SWEEP_CAP


@dataclass(frozen=True)
class StudyConfig:
    strategy: str = "ga"
    n_qubits: int = 3
    seed: int = 0
    dataset: DatasetSpec = field(default_factory=DatasetSpec)
    train: TrainConfig = field(default_factory=TrainConfig)
    noise: NoiseConfig | None = None
    ga: GaConfig = field(default_factory=GaConfig)
    random: RandomParams = field(default_factory=RandomParams)
    sweep: SweepParams = field(default_factory=SweepParams)

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ConfigurationError(f"strategy must be one of {STRATEGIES}, got {self.strategy!r}")
        if not 1 <= self.n_qubits <= 10:
            raise ConfigurationError("n_qubits must lie in [1, 10]")
        if self.train.readout_qubit >= self.n_qubits:
            raise ConfigurationError("readout_qubit must be < n_qubits")

    def to_dict(self) -> dict:
        out = {"strategy": self.strategy, "n_qubits": self.n_qubits, "seed": self.seed}
        for name in ("dataset", "train", "noise", "ga", "random", "sweep"):
            value = getattr(self, name)
            out[name] = None if value is None else dataclasses.asdict(value)
        return out

    def to_ini(self) -> str:
        parser = configparser.ConfigParser(interpolation=None)
        parser["study"] = {"strategy": self.strategy, "n_qubits": str(self.n_qubits), "seed": str(self.seed)}
        for name in ("dataset", "train", "ga", "random", "sweep"):
            parser[name] = _section_strings(getattr(self, name))
        noise = self.noise if self.noise is not None else NoiseConfig(seed=self.seed)
        parser["noise"] = {"enabled": _fmt(self.noise is not None), **_section_strings(noise)}
        buf = io.StringIO()
        parser.write(buf)
        return buf.getvalue()

    @classmethod
    def from_ini(cls, text: str) -> "StudyConfig":
        parser = configparser.ConfigParser(interpolation=None)
        try:
            parser.read_string(text)
        except configparser.Error as exc:
            raise ConfigurationError(f"cannot parse config: {exc}") from None
        unknown = set(parser.sections()) - {"study", *_SECTIONS}
        if unknown:
            raise ConfigurationError(f"unknown config section(s): {', '.join(sorted(unknown))}")

        study = dict(parser["study"]) if parser.has_section("study") else {}
        _reject_unknown("study", study, {"strategy", "n_qubits", "seed"})
        seed = _parse(int, study.get("seed", "0"), "study", "seed")
        kwargs = {"seed": seed}
        if "strategy" in study:
            kwargs["strategy"] = study["strategy"].strip()
        if "n_qubits" in study:
            kwargs["n_qubits"] = _parse(int, study["n_qubits"], "study", "n_qubits")

        for name, klass in _SECTIONS.items():
            raw = dict(parser[name]) if parser.has_section(name) else {}
            if name == "noise":
                enabled = _parse(bool, raw.pop("enabled", "true" if raw else "false"), "noise", "enabled")
                value = _build(klass, name, raw, seed)
                kwargs[name] = value if enabled else None
            else:
                kwargs[name] = _build(klass, name, raw, seed)
        return cls(**kwargs)

    @classmethod
    def load(cls, path: str | Path) -> "StudyConfig":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigurationError(f"cannot read config {path}: {exc}") from None
        return cls.from_ini(text)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_ini())


_SECTIONS = {
    "dataset": DatasetSpec,
    "train": TrainConfig,
    "noise": NoiseConfig,
    "ga": GaConfig,
    "random": RandomParams,
    "sweep": SweepParams,
}


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _section_strings(obj) -> dict[str, str]:
    return {f.name: _fmt(getattr(obj, f.name)) for f in fields(obj)}


def _parse(kind, text: str, section: str, key: str):
    text = text.strip()
    try:
        if kind is bool:
            lowered = text.lower()
            if lowered in ("1", "true", "yes", "on"):
                return True
            if lowered in ("0", "false", "no", "off"):
                return False
            raise ValueError(text)
        if kind is int:
            return int(text)
        if kind is float:
            return float(text)
        return text
    except ValueError:
        raise ConfigurationError(f"[{section}] {key}: cannot parse {text!r} as {kind.__name__}") from None


def _reject_unknown(section: str, raw: dict, allowed) -> None:
    extra = set(raw) - set(allowed)
    if extra:
        raise ConfigurationError(f"[{section}] unknown key(s): {', '.join(sorted(extra))}")


def _build(klass, section: str, raw: dict, seed: int):
    types = {f.name: f.type for f in fields(klass)}
    _reject_unknown(section, raw, types)
    kwargs = {}
    for f in fields(klass):
        if f.name in raw:
            kind = {"int": int, "float": float, "bool": bool, "str": str}[str(f.type)]
            kwargs[f.name] = _parse(kind, raw[f.name], section, f.name)
        elif f.name == "seed":
            kwargs["seed"] = seed
    return klass(**kwargs)
