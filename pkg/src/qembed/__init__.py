"""Search over feature-to-qubit angle embeddings for small quantum classifiers."""

from .data import Dataset, load_csv, pca_reduce, silhouette, synth_blobs
from .embedding import Permutation
from .errors import ConfigurationError, InfeasibleError, QembedError, TrainingError, UsageError
from .fitness import Evaluator, FitnessRecord, evaluate
from .noise import NoiseConfig
from .search import GaConfig, SearchReport, crossover, mutate, random_search, run_ga, sweep, tournament_select
from .training import QnnModel, TrainConfig, train

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError",
    "Dataset",
    "Evaluator",
    "FitnessRecord",
    "GaConfig",
    "InfeasibleError",
    "NoiseConfig",
    "Permutation",
    "QembedError",
    "QnnModel",
    "SearchReport",
    "TrainConfig",
    "TrainingError",
    "UsageError",
    "crossover",
    "evaluate",
    "load_csv",
    "mutate",
    "pca_reduce",
    "random_search",
    "run_ga",
    "silhouette",
    "sweep",
    "synth_blobs",
    "tournament_select",
    "train",
]
