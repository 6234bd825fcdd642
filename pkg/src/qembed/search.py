"""Search strategies over feature-to-qubit permutations: sweep, random, genetic algorithm.

Every strategy takes a fitness callable ``perm -> FitnessRecord`` (normally a
:class:`~qembed.fitness.Evaluator`), so the strategies stay independent of how
fitness is computed.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .embedding import FEATURES_PER_QUBIT, Permutation, as_permutation, count_permutations, random_permutation
from .errors import ConfigurationError, InfeasibleError, TrainingError, UsageError
from .fitness import FitnessFn, FitnessRecord, evaluate_many

DEFAULT_SWEEP_CAP = 5040
STRATEGIES = ("sweep", "random", "ga")


@dataclass(frozen=True)
class GaConfig:
    s_pop: int = 20
    g: int = 5
    cr: float = 0.8
    rr: float = 0.1
    mr: float = 0.001
    tournament_size: int = 2
    seed: int = 0
    cache_elites: bool = True

    def __post_init__(self):
        for name in ("cr", "rr", "mr"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigurationError(f"{name} must lie in [0, 1], got {value}")
        if self.s_pop < 2:
            raise ConfigurationError("s_pop must be >= 2")
        if self.g < 1:
            raise ConfigurationError("g must be >= 1")
        if self.tournament_size < 1:
            raise ConfigurationError("tournament_size must be >= 1")
        if self.num_elites >= self.s_pop:
            raise ConfigurationError("retention leaves no room for offspring")

    @property
    def num_elites(self) -> int:
        # small epsilon guards rr * s_pop products like 0.1 * 30 = 3.0000000000000004
        return math.floor(self.rr * self.s_pop + 1e-9)

    @property
    def budget(self) -> int:
        return self.s_pop * self.g

    def expected_trainings(self) -> int:
        if not self.cache_elites:
            return self.budget
        return self.s_pop + (self.g - 1) * (self.s_pop - self.num_elites)


@dataclass
class SearchReport:
    strategy: str
    records: list[FitnessRecord]
    best: FitnessRecord
    budget: int
    total_time: float
    config: dict = field(default_factory=dict)
    evaluations: int = 0
    trainings: int = 0
    unique_permutations: int = 0
    generations: list[list[FitnessRecord]] = field(default_factory=list)

    def __post_init__(self):
        if self.records and self.best.combined != max(r.combined for r in self.records):
            raise AssertionError("best record is not the maximum over records")

    @property
    def scores(self) -> np.ndarray:
        return np.array([r.combined for r in self.records])


def _best(records: Sequence[FitnessRecord]) -> FitnessRecord:
    """First record with the maximal combined score."""
    best = records[0]
    for rec in records[1:]:
        if rec.combined > best.combined:
            best = rec
    return best


def _finish(strategy, records, budget, started, config, **extra) -> SearchReport:
    return SearchReport(
        strategy=strategy,
        records=list(records),
        best=_best(records),
        budget=budget,
        total_time=time.perf_counter() - started,
        config=config,
        unique_permutations=len({r.perm for r in records}),
        **extra,
    )


def sweep(n: int, fitness: FitnessFn, cap: int = DEFAULT_SWEEP_CAP, threads: int = 1) -> SearchReport:
    """Evaluate all ``(2n)!`` permutations in lexicographic order."""
    try:
        total = count_permutations(n)
    except OverflowError as exc:
        raise InfeasibleError(str(exc)) from None
    if total > cap:
        raise InfeasibleError(f"sweep over {FEATURES_PER_QUBIT * n}! = {total:,} permutations exceeds cap {cap:,}")
    started = time.perf_counter()
    perms = [Permutation(p) for p in itertools.permutations(range(FEATURES_PER_QUBIT * n))]
    records = evaluate_many(fitness, perms, threads)
    return _finish("sweep", records, total, started, {"n_qubits": n, "cap": cap},
                   evaluations=total, trainings=total)


def random_search(n: int, budget: int, fitness: FitnessFn, seed: int = 0, threads: int = 1) -> SearchReport:
    """Evaluate ``budget`` i.i.d. uniform permutations; duplicates are allowed."""
    if budget < 1:
        raise UsageError("budget must be >= 1")
    started = time.perf_counter()
    rng = np.random.default_rng(seed)
    perms = [random_permutation(n, rng) for _ in range(budget)]
    records = evaluate_many(fitness, perms, threads)
    return _finish("random", records, budget, started,
                   {"n_qubits": n, "budget": budget, "seed": seed},
                   evaluations=budget, trainings=budget)


def tournament_select(pop: Sequence[tuple[Permutation, float]], k: int, rng: np.random.Generator) -> Permutation:
    """Draw ``k`` entrants and return the fittest; ties go to the lower population index."""
    if not pop:
        raise UsageError("tournament over an empty population")
    if k < 1:
        raise UsageError("tournament size must be >= 1")
    entrants = rng.choice(len(pop), size=k, replace=k > len(pop))
    winner = min(entrants, key=lambda i: (-pop[i][1], i))
    return pop[winner][0]


def crossover(p1, p2, rng: np.random.Generator | None = None, pivot: int | None = None) -> Permutation:
    """Keep ``p1`` up to and including the pivot position, then fill from ``p2`` in its order."""
    p1, p2 = as_permutation(p1), as_permutation(p2)
    if len(p1) != len(p2):
        raise UsageError(f"parents differ in length ({len(p1)} vs {len(p2)})")
    if pivot is None:
        pivot = int(rng.integers(len(p1)))
    if not 0 <= pivot < len(p1):
        raise UsageError(f"pivot {pivot} out of range")
    head = p1.order[: pivot + 1]
    taken = set(head)
    return Permutation(head + tuple(f for f in p2.order if f not in taken))


def mutate(child, rng: np.random.Generator | None = None, positions: tuple[int, int] | None = None) -> Permutation:
    """Swap the features at two distinct positions."""
    child = as_permutation(child)
    if len(child) < 2:
        raise UsageError("mutation needs at least two features")
    if positions is None:
        i, j = (int(v) for v in rng.choice(len(child), size=2, replace=False))
    else:
        i, j = positions
        if i == j:
            raise UsageError("mutation positions must differ")
    order = list(child.order)
    order[i], order[j] = order[j], order[i]
    return Permutation(tuple(order))


def _evaluate_generation(fitness, perms, threads, generation) -> list[FitnessRecord]:
    try:
        return evaluate_many(fitness, perms, threads)
    except TrainingError as exc:
        raise exc.with_context(f"generation {generation}") from exc


def run_ga(cfg: GaConfig, n: int, fitness: FitnessFn, threads: int = 1) -> SearchReport:
    """Genetic search over permutations.

    ``cfg.g`` counts evaluated generations, the random initial population included,
    so the default charges ``s_pop * g = 100`` evaluations. Each later generation
    keeps the top ``floor(rr * s_pop)`` individuals, fills a parent pool of
    ``s_pop`` tournament winners, and breeds the rest of the population from two
    distinct pool slots: crossover with probability ``cr`` (otherwise a copy of
    the first parent), then a swap mutation with probability ``mr``. With
    ``cache_elites`` retained individuals keep their score instead of retraining.
    """
    started = time.perf_counter()
    rng = np.random.default_rng(cfg.seed)
    n_elite = cfg.num_elites

    pop = [random_permutation(n, rng) for _ in range(cfg.s_pop)]
    scored = _evaluate_generation(fitness, pop, threads, 0)
    trained = list(scored)
    history = [list(scored)]

    for generation in range(1, cfg.g):
        # sorted() is stable, so equal scores keep population order
        ranked = sorted(scored, key=lambda rec: -rec.combined)
        elites = ranked[:n_elite]
        contenders = [(rec.perm, rec.combined) for rec in ranked]
        parents = [tournament_select(contenders, cfg.tournament_size, rng) for _ in range(cfg.s_pop)]

        children = []
        for _ in range(cfg.s_pop - n_elite):
            i, j = rng.choice(len(parents), size=2, replace=False)
            p1, p2 = parents[i], parents[j]
            child = crossover(p1, p2, rng) if rng.random() < cfg.cr else p1
            if rng.random() < cfg.mr:
                child = mutate(child, rng)
            children.append(child)

        if cfg.cache_elites:
            fresh = _evaluate_generation(fitness, children, threads, generation)
            scored = elites + fresh
        else:
            fresh = _evaluate_generation(fitness, [e.perm for e in elites] + children, threads, generation)
            scored = fresh
        trained.extend(fresh)
        history.append(list(scored))

    all_scored = [rec for gen in history for rec in gen]
    best = _best(all_scored)
    if n_elite >= 1 and max(r.combined for r in history[-1]) != best.combined:
        raise AssertionError("elitism failed to carry the best individual forward")

    config = {"n_qubits": n, **asdict(cfg)}
    return _finish("ga", trained, cfg.budget, started, config,
                   evaluations=len(all_scored), trainings=len(trained), generations=history)
