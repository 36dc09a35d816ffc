"""Generational genetic algorithm shared by every experiment in the package.

Chromosomes are 1-D gene arrays; a population is stored as an ``(N, L)``
array so the problem-specific evaluators can score all members at once.
Matrix chromosomes are flattened row-major by their problem module.

Every stochastic draw comes from a single ``numpy.random.Generator`` seeded
with ``GaConfig.rng_seed``.  Within one generation the stream is consumed in
this order:

1. roulette selection of the ``N - elitism`` non-elite slots,
2. tournament indices for all pairs, then one recombination uniform per
   pair, then one cut point per pair (drawn even if the pair does not
   recombine),
3. mutation: one per-chromosome uniform, an ``(n, L)`` block of per-site
   uniforms, then the replacement genes from the problem's gene mutator.

The initial population is drawn by the problem initializer before step 1 of
the first generation.  Keeping this order fixed is what makes two runs with
the same config produce identical traces.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, asdict
from typing import Callable

import numpy as np

log = logging.getLogger(__name__)

GeneMutator = Callable[[np.random.Generator, np.ndarray], np.ndarray]

THRESHOLD_REACHED = "threshold_reached"
MAX_GENERATIONS = "max_generations"


class GaConfigError(ValueError):
    pass


class LengthMismatchError(ValueError):
    pass


class FitnessEvaluationError(RuntimeError):
    """Raised when a problem's evaluator fails; carries the generation."""

    def __init__(self, generation: int, message: str):
        super().__init__(f"generation {generation}: {message}")
        self.generation = generation


@dataclass(frozen=True)
class GaConfig:
    population_size: int = 50
    crossover_rate: float = 0.6
    mutation_rate: float = 0.2
    site_mutation_rate: float = 0.1
    max_generations: int = 1000
    fitness_threshold: float | None = None
    rng_seed: int = 0
    crossover_enabled: bool = True
    elitism: int = 1

    def __post_init__(self):
        for name in ("crossover_rate", "mutation_rate", "site_mutation_rate"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise GaConfigError(f"{name} must lie in [0, 1], got {p}")
        if self.population_size < 2:
            raise GaConfigError(f"population_size must be >= 2, got {self.population_size}")
        if self.max_generations < 1:
            raise GaConfigError(f"max_generations must be >= 1, got {self.max_generations}")
        if not 0 <= self.rng_seed < 2**64:
            raise GaConfigError(f"rng_seed must be a 64-bit unsigned integer, got {self.rng_seed}")
        if not 0 <= self.elitism < self.population_size:
            raise GaConfigError(f"elitism must lie in [0, population_size), got {self.elitism}")

    def replace(self, **changes) -> GaConfig:
        return GaConfig(**{**asdict(self), **changes})

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class Population:
    members: np.ndarray
    fitnesses: np.ndarray
    generation: int = 0

    def __post_init__(self):
        if len(self.members) != len(self.fitnesses):
            raise ValueError("members and fitnesses must have equal length")

    def __len__(self):
        return len(self.members)


@dataclass(frozen=True)
class Problem:
    """What the engine needs to know about one optimisation problem.

    ``evaluate`` maps an ``(n, L)`` gene array to ``n`` non-negative
    fitnesses and must be pure.  ``repair`` runs after every variation step
    (the wavefunction problem uses it to clamp boundary samples).
    """

    evaluate: Callable[[np.ndarray], np.ndarray]
    initialize: Callable[[np.random.Generator, int], np.ndarray]
    gene_mutator: GeneMutator
    repair: Callable[[np.ndarray], np.ndarray] | None = None
    name: str = "problem"


@dataclass(frozen=True)
class GenerationRecord:
    generation: int
    best_fitness: float
    mean_fitness: float
    best_chromosome: np.ndarray


@dataclass
class RunTrace:
    records: list[GenerationRecord] = field(default_factory=list)
    termination_reason: str = MAX_GENERATIONS
    elitism: int = 0
    zero_fitness_generations: list[int] = field(default_factory=list)

    def __len__(self):
        return len(self.records)

    @property
    def best(self) -> GenerationRecord:
        """Record holding the fittest chromosome seen (earliest on ties)."""
        return max(self.records, key=lambda r: r.best_fitness)

    @property
    def best_fitness(self) -> np.ndarray:
        return np.array([r.best_fitness for r in self.records])

    @property
    def mean_fitness(self) -> np.ndarray:
        return np.array([r.mean_fitness for r in self.records])

    @property
    def generations(self) -> int:
        return self.records[-1].generation if self.records else 0


# -- selection ---------------------------------------------------------------

def roulette_indices(fitnesses: np.ndarray, size: int, rng: np.random.Generator) -> tuple[np.ndarray, bool]:
    """Fitness-proportional sampling with replacement.

    Returns the chosen indices and whether every fitness was zero, in which
    case sampling falls back to uniform.
    """
    f = np.asarray(fitnesses, dtype=float)
    total = f.sum()
    if total <= 0.0:
        return rng.integers(0, len(f), size=size), True
    return rng.choice(len(f), size=size, replace=True, p=f / total), False


def roulette_select(population: Population, rng: np.random.Generator, size: int | None = None) -> tuple[Population, bool]:
    size = len(population) if size is None else size
    idx, all_zero = roulette_indices(population.fitnesses, size, rng)
    selected = Population(population.members[idx].copy(), population.fitnesses[idx].copy(), population.generation)
    return selected, all_zero


def duel(fitnesses: np.ndarray, i, j):
    """Index of the fitter of ``i`` and ``j``; ties go to the lower index."""
    i = np.asarray(i)
    j = np.asarray(j)
    fi, fj = fitnesses[i], fitnesses[j]
    return np.where(fi > fj, i, np.where(fj > fi, j, np.minimum(i, j)))


def tournament_pair(population: Population, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    draws = rng.integers(0, len(population), size=(2, 2))
    a, b = duel(population.fitnesses, draws[:, 0], draws[:, 1])
    return population.members[a].copy(), population.members[b].copy()


# -- variation ---------------------------------------------------------------

def crossover_at(parent_a: np.ndarray, parent_b: np.ndarray, cut: int) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(parent_a)
    b = np.asarray(parent_b)
    return np.concatenate([a[:cut], b[cut:]]), np.concatenate([b[:cut], a[cut:]])


def one_point_crossover(parent_a, parent_b, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    a = np.ravel(parent_a)
    b = np.ravel(parent_b)
    if a.shape != b.shape:
        raise LengthMismatchError(f"parents have {a.size} and {b.size} genes")
    if a.size < 2:
        raise LengthMismatchError("one-point crossover needs at least 2 genes")
    cut = int(rng.integers(1, a.size))
    return crossover_at(a, b, cut)


def mutate_population(members: np.ndarray, gene_mutator: GeneMutator, p_m: float, p_s: float,
                      rng: np.random.Generator) -> np.ndarray:
    n, length = members.shape
    mutant = rng.random(n) < p_m
    sites = rng.random((n, length)) < p_s
    replacement = gene_mutator(rng, members)
    mask = sites & mutant[:, None]
    return np.where(mask, replacement, members)


def mutate(chromosome, gene_mutator: GeneMutator, p_m: float, p_s: float, rng: np.random.Generator) -> np.ndarray:
    genes = np.asarray(chromosome)
    out = mutate_population(genes.reshape(1, -1), gene_mutator, p_m, p_s, rng)
    return out.reshape(genes.shape)


def _pair_and_cross(members: np.ndarray, fitnesses: np.ndarray, p_r: float, rng: np.random.Generator) -> np.ndarray:
    n, length = members.shape
    n_pairs = n // 2
    if n_pairs == 0:
        return members.copy()
    draws = rng.integers(0, n, size=(n_pairs, 2, 2))
    recombine = rng.random(n_pairs) < p_r
    cuts = rng.integers(1, length, size=n_pairs) if length >= 2 else np.ones(n_pairs, dtype=int)
    winners = duel(fitnesses, draws[:, :, 0], draws[:, :, 1])
    pa = members[winners[:, 0]]
    pb = members[winners[:, 1]]
    take_a = np.arange(length)[None, :] < cuts[:, None]
    take_a = take_a | ~recombine[:, None]
    child1 = np.where(take_a, pa, pb)
    child2 = np.where(take_a, pb, pa)
    out = np.empty_like(members)
    out[0:2 * n_pairs:2] = child1
    out[1:2 * n_pairs:2] = child2
    if n % 2:
        out[-1] = members[-1]
    return out


# -- driver ------------------------------------------------------------------

def _evaluate(problem: Problem, members: np.ndarray, generation: int) -> np.ndarray:
    try:
        fit = np.asarray(problem.evaluate(members), dtype=float)
    except Exception as exc:
        raise FitnessEvaluationError(generation, f"{problem.name} evaluator raised {exc!r}") from exc
    if fit.shape != (len(members),):
        raise FitnessEvaluationError(generation, f"evaluator returned shape {fit.shape}")
    if not np.all(np.isfinite(fit)) or np.any(fit < 0):
        raise FitnessEvaluationError(generation, "fitness values must be finite and non-negative")
    return fit


def run(problem: Problem, config: GaConfig) -> RunTrace:
    """Evolve ``problem`` under ``config`` and return the per-generation trace.

    Each generation evaluates the population, records it, checks the
    termination conditions, and only then breeds the next generation
    (elites, roulette selection, tournament-paired crossover, mutation).
    """
    rng = np.random.default_rng(config.rng_seed)
    n = config.population_size
    members = problem.initialize(rng, n)
    if problem.repair is not None:
        members = problem.repair(members)
    trace = RunTrace(elitism=config.elitism)
    theta = config.fitness_threshold

    for generation in range(1, config.max_generations + 1):
        fit = _evaluate(problem, members, generation)
        order = np.argsort(-fit, kind="stable")
        best = order[0]
        trace.records.append(GenerationRecord(generation, float(fit[best]), float(fit.mean()),
                                              members[best].copy()))
        if theta is not None and fit[best] >= theta:
            trace.termination_reason = THRESHOLD_REACHED
            break
        if generation == config.max_generations:
            trace.termination_reason = MAX_GENERATIONS
            break

        elites = members[order[:config.elitism]]
        population = Population(members, fit, generation)
        selected, all_zero = roulette_select(population, rng, n - config.elitism)
        if all_zero:
            log.warning("generation %d: all fitnesses zero, uniform selection used", generation)
            trace.zero_fitness_generations.append(generation)
        offspring = selected.members
        if config.crossover_enabled:
            offspring = _pair_and_cross(offspring, selected.fitnesses, config.crossover_rate, rng)
        offspring = mutate_population(offspring, problem.gene_mutator, config.mutation_rate,
                                      config.site_mutation_rate, rng)
        if problem.repair is not None:
            offspring = problem.repair(offspring)
        members = np.concatenate([elites, offspring])

    return trace
