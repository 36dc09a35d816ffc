"""Wavefunction chromosomes and the discretised residual fitness.

A chromosome samples a candidate wavefunction on the ``M`` nodes of a grid.
The two end samples are walls and are held at zero.  Fitness is
``exp(-Z)`` with ``Z`` the squared residual of the unit-step
finite-difference equation, normalised by the squared amplitude, both summed
over the interior nodes only.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from . import ga

log = logging.getLogger(__name__)

HYDROGEN_MIN_X = 0.05


class DomainError(ValueError):
    pass


class ZeroWaveError(ValueError):
    pass


@dataclass(frozen=True)
class Grid:
    a: float
    b: float
    points: int

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError(f"grid needs a < b, got [{self.a}, {self.b}]")
        if self.points < 5:
            raise ValueError(f"grid needs at least 5 points, got {self.points}")

    @property
    def h(self) -> float:
        return (self.b - self.a) / (self.points - 1)

    @property
    def x(self) -> np.ndarray:
        return self.a + self.h * np.arange(self.points)


POTENTIALS = ("box", "harmonic", "hydrogen")


@dataclass(frozen=True)
class QuantumSystem:
    potential: str
    energy: float
    grid: Grid
    angular_momentum: int = 1

    def __post_init__(self):
        if self.potential not in POTENTIALS:
            raise ValueError(f"unknown potential {self.potential!r}; expected one of {POTENTIALS}")
        if self.potential == "hydrogen":
            if self.angular_momentum < 0:
                raise ValueError("angular momentum quantum number must be non-negative")
            if self.grid.a < HYDROGEN_MIN_X:
                raise DomainError(f"hydrogen radial grid must start at x >= {HYDROGEN_MIN_X}, got {self.grid.a}")

    def potential_values(self, x: np.ndarray | None = None) -> np.ndarray:
        x = self.grid.x if x is None else np.asarray(x, dtype=float)
        if self.potential == "box":
            return np.zeros_like(x)
        if self.potential == "harmonic":
            return 0.5 * x**2
        if np.any(x <= 0):
            raise DomainError("hydrogen radial potential is singular at x <= 0")
        l = self.angular_momentum
        return l * (l + 1) / x**2 - 2.0 / x


DEFAULT_SYSTEMS = {
    "box": QuantumSystem("box", 0.02, Grid(0.0, 10.0, 64)),
    "harmonic": QuantumSystem("harmonic", 0.5, Grid(-6.0, 6.0, 64)),
    "hydrogen": QuantumSystem("hydrogen", -0.5, Grid(HYDROGEN_MIN_X, 20.0, 64), angular_momentum=1),
}


def get_system(name_or_system) -> QuantumSystem:
    if isinstance(name_or_system, QuantumSystem):
        return name_or_system
    try:
        return DEFAULT_SYSTEMS[name_or_system]
    except KeyError:
        raise ValueError(f"unknown system {name_or_system!r}; expected one of {sorted(DEFAULT_SYSTEMS)}") from None


def residuals(psi: np.ndarray, system: QuantumSystem) -> np.ndarray:
    """Residuals at the interior nodes for one wave (1-D) or a batch (2-D)."""
    psi = np.asarray(psi, dtype=float)
    if psi.shape[-1] != system.grid.points:
        raise ValueError(f"wave has {psi.shape[-1]} samples, grid has {system.grid.points}")
    v = system.potential_values()[1:-1]
    centre = psi[..., 1:-1]
    second = psi[..., :-2] + psi[..., 2:] - 2.0 * centre
    return 0.5 * second + (system.energy - v) * centre


residual = residuals


def z_scores(psi: np.ndarray, system: QuantumSystem) -> np.ndarray:
    """Normalised squared residual; ``inf`` where every interior sample is zero."""
    psi = np.asarray(psi, dtype=float)
    num = np.sum(residuals(psi, system) ** 2, axis=-1)
    den = np.sum(psi[..., 1:-1] ** 2, axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(den > 0, num / np.where(den > 0, den, 1.0), np.inf)


def fitnesses(psi: np.ndarray, system: QuantumSystem) -> np.ndarray:
    z = z_scores(psi, system)
    n_zero = int(np.count_nonzero(np.isinf(z)))
    if n_zero:
        log.warning("%d zero wave(s) scored with fitness 0", n_zero)
    return np.exp(-z)


def fitness(psi, system: QuantumSystem) -> float:
    return float(fitnesses(np.asarray(psi, dtype=float), system))


def clamp_boundaries(members: np.ndarray) -> np.ndarray:
    out = np.array(members, dtype=float, copy=True)
    out[..., 0] = 0.0
    out[..., -1] = 0.0
    return out


def init_wave_population(system: QuantumSystem, n: int, rng: np.random.Generator,
                         amplitude: tuple[float, float] = (-1.0, 1.0)) -> ga.Population:
    members = clamp_boundaries(rng.uniform(amplitude[0], amplitude[1], size=(n, system.grid.points)))
    return ga.Population(members, fitnesses(members, system))


def wave_problem(system: QuantumSystem, amplitude: tuple[float, float] = (-1.0, 1.0)) -> ga.Problem:
    lo, hi = amplitude
    if not lo < hi:
        raise ValueError(f"amplitude interval must satisfy lo < hi, got {amplitude}")

    def initialize(rng, n):
        return rng.uniform(lo, hi, size=(n, system.grid.points))

    def resample(rng, genes):
        return rng.uniform(lo, hi, size=genes.shape)

    return ga.Problem(
        evaluate=lambda members: fitnesses(members, system),
        initialize=initialize,
        gene_mutator=resample,
        repair=clamp_boundaries,
        name=f"schrodinger-{system.potential}",
    )


def default_config(**overrides) -> ga.GaConfig:
    base = ga.GaConfig(
        population_size=44,
        crossover_rate=0.65,
        mutation_rate=0.2,
        site_mutation_rate=0.1,
        max_generations=3200,
        fitness_threshold=0.87,
    )
    return base.replace(**overrides)


def solve(system, config: ga.GaConfig | None = None,
          amplitude: tuple[float, float] = (-1.0, 1.0)) -> tuple[ga.RunTrace, np.ndarray]:
    """Run the GA on one system; returns the trace and the best wave, normalised."""
    from .fdoracle import normalize

    system = get_system(system)
    config = default_config() if config is None else config
    trace = ga.run(wave_problem(system, amplitude), config)
    return trace, normalize(trace.best.best_chromosome, system.grid)
