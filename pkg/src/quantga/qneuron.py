"""Two-input quantum McCulloch-Pitts neuron trained by the GA to compute XOR.

Each connection weight is one of four 2x2 gates (Hadamard, Pauli X, Pauli Z,
identity), all scaled by 1/sqrt(2).  A chromosome is the pair of weight
indices, so there are only 16 genotypes and every landscape can be checked
by enumeration.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from . import ga

INV_SQRT2 = 1.0 / math.sqrt(2.0)

WEIGHT_PATTERNS = (
    np.array([[1, 1], [1, -1]]),   # w0: Hadamard
    np.array([[0, 1], [1, 0]]),    # w1: Pauli X
    np.array([[1, 0], [0, -1]]),   # w2: Pauli Z
    np.array([[1, 0], [0, 1]]),    # w3: identity
)
WEIGHTS = tuple(INV_SQRT2 * p for p in WEIGHT_PATTERNS)
ACTIVATION = INV_SQRT2 * np.array([[0, 1], [1, -1]])

KET0 = np.array([1.0, 0.0])
KET1 = np.array([0.0, 1.0])

# (x1, x2, target)
XOR_TABLE = (
    (KET0, KET0, KET0),
    (KET1, KET0, KET1),
    (KET0, KET1, KET1),
    (KET1, KET1, KET0),
)

FITNESS_MODES = ("table", "overlap")

# Tabulated landscape: (w0, w0) scores 4, every other ordered pair scores 1.
TABLE_LANDSCAPE = {pair: (4.0 if pair == (0, 0) else 1.0)
                    for pair in itertools.product(range(4), repeat=2)}

GENOTYPES = tuple(itertools.product(range(4), repeat=2))


def forward(w1: int, w2: int, x1, x2) -> np.ndarray:
    """Neuron output for weight indices ``w1``, ``w2`` and basis inputs.

    The net input is passed through an elementwise sign (with sgn(0) = 0)
    and the activation matrix, then scaled to unit length.  A zero result is
    returned as the zero vector.
    """
    net = WEIGHTS[w1] @ np.asarray(x1, dtype=float) + WEIGHTS[w2] @ np.asarray(x2, dtype=float)
    y = ACTIVATION @ np.sign(net)
    norm = np.linalg.norm(y)
    return y / norm if norm > 0 else np.zeros(2)


def xor_overlap(outputs) -> float:
    """Sum of |<target|output>| over the four XOR rows, in table order."""
    return float(sum(abs(float(d @ np.asarray(y))) for (_, _, d), y in zip(XOR_TABLE, outputs, strict=True)))


def fitness_overlap(w1: int, w2: int) -> float:
    return xor_overlap([forward(w1, w2, x1, x2) for x1, x2, _ in XOR_TABLE])


def fitness_table(w1: int, w2: int) -> float:
    return TABLE_LANDSCAPE[(int(w1), int(w2))]


def fitness_function(mode: str):
    if mode == "table":
        return fitness_table
    if mode == "overlap":
        return fitness_overlap
    raise ValueError(f"unknown fitness mode {mode!r}; expected one of {FITNESS_MODES}")


def landscape(mode: str = "table") -> dict[tuple[int, int], float]:
    f = fitness_function(mode)
    return {pair: f(*pair) for pair in GENOTYPES}


def output_table() -> list[dict]:
    """Neuron output for every genotype and every XOR input pair."""
    rows = []
    for w1, w2 in GENOTYPES:
        for x1, x2, d in XOR_TABLE:
            y = forward(w1, w2, x1, x2)
            rows.append({"w1": w1, "w2": w2, "x1": int(x1[1]), "x2": int(x2[1]),
                         "target": int(d[1]), "y0": float(y[0]), "y1": float(y[1])})
    return rows


def neuron_problem(mode: str = "table") -> ga.Problem:
    table = landscape(mode)
    lookup = np.array([[table[(i, j)] for j in range(4)] for i in range(4)])

    def initialize(rng, n):
        return rng.integers(0, 4, size=(n, 2))

    def resample(rng, genes):
        return rng.integers(0, 4, size=genes.shape)

    return ga.Problem(
        evaluate=lambda members: lookup[members[:, 0], members[:, 1]],
        initialize=initialize,
        gene_mutator=resample,
        name=f"neuron-{mode}",
    )


def default_config(fitness_mode: str = "table", **overrides) -> ga.GaConfig:
    base = ga.GaConfig(
        population_size=12,
        crossover_rate=0.0,
        mutation_rate=0.6,
        site_mutation_rate=0.1,
        max_generations=50,
        fitness_threshold=4.0 if fitness_mode == "table" else None,
        crossover_enabled=False,
    )
    return base.replace(**overrides)


def train(config: ga.GaConfig | None = None, fitness_mode: str = "table") -> ga.RunTrace:
    config = default_config(fitness_mode) if config is None else config
    return ga.run(neuron_problem(fitness_mode), config)


def best_genotype(trace: ga.RunTrace) -> tuple[int, int]:
    genes = trace.best.best_chromosome
    return int(genes[0]), int(genes[1])
