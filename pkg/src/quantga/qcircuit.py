"""Two-qubit gate algebra, circuit synthesis and Braitenberg behaviour.

Operators are kept as an integer entry pattern times a scalar scale so that
products of Hadamard-type gates stay exact on the pattern side.  The GA
evolves bare 4x4 patterns over {-1, 0, 1}; the target's scale is attached
when a candidate must be read as an actual operator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import ga

INV_SQRT2 = 1.0 / math.sqrt(2.0)
ALPHABET = np.array([-1, 0, 1])
N_QUBITS = 2
BEHAVIOURS = ("stop", "turn_left", "turn_right", "forward")


class SingularTargetError(ValueError):
    pass


class ZeroStateError(ValueError):
    pass


@dataclass(frozen=True)
class Operator:
    pattern: np.ndarray
    scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "pattern", np.asarray(self.pattern))

    @property
    def matrix(self) -> np.ndarray:
        return self.scale * self.pattern

    @property
    def shape(self):
        return self.pattern.shape

    def is_unitary(self, atol: float = 1e-12) -> bool:
        m = self.matrix
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            return False
        return bool(np.allclose(m @ m.T, np.eye(m.shape[0]), atol=atol))

    def __eq__(self, other):
        if not isinstance(other, Operator):
            return NotImplemented
        return (self.pattern.shape == other.pattern.shape and np.array_equal(self.pattern, other.pattern)
                and math.isclose(self.scale, other.scale, rel_tol=1e-15))

    __hash__ = None

    def to_dict(self) -> dict:
        return {"pattern": self.pattern.tolist(), "scale": self.scale}


def _as_operator(op) -> Operator:
    return op if isinstance(op, Operator) else Operator(np.asarray(op))


def kron(a, b) -> Operator:
    a, b = _as_operator(a), _as_operator(b)
    return Operator(np.kron(a.pattern, b.pattern), a.scale * b.scale)


def compose_serial(first, then) -> Operator:
    """Wire ``first`` into ``then``: the result acts as ``then @ first``."""
    first, then = _as_operator(first), _as_operator(then)
    if first.pattern.shape[0] != then.pattern.shape[-1]:
        raise ValueError(f"cannot chain {first.shape} into {then.shape}")
    return Operator(then.pattern @ first.pattern, first.scale * then.scale)


def apply(op, state) -> Operator:
    op, state = _as_operator(op), _as_operator(state)
    return Operator(op.pattern @ state.pattern, op.scale * state.scale)


GATES = {
    "I": Operator(np.array([[1, 0], [0, 1]])),
    "H": Operator(np.array([[1, 1], [1, -1]]), INV_SQRT2),
    "Z": Operator(np.array([[1, 0], [0, -1]])),
    "X": Operator(np.array([[0, 1], [1, 0]])),
    "CNOT": Operator(np.array([[1, 0, 0, 0],
                               [0, 1, 0, 0],
                               [0, 0, 0, 1],
                               [0, 0, 1, 0]])),
}

KET = {"0": Operator(np.array([1, 0])), "1": Operator(np.array([0, 1]))}


def basis_state(bits: str) -> Operator:
    state = KET[bits[0]]
    for b in bits[1:]:
        state = kron(state, KET[b])
    return state


LIGHT_OFF = "00"
LIGHT_ON = "11"


def epr_circuit(gates: dict | None = None) -> Operator:
    g = GATES if gates is None else gates
    return compose_serial(kron(g["H"], g["I"]), g["CNOT"])


TARGETS = {
    "fig7a": epr_circuit(),
    "fig7b": Operator(np.array([[0, 0, 1, 0],
                                [0, 0, 0, 1],
                                [1, 0, 0, 0],
                                [0, 1, 0, 0]])),
    "fig7c": Operator(np.array([[1, 0, 1, 0],
                                [0, 1, 0, 1],
                                [0, 0, -1, 0],
                                [0, 0, 0, -1]])),
}


def validate_target(target) -> Operator:
    target = _as_operator(target)
    p = target.pattern
    if p.shape != (4, 4):
        raise ValueError(f"target must be 4x4, got {p.shape}")
    if not np.all(np.isin(p, ALPHABET)):
        raise ValueError("target entries must lie in {-1, 0, 1}")
    if not target.scale > 0:
        raise ValueError("target scale must be positive")
    return Operator(p.astype(int), float(target.scale))


def get_target(target) -> Operator:
    if isinstance(target, str):
        try:
            return TARGETS[target]
        except KeyError:
            raise ValueError(f"unknown target {target!r}; expected one of {sorted(TARGETS)} or a matrix") from None
    return validate_target(target)


def _pattern(u) -> np.ndarray:
    return u.pattern if isinstance(u, Operator) else np.asarray(u)


def _inverse(matrix: np.ndarray) -> np.ndarray:
    m = np.asarray(matrix, dtype=float)
    if abs(np.linalg.det(m)) < 1e-12:
        raise SingularTargetError("target matrix is singular")
    return np.linalg.inv(m)


def fitness_hamming(u_i, u_t) -> int:
    """Number of equal entries between two patterns (16 means identical)."""
    a, b = _pattern(u_i), _pattern(u_t)
    if a.shape != (4, 4) or b.shape != (4, 4):
        raise ValueError("hamming fitness needs two 4x4 patterns")
    return int(np.count_nonzero(a == b))


def fitness_fidelity(u_i, u_t) -> float:
    """``1 - |Tr(U_i U_t^-1)| / 2^n``; zero when ``U_i`` equals ``U_t`` up to sign.

    A bare pattern passed as ``u_i`` takes the target's scale.
    """
    target = _as_operator(u_t)
    cand = u_i if isinstance(u_i, Operator) else Operator(np.asarray(u_i), target.scale)
    inv = _inverse(target.matrix)
    return 1.0 - abs(np.trace(cand.matrix @ inv)) / 2**N_QUBITS


@dataclass(frozen=True)
class BehaviorDistribution:
    stop: float
    turn_left: float
    turn_right: float
    forward: float

    def as_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in BEHAVIOURS}

    def support(self, atol: float = 1e-12) -> set[str]:
        return {k for k, v in self.as_dict().items() if v > atol}


def measure(state) -> BehaviorDistribution:
    amps = _as_operator(state).matrix.astype(float)
    norm2 = float(amps @ amps)
    if norm2 == 0.0:
        raise ZeroStateError("circuit maps the input to the zero vector")
    amps = amps / math.sqrt(norm2)
    # projections onto |00>, |01>, |10>, |11>
    probs = amps**2
    return BehaviorDistribution(*(float(p) for p in probs))


def behave(circuit, light_on: bool) -> BehaviorDistribution:
    circuit = _as_operator(circuit)
    stimulus = basis_state(LIGHT_ON if light_on else LIGHT_OFF)
    return measure(apply(circuit, stimulus))


# -- synthesis -----------------------------------------------------------------

FITNESS_MODES = ("hamming", "fidelity")


def circuit_problem(target, fitness_mode: str = "hamming") -> ga.Problem:
    target = get_target(target)
    flat = target.pattern.reshape(-1)

    if fitness_mode == "hamming":
        def evaluate(members):
            return np.count_nonzero(members == flat, axis=1).astype(float)
    elif fitness_mode == "fidelity":
        inv_t = _inverse(target.pattern)
        # equal scales cancel in U_i U_t^-1, so the trace is taken on patterns;
        # GA maximises 1 - fidelity = |Tr| / 4
        weights = inv_t.T.reshape(-1)

        def evaluate(members):
            return np.abs(members @ weights) / 2**N_QUBITS
    else:
        raise ValueError(f"unknown fitness mode {fitness_mode!r}; expected one of {FITNESS_MODES}")

    def initialize(rng, n):
        return rng.integers(-1, 2, size=(n, 16))

    def resample(rng, genes):
        return rng.integers(-1, 2, size=genes.shape)

    return ga.Problem(evaluate=evaluate, initialize=initialize, gene_mutator=resample,
                      name=f"circuit-{fitness_mode}")


def default_config(fitness_mode: str = "hamming", **overrides) -> ga.GaConfig:
    base = ga.GaConfig(
        population_size=200,
        crossover_rate=0.6,
        mutation_rate=0.1,
        site_mutation_rate=0.1,
        max_generations=1000,
        fitness_threshold=16.0 if fitness_mode == "hamming" else 1.0 - 1e-9,
    )
    return base.replace(**overrides)


def synthesize(target, config: ga.GaConfig | None = None, fitness_mode: str = "hamming") -> ga.RunTrace:
    config = default_config(fitness_mode) if config is None else config
    return ga.run(circuit_problem(target, fitness_mode), config)


def evolved_operator(trace: ga.RunTrace, target) -> Operator:
    """Best pattern of a run, carrying the target's scale."""
    target = get_target(target)
    return Operator(trace.best.best_chromosome.reshape(4, 4).astype(int), target.scale)


def generations_to_solution(trace: ga.RunTrace) -> int | None:
    if trace.termination_reason == ga.THRESHOLD_REACHED:
        return trace.generations
    return None
