import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from quantga import qcircuit
from quantga.qcircuit import GATES, Operator, compose_serial, kron

R2 = 1 / math.sqrt(2.0)

H_I = np.array([[1, 0, 1, 0], [0, 1, 0, 1], [1, 0, -1, 0], [0, 1, 0, -1]])
EPR = np.array([[1, 0, 1, 0], [0, 1, 0, 1], [0, 1, 0, -1], [1, 0, -1, 0]])
SWAP_HALVES = np.array([[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]])
FIG7C = np.array([[1, 0, 1, 0], [0, 1, 0, 1], [0, 0, -1, 0], [0, 0, 0, -1]])

patterns = arrays(np.int64, (4, 4), elements=st.integers(-1, 1))


def test_gates_unitary():
    assert all(g.is_unitary() for g in GATES.values())
    assert np.array_equal(GATES["Z"].pattern, [[1, 0], [0, -1]])


def test_kron_h_identity():
    op = kron(GATES["H"], GATES["I"])
    assert np.array_equal(op.pattern, H_I)
    assert op.scale == R2


def test_kron_identity_identity():
    op = kron(GATES["I"], GATES["I"])
    assert np.array_equal(op.pattern, np.eye(4, dtype=int)) and op.scale == 1.0


def test_basis_kets():
    assert qcircuit.basis_state("00").pattern.tolist() == [1, 0, 0, 0]
    assert qcircuit.basis_state("11").pattern.tolist() == [0, 0, 0, 1]
    assert kron(qcircuit.KET["1"], qcircuit.KET["1"]).pattern.tolist() == [0, 0, 0, 1]


def test_epr_composition():
    op = compose_serial(kron(GATES["H"], GATES["I"]), GATES["CNOT"])
    assert np.array_equal(op.pattern, EPR) and math.isclose(op.scale, R2, rel_tol=1e-15)
    assert qcircuit.TARGETS["fig7a"] == op


def test_x_identity_is_fig7b():
    assert np.array_equal(kron(GATES["X"], GATES["I"]).pattern, SWAP_HALVES)
    assert np.array_equal(qcircuit.TARGETS["fig7b"].pattern, SWAP_HALVES)
    assert np.array_equal(qcircuit.TARGETS["fig7c"].pattern, FIG7C)


def test_applied_states():
    assert qcircuit.apply(qcircuit.TARGETS["fig7b"], qcircuit.basis_state("11")).pattern.tolist() == [0, 1, 0, 0]
    assert qcircuit.apply(qcircuit.TARGETS["fig7c"], qcircuit.basis_state("11")).pattern.tolist() == [0, 1, 0, -1]
    epr00 = qcircuit.apply(qcircuit.TARGETS["fig7a"], qcircuit.basis_state("00"))
    assert epr00.pattern.tolist() == [1, 0, 0, 1]


@given(patterns)
def test_compose_with_identity(a):
    eye = Operator(np.eye(4, dtype=int))
    assert compose_serial(a, eye) == Operator(a)
    assert compose_serial(eye, a) == Operator(a)


@given(patterns, patterns, arrays(np.int64, 4, elements=st.integers(-3, 3)))
def test_serial_then_apply_associates(a, b, v):
    chained = qcircuit.apply(compose_serial(b, a), v).pattern
    stepwise = qcircuit.apply(a, qcircuit.apply(b, v)).pattern
    assert np.array_equal(chained, stepwise)


def test_compose_shape_mismatch():
    with pytest.raises(ValueError):
        compose_serial(np.eye(2, dtype=int), np.eye(4, dtype=int))


def test_hamming_examples():
    t = qcircuit.TARGETS["fig7a"]
    assert qcircuit.fitness_hamming(t, t) == 16
    flipped = t.pattern.copy()
    flipped[0, 0] = -1
    assert qcircuit.fitness_hamming(flipped, t) == 15
    assert qcircuit.fitness_hamming(np.zeros((4, 4), dtype=int), t) == 8


@given(patterns, patterns)
def test_hamming_symmetric(a, b):
    assert qcircuit.fitness_hamming(a, b) == qcircuit.fitness_hamming(b, a)
    assert 0 <= qcircuit.fitness_hamming(a, b) <= 16


def test_fidelity_examples():
    for name in ("fig7a", "fig7b"):
        t = qcircuit.TARGETS[name]
        assert abs(qcircuit.fitness_fidelity(t, t)) <= 1e-12
        assert abs(qcircuit.fitness_fidelity(Operator(-t.pattern, t.scale), t)) <= 1e-12
    # Tr(X(x)I) = 0
    eye = Operator(np.eye(4, dtype=int))
    assert abs(qcircuit.fitness_fidelity(qcircuit.TARGETS["fig7b"], eye) - 1.0) <= 1e-12


def test_fidelity_singular_target():
    with pytest.raises(qcircuit.SingularTargetError):
        qcircuit.fitness_fidelity(np.eye(4), np.zeros((4, 4), dtype=int))
    with pytest.raises(qcircuit.SingularTargetError):
        qcircuit.circuit_problem(np.zeros((4, 4), dtype=int), "fidelity")


@pytest.mark.parametrize("bad", [np.eye(3, dtype=int), 2 * np.eye(4, dtype=int)])
def test_target_validation(bad):
    with pytest.raises(ValueError):
        qcircuit.get_target(bad)
    with pytest.raises(ValueError):
        qcircuit.get_target("fig7z")


def _dist(d):
    return {k: v for k, v in d.as_dict().items() if v > 0}


def test_behaviour_golden():
    t = qcircuit.TARGETS
    off = qcircuit.behave(t["fig7a"], False).as_dict()
    assert abs(off["stop"] - 0.5) <= 1e-12 and abs(off["forward"] - 0.5) <= 1e-12
    assert off["turn_left"] == off["turn_right"] == 0.0
    on = qcircuit.behave(t["fig7b"], True).as_dict()
    assert abs(on["turn_left"] - 1.0) <= 1e-12 and sum(on.values()) - on["turn_left"] == 0.0
    on_c = qcircuit.behave(t["fig7c"], True).as_dict()
    assert abs(on_c["turn_left"] - 0.5) <= 1e-12 and abs(on_c["forward"] - 0.5) <= 1e-12


@pytest.mark.parametrize("name,off,on", [
    ("fig7a", {"stop", "forward"}, {"turn_left", "turn_right"}),
    ("fig7b", {"turn_right"}, {"turn_left"}),
    ("fig7c", {"stop"}, {"turn_left", "forward"}),
])
def test_behaviour_map(name, off, on):
    assert qcircuit.behave(qcircuit.TARGETS[name], False).support() == off
    assert qcircuit.behave(qcircuit.TARGETS[name], True).support() == on


def test_zero_state():
    with pytest.raises(qcircuit.ZeroStateError):
        qcircuit.behave(np.zeros((4, 4), dtype=int), True)


@given(patterns, st.booleans())
def test_distribution_sums_to_one(p, light):
    stimulus = qcircuit.basis_state(qcircuit.LIGHT_ON if light else qcircuit.LIGHT_OFF).pattern
    if not np.any(p @ stimulus):
        return
    d = qcircuit.behave(Operator(p, 0.37), light).as_dict()
    assert abs(sum(d.values()) - 1.0) <= 1e-12
    assert all(v >= 0 for v in d.values())


@pytest.mark.parametrize("name", sorted(qcircuit.TARGETS))
def test_synthesis_recovers_target(name):
    trace = qcircuit.synthesize(name, qcircuit.default_config(rng_seed=0))
    assert trace.best_fitness[-1] == 16
    evolved = qcircuit.evolved_operator(trace, name)
    assert np.array_equal(evolved.pattern, qcircuit.TARGETS[name].pattern)
    for light in (False, True):
        try:
            expected = qcircuit.behave(qcircuit.TARGETS[name], light)
        except qcircuit.ZeroStateError:
            continue
        assert qcircuit.behave(evolved, light) == expected


def test_synthesis_all_zero_target():
    trace = qcircuit.synthesize(np.zeros((4, 4), dtype=int), qcircuit.default_config(rng_seed=0))
    assert qcircuit.generations_to_solution(trace) is not None
    assert trace.generations <= 50


def test_fidelity_synthesis_reaches_target_up_to_sign():
    trace = qcircuit.synthesize("fig7b", qcircuit.default_config("fidelity", rng_seed=0), "fidelity")
    evolved = qcircuit.evolved_operator(trace, "fig7b")
    assert abs(qcircuit.fitness_fidelity(evolved, qcircuit.TARGETS["fig7b"])) <= 1e-9
