"""Deterministic golden checks for the non-stochastic parts of the package."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import fdoracle, qcircuit, qneuron, schrodinger

H2 = 1.0 / math.sqrt(2.0)

H_I_PATTERN = np.array([[1, 0, 1, 0], [0, 1, 0, 1], [1, 0, -1, 0], [0, 1, 0, -1]])
EPR_PATTERN = np.array([[1, 0, 1, 0], [0, 1, 0, 1], [0, 1, 0, -1], [1, 0, -1, 0]])
X_I_PATTERN = np.array([[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]])
FIG7C_PATTERN = np.array([[1, 0, 1, 0], [0, 1, 0, 1], [0, 0, -1, 0], [0, 0, 0, -1]])

# light-off / light-on outcome sets per circuit
BEHAVIOUR_SUPPORT = {
    "fig7a": ({"stop", "forward"}, {"turn_left", "turn_right"}),
    "fig7b": ({"turn_right"}, {"turn_left"}),
    "fig7c": ({"stop"}, {"turn_left", "forward"}),
}


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


def _same(op: qcircuit.Operator, pattern, scale: float) -> bool:
    return (op.pattern.shape == np.shape(pattern) and np.array_equal(op.pattern, pattern)
            and math.isclose(op.scale, scale, rel_tol=1e-15))


def composition_checks(gates=None) -> list[tuple[str, Callable[[], bool]]]:
    g = qcircuit.GATES if gates is None else gates
    k0, k1 = qcircuit.KET["0"], qcircuit.KET["1"]
    return [
        ("gates unitary", lambda: all(op.is_unitary() for op in g.values())),
        ("H (x) I pattern", lambda: _same(qcircuit.kron(g["H"], g["I"]), H_I_PATTERN, H2)),
        ("EPR circuit pattern", lambda: _same(qcircuit.epr_circuit(g), EPR_PATTERN, H2)),
        ("|00> = |0> (x) |0>", lambda: np.array_equal(qcircuit.kron(k0, k0).pattern, [1, 0, 0, 0])),
        ("|11> = |1> (x) |1>", lambda: np.array_equal(qcircuit.kron(k1, k1).pattern, [0, 0, 0, 1])),
        ("EPR |00>", lambda: _same(qcircuit.apply(qcircuit.epr_circuit(g), qcircuit.kron(k0, k0)),
                                   [1, 0, 0, 1], H2)),
        ("X (x) I pattern", lambda: _same(qcircuit.kron(g["X"], g["I"]), X_I_PATTERN, 1.0)),
        ("Z (x) I pattern", lambda: _same(qcircuit.kron(g["Z"], g["I"]), np.diag([1, 1, -1, -1]), 1.0)),
        ("fig7b |11>", lambda: np.array_equal(
            qcircuit.apply(qcircuit.Operator(X_I_PATTERN), qcircuit.kron(k1, k1)).pattern, [0, 1, 0, 0])),
        ("fig7c |11>", lambda: np.array_equal(
            qcircuit.apply(qcircuit.Operator(FIG7C_PATTERN), qcircuit.kron(k1, k1)).pattern, [0, 1, 0, -1])),
        ("built-in targets", lambda: (_same(qcircuit.TARGETS["fig7a"], EPR_PATTERN, H2)
                                      and _same(qcircuit.TARGETS["fig7b"], X_I_PATTERN, 1.0)
                                      and _same(qcircuit.TARGETS["fig7c"], FIG7C_PATTERN, 1.0))),
    ]


def _dist_close(dist: qcircuit.BehaviorDistribution, expected: dict) -> bool:
    d = dist.as_dict()
    return all(abs(d[k] - expected.get(k, 0.0)) <= 1e-12 for k in d)


def behaviour_checks(gates=None) -> list[tuple[str, Callable[[], bool]]]:
    fig7a = qcircuit.epr_circuit(qcircuit.GATES if gates is None else gates)
    checks = [
        ("fig7a light off", lambda: _dist_close(qcircuit.behave(fig7a, False), {"stop": 0.5, "forward": 0.5})),
        ("fig7b light on", lambda: _dist_close(qcircuit.behave(qcircuit.TARGETS["fig7b"], True), {"turn_left": 1.0})),
        ("fig7c light on", lambda: _dist_close(qcircuit.behave(qcircuit.TARGETS["fig7c"], True),
                                               {"turn_left": 0.5, "forward": 0.5})),
    ]
    for name, (off, on) in BEHAVIOUR_SUPPORT.items():
        checks.append((f"{name} behaviour map", lambda name=name, off=off, on=on: (
            qcircuit.behave(qcircuit.TARGETS[name], False).support() == off
            and qcircuit.behave(qcircuit.TARGETS[name], True).support() == on)))
    return checks


def _oracle_z(name: str) -> bool:
    system = schrodinger.DEFAULT_SYSTEMS[name]
    lam, vec = fdoracle.eigensolve(fdoracle.build_hamiltonian(system, fdoracle.UNIT_STEP), k=1).pair(0)
    at_lam = schrodinger.QuantumSystem(system.potential, lam, system.grid, system.angular_momentum)
    return float(schrodinger.z_scores(fdoracle.embed(vec), at_lam)) <= 1e-12


def _box_closed_form() -> bool:
    system = schrodinger.DEFAULT_SYSTEMS["box"]
    ham = fdoracle.build_hamiltonian(system, fdoracle.PHYSICAL)
    sol = fdoracle.eigensolve(ham)
    exact = fdoracle.box_closed_form(ham.size, ham.h)
    return bool(np.all(np.abs(sol.eigenvalues - exact) <= 1e-8 * np.abs(exact)))


def _harmonic_ground() -> bool:
    system = schrodinger.QuantumSystem("harmonic", 0.5, schrodinger.Grid(-6.0, 6.0, 200))
    sol = fdoracle.eigensolve(fdoracle.build_hamiltonian(system, fdoracle.PHYSICAL), k=1)
    return abs(sol.eigenvalues[0] - 0.5) <= 0.01


def _eigen_residuals() -> bool:
    for system in schrodinger.DEFAULT_SYSTEMS.values():
        for conv in fdoracle.CONVENTIONS:
            ham = fdoracle.build_hamiltonian(system, conv)
            sol = fdoracle.eigensolve(ham)
            r = ham.matrix @ sol.eigenvectors - sol.eigenvectors * sol.eigenvalues
            if np.linalg.norm(r, axis=0).max() > 1e-8 * np.linalg.norm(ham.matrix, 2):
                return False
    return True


def oracle_checks() -> list[tuple[str, Callable[[], bool]]]:
    return ([(f"{n} oracle eigenpair Z", lambda n=n: _oracle_z(n)) for n in schrodinger.DEFAULT_SYSTEMS]
            + [("box closed-form spectrum", _box_closed_form),
               ("harmonic ground energy", _harmonic_ground),
               ("eigenpair residuals", _eigen_residuals)])


def neuron_checks() -> list[tuple[str, Callable[[], bool]]]:
    def table_argmax():
        table = qneuron.landscape("table")
        top = max(table.values())
        return top == 4.0 and [k for k, v in table.items() if v == top] == [(0, 0)]

    e0, e1 = qneuron.KET0, qneuron.KET1
    return [
        ("neuron table landscape argmax", table_argmax),
        ("neuron (w0,w0) |0>|0>", lambda: np.allclose(qneuron.forward(0, 0, e0, e0), e0, atol=1e-15)),
        ("neuron (w0,w0) |1>|0>", lambda: np.allclose(qneuron.forward(0, 0, e1, e0), e1, atol=1e-15)),
        ("neuron (w3,w3) |0>|0>", lambda: np.allclose(qneuron.forward(3, 3, e0, e0), e1, atol=1e-15)),
    ]


def run_checks(gates=None) -> list[CheckResult]:
    checks = composition_checks(gates) + behaviour_checks(gates) + oracle_checks() + neuron_checks()
    results = []
    for name, fn in checks:
        try:
            results.append(CheckResult(name, bool(fn())))
        except Exception as exc:  # a crashing check is a failed check
            results.append(CheckResult(name, False, repr(exc)))
    return results
