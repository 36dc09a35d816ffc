"""Genetic algorithms for 1-D Schrödinger problems, a quantum XOR neuron and
two-qubit Braitenberg control circuits, with brute-force reference checks."""

from .ga import GaConfig, Population, Problem, RunTrace, run

__all__ = ["GaConfig", "Population", "Problem", "RunTrace", "run"]
__version__ = "0.1.0"
