"""Finite-difference reference solutions.

Builds the dense Hamiltonian on the interior grid nodes (Dirichlet walls),
diagonalises it with a cyclic Jacobi solver and normalises wavefunctions by
trapezoidal quadrature.  Nothing here depends on the GA, so these results can
be used to check it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .schrodinger import Grid, QuantumSystem, ZeroWaveError, get_system

UNIT_STEP = "unit_step"
PHYSICAL = "physical"
CONVENTIONS = (UNIT_STEP, PHYSICAL)


class ConvergenceFailure(RuntimeError):
    pass


@dataclass(frozen=True)
class HamiltonianMatrix:
    matrix: np.ndarray
    convention: str
    h: float
    x: np.ndarray

    @property
    def size(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class EigenSolution:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns
    sweeps: int = 0

    def pair(self, k: int) -> tuple[float, np.ndarray]:
        return float(self.eigenvalues[k]), self.eigenvectors[:, k]


def build_hamiltonian(system: QuantumSystem, convention: str = UNIT_STEP) -> HamiltonianMatrix:
    """Kinetic tridiagonal block plus diagonal potential on interior nodes.

    Under ``unit_step`` the step is taken as 1, which is the convention of
    the GA residual; ``physical`` uses the grid spacing.
    """
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}; expected one of {CONVENTIONS}")
    system = get_system(system)
    grid = system.grid
    h = 1.0 if convention == UNIT_STEP else grid.h
    x = grid.x[1:-1]
    v = system.potential_values(x)
    n = x.size
    kinetic = np.zeros((n, n))
    i = np.arange(n)
    kinetic[i, i] = -2.0
    kinetic[i[:-1], i[:-1] + 1] = 1.0
    kinetic[i[:-1] + 1, i[:-1]] = 1.0
    matrix = -kinetic / (2.0 * h * h) + np.diag(v)
    return HamiltonianMatrix(matrix, convention, h, x)


def _round_robin(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Rounds of disjoint (p, q) index pairs covering every pair exactly once."""
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        ps, qs = [], []
        for k in range(m // 2):
            p, q = players[k], players[m - 1 - k]
            if p < n and q < n:
                ps.append(min(p, q))
                qs.append(max(p, q))
        rounds.append((np.array(ps, dtype=int), np.array(qs, dtype=int)))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def _off_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.linalg.norm(off))


def jacobi_eigh(matrix, tol: float = 1e-12, max_sweeps: int = 100) -> tuple[np.ndarray, np.ndarray, int]:
    """Cyclic Jacobi diagonalisation of a dense symmetric matrix.

    Each sweep visits all off-diagonal pairs in round-robin order; the
    rotations of one round touch disjoint index pairs, so they are applied
    together.  Stops once the off-diagonal Frobenius norm is at most
    ``tol * ||A||_F``.

    Returns ascending eigenvalues, the matching eigenvector columns and the
    number of sweeps used.
    """
    a = np.array(matrix, dtype=float, copy=True)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    if not np.allclose(a, a.T, rtol=0.0, atol=1e-14 * max(1.0, np.abs(a).max())):
        raise ValueError("matrix must be symmetric")
    n = a.shape[0]
    v = np.eye(n)
    scale = np.linalg.norm(a)
    rounds = _round_robin(n) if n > 1 else []

    sweeps = 0
    while _off_norm(a) > tol * scale:
        if sweeps >= max_sweeps:
            raise ConvergenceFailure(f"Jacobi did not converge in {max_sweeps} sweeps "
                                     f"(off-diagonal norm {_off_norm(a):.3e})")
        sweeps += 1
        for p, q in rounds:
            apq = a[p, q]
            active = apq != 0.0
            if not active.any():
                continue
            p, q, apq = p[active], q[active], apq[active]
            with np.errstate(over="ignore"):
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
            t = np.where(theta >= 0, 1.0, -1.0) / (np.abs(theta) + np.hypot(theta, 1.0))
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c

            col_p, col_q = a[:, p].copy(), a[:, q].copy()
            a[:, p] = c * col_p - s * col_q
            a[:, q] = s * col_p + c * col_q
            row_p, row_q = a[p, :].copy(), a[q, :].copy()
            cr, sr = c[:, None], s[:, None]
            a[p, :] = cr * row_p - sr * row_q
            a[q, :] = sr * row_p + cr * row_q
            a[p, q] = 0.0
            a[q, p] = 0.0

            vp, vq = v[:, p].copy(), v[:, q].copy()
            v[:, p] = c * vp - s * vq
            v[:, q] = s * vp + c * vq

    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order], sweeps


def _fix_sign(vectors: np.ndarray) -> np.ndarray:
    # largest-magnitude component positive
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def eigensolve(hamiltonian: HamiltonianMatrix | np.ndarray, k: int | None = None,
               tol: float = 1e-12, max_sweeps: int = 100) -> EigenSolution:
    matrix = hamiltonian.matrix if isinstance(hamiltonian, HamiltonianMatrix) else np.asarray(hamiltonian)
    w, v, sweeps = jacobi_eigh(matrix, tol=tol, max_sweeps=max_sweeps)
    k = w.size if k is None else k
    return EigenSolution(w[:k], _fix_sign(v[:, :k]), sweeps)


def embed(interior: np.ndarray) -> np.ndarray:
    """Pad interior samples with the zero wall values."""
    interior = np.asarray(interior, dtype=float)
    pad = [(0, 0)] * (interior.ndim - 1) + [(1, 1)]
    return np.pad(interior, pad)


def trapezoid(y: np.ndarray, h: float) -> float:
    y = np.asarray(y, dtype=float)
    return float(h * (y.sum() - 0.5 * (y[0] + y[-1])))


def normalize(psi, grid: Grid) -> np.ndarray:
    psi = np.asarray(psi, dtype=float)
    if psi.size != grid.points:
        raise ValueError(f"wave has {psi.size} samples, grid has {grid.points}")
    norm2 = trapezoid(psi * psi, grid.h)
    if not norm2 > 0.0:
        raise ZeroWaveError("cannot normalise a wave with zero integral")
    return psi / np.sqrt(norm2)


def box_closed_form(n_interior: int, h: float, k: int | None = None) -> np.ndarray:
    """Exact eigenvalues of the zero-potential tridiagonal Hamiltonian."""
    k = n_interior if k is None else k
    j = np.arange(1, k + 1)
    return (1.0 - np.cos(j * np.pi / (n_interior + 1))) / (h * h)


def nearest_state(system, energy: float | None = None, convention: str = UNIT_STEP) -> tuple[float, np.ndarray]:
    """Eigenpair whose eigenvalue is closest to ``energy`` (default: the system's E).

    The eigenvector is returned embedded on the full grid and normalised.
    """
    system = get_system(system)
    energy = system.energy if energy is None else energy
    sol = eigensolve(build_hamiltonian(system, convention))
    k = int(np.argmin(np.abs(sol.eigenvalues - energy)))
    lam, vec = sol.pair(k)
    return lam, normalize(embed(vec), system.grid)
