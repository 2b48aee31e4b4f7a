"""Hermitian operators, states, projections, and Bloch-sphere helpers.

All operators live on a finite-dimensional complex Hilbert space and are
stored as dense numpy arrays.  Construction validates the defining
invariant of each type (Hermiticity, positivity, idempotency) and then
freezes the array, so downstream code can rely on it without re-checking.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

# Construction symmetrizes inputs that are Hermitian to within this
# entrywise tolerance and rejects anything worse.
HERMITICITY_ATOL = 1e-10

# Trace / positivity tolerance for density matrices.
STATE_ATOL = 1e-10

# Idempotency tolerance for projections.
PROJECTION_ATOL = 1e-10

# Relative scale for clustering nearly degenerate eigenvalues.
EIGENVALUE_CLUSTER_TOL = 1e-9

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


def _as_square_matrix(entries) -> np.ndarray:
    m = np.asarray(entries, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    return m


class HermitianOperator:
    """A Hermitian operator with cached spectral decomposition.

    Parameters
    ----------
    entries : array_like
        Square complex matrix.  Must equal its conjugate transpose to
        within ``HERMITICITY_ATOL`` entrywise; the stored matrix is the
        symmetrized average ``(M + M†)/2``.
    """

    __slots__ = ("_entries", "_eig")

    def __init__(self, entries) -> None:
        m = _as_square_matrix(entries)
        deviation = np.abs(m - m.conj().T).max() if m.size else 0.0
        if deviation > HERMITICITY_ATOL:
            raise ValueError(
                f"matrix is not Hermitian: max |M - M^dag| = {deviation:.3e} "
                f"exceeds {HERMITICITY_ATOL:.0e}"
            )
        m = (m + m.conj().T) / 2.0
        m.flags.writeable = False
        self._entries = m
        self._eig: tuple[np.ndarray, np.ndarray] | None = None

    @property
    def entries(self) -> np.ndarray:
        return self._entries

    @property
    def dim(self) -> int:
        return self._entries.shape[0]

    def eig(self) -> tuple[np.ndarray, np.ndarray]:
        """Eigenvalues (ascending) and eigenvector columns."""
        if self._eig is None:
            w, v = np.linalg.eigh(self._entries)
            w.flags.writeable = False
            v.flags.writeable = False
            self._eig = (w, v)
        return self._eig

    def eigenvalues(self) -> np.ndarray:
        return self.eig()[0]

    def op_norm(self) -> float:
        w = self.eigenvalues()
        return float(np.abs(w).max()) if w.size else 0.0

    def __repr__(self) -> str:  # pragma: no cover
        return f"{type(self).__name__}(dim={self.dim})"


class DensityMatrix(HermitianOperator):
    """A positive semidefinite, unit-trace Hermitian operator."""

    __slots__ = ()

    def __init__(self, entries) -> None:
        super().__init__(entries)
        tr = float(np.trace(self._entries).real)
        if abs(tr - 1.0) > STATE_ATOL:
            raise ValueError(f"trace must be 1, got {tr!r}")
        min_eig = float(self.eigenvalues()[0])
        if min_eig < -STATE_ATOL:
            raise ValueError(f"state is not positive: min eigenvalue {min_eig:.3e}")

    @classmethod
    def pure(cls, vector) -> "DensityMatrix":
        """Rank-1 state |psi><psi| from a (normalized) state vector."""
        psi = np.asarray(vector, dtype=complex).reshape(-1)
        nrm = np.linalg.norm(psi)
        if nrm == 0.0:
            raise ValueError("zero vector has no associated state")
        psi = psi / nrm
        return cls(np.outer(psi, psi.conj()))


@dataclass(frozen=True)
class Projection:
    """An orthogonal projection together with its rank."""

    op: HermitianOperator
    rank: int

    def __post_init__(self) -> None:
        p = self.op.entries
        idem = np.abs(p @ p - p).max() if p.size else 0.0
        if idem > PROJECTION_ATOL:
            raise ValueError(f"not idempotent: max |P^2 - P| = {idem:.3e}")
        tr = float(np.trace(p).real)
        if abs(tr - self.rank) > 1e-8:
            raise ValueError(f"trace {tr!r} does not match rank {self.rank}")

    @property
    def dim(self) -> int:
        return self.op.dim

    @classmethod
    def from_matrix(cls, entries) -> "Projection":
        op = HermitianOperator(entries)
        rank = int(round(float(np.trace(op.entries).real)))
        return cls(op, rank)


@dataclass(frozen=True)
class BlochVector:
    """Real 3-vector (x, y, z) with |r| <= 1 parametrizing a qubit state."""

    x: float
    y: float
    z: float

    def norm(self) -> float:
        return float(np.sqrt(self.x * self.x + self.y * self.y + self.z * self.z))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)


def op_norm(a: HermitianOperator | np.ndarray) -> float:
    """Operator norm (largest absolute eigenvalue) of a Hermitian matrix."""
    if isinstance(a, HermitianOperator):
        return a.op_norm()
    m = _as_square_matrix(a)
    if m.size == 0:
        return 0.0
    return float(np.abs(np.linalg.eigvalsh(m)).max())


def eigen_cluster_tol(a: HermitianOperator) -> float:
    """Absolute dedup tolerance used when grouping eigenvalues of ``a``."""
    return EIGENVALUE_CLUSTER_TOL * max(1.0, a.op_norm())


def cluster_values(values: Iterable[float], tol: float) -> list[float]:
    """Group reals closer than ``tol`` and return sorted cluster means."""
    vals = sorted(float(v) for v in values)
    if not vals:
        return []
    clusters: list[list[float]] = [[vals[0]]]
    for v in vals[1:]:
        if v - clusters[-1][-1] <= tol:
            clusters[-1].append(v)
        else:
            clusters.append([v])
    return [float(np.mean(c)) for c in clusters]


def distinct_eigenvalues(a: HermitianOperator, tol: float | None = None) -> list[float]:
    """Eigenvalues of ``a`` deduplicated to within the cluster tolerance."""
    if tol is None:
        tol = eigen_cluster_tol(a)
    return cluster_values(a.eigenvalues(), tol)


def spectral_projection(
    a: HermitianOperator, values: Sequence[float] | float, tol: float | None = None
) -> Projection:
    """Projection onto the eigenspaces of ``a`` for the given eigenvalues.

    Parameters
    ----------
    a : HermitianOperator
    values : float or sequence of floats
        Target eigenvalues.  An eigenvector is included when its
        eigenvalue lies within ``tol`` of any target.
    tol : float, optional
        Defaults to ``EIGENVALUE_CLUSTER_TOL * max(1, ||a||)``.

    Values matching no eigenvalue contribute nothing; the zero matrix is
    a valid (rank 0) result.
    """
    if tol is None:
        tol = eigen_cluster_tol(a)
    targets = np.atleast_1d(np.asarray(values, dtype=float))
    w, v = a.eig()
    mask = np.zeros(w.shape, dtype=bool)
    for t in targets:
        mask |= np.abs(w - t) <= tol
    cols = v[:, mask]
    p = cols @ cols.conj().T
    return Projection(HermitianOperator(p), rank=int(mask.sum()))


def trace_distance(rho: DensityMatrix, tau: DensityMatrix) -> float:
    """Trace distance ``(1/2) tr |rho - tau|``.

    Computed from the eigenvalues of the Hermitian difference, which for
    states equals half the sum of their absolute values.
    """
    if rho.dim != tau.dim:
        raise ValueError(f"dimension mismatch: {rho.dim} vs {tau.dim}")
    diff = rho.entries - tau.entries
    w = np.linalg.eigvalsh(diff)
    return float(0.5 * np.abs(w).sum())


def bloch_to_state(v: BlochVector) -> DensityMatrix:
    """Qubit state ``(1 + r . sigma)/2`` for a Bloch vector with |r| <= 1."""
    if v.norm() > 1.0 + 1e-12:
        raise ValueError(f"Bloch vector has norm {v.norm()!r} > 1")
    m = 0.5 * (np.eye(2, dtype=complex) + v.x * PAULI_X + v.y * PAULI_Y + v.z * PAULI_Z)
    return DensityMatrix(m)


def state_to_bloch(rho: DensityMatrix) -> BlochVector:
    """Bloch vector of a qubit state: ``r_i = tr(rho sigma_i)``."""
    if rho.dim != 2:
        raise ValueError(f"Bloch coordinates need dim 2, got dim {rho.dim}")
    m = rho.entries
    return BlochVector(
        x=float(np.trace(m @ PAULI_X).real),
        y=float(np.trace(m @ PAULI_Y).real),
        z=float(np.trace(m @ PAULI_Z).real),
    )
