"""Figures of merit for measurement channels.

* ``sigma2``: maximal added variance ``||(B, B)||`` of a pointer.
* ``delta_infidelity``: worst-case calibration error
  ``sup_S ||1_S(A) - T(1 (x) 1_S(B))||`` over outcome sets ``S``.
* ``delta_disturbance``: maximal disturbance ``sup_P ||R(P) - P||`` over
  orthogonal projections, reported as a certified lower bound with the
  maximizing witness.
* ``residual_coherence``: trace distance between the post-measurement
  images of a superposition and of the corresponding mixture.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np
import scipy.linalg
import scipy.optimize

from qchan.channels import Instrument, IsometryChannel, KrausMap, sesquilinear_form
from qchan.operators import (
    DensityMatrix,
    HermitianOperator,
    Projection,
    cluster_values,
    eigen_cluster_tol,
    op_norm,
    trace_distance,
)

# Subset enumeration refuses more than this many merged values.
ENUMERATION_CAP = 20

# Default optimizer tolerance for the disturbance search.
EPS_OPT = 1e-6


class EnumerationCapError(ValueError):
    """Raised when the merged value set exceeds the enumeration cap."""


class DegenerateEigenvaluePairError(ValueError):
    """Raised for a coherence pair whose two eigenvalues coincide."""


def sigma2(channel, pointer) -> float:
    """Maximal added variance ``Sigma^2 = ||(B, B)||`` of a pointer.

    For an ``Instrument``, ``pointer`` is an outcome-value function (a
    ``PointerObservable``, mapping, callable, or sequence); for an
    ``IsometryChannel`` it is a Hermitian operator on the output space.
    The value is also ``sup_rho Var(B, T* rho) - Var(T(B), rho)`` when
    the transfer is unbiased, but it is computed here directly from the
    defect form.
    """
    form = sesquilinear_form(channel, pointer, pointer)
    return float(op_norm((form + form.conj().T) / 2.0))


def distance_to_center(a: HermitianOperator) -> float:
    """Distance ``(lambda_max - lambda_min)/2`` of ``a`` from the scalars."""
    w = a.eigenvalues()
    return float((w[-1] - w[0]) / 2.0)


def delta_infidelity(inst: Instrument, a: HermitianOperator) -> float:
    """Worst-case calibration error of ``inst`` as a measurement of ``a``.

    delta = sup_S || 1_S(a) - T(1 (x) 1_S(B)) ||, with S running over
    subsets of the merged value set: the deduplicated eigenvalues of
    ``a`` together with the deduplicated pointer readings.  Per merged
    value v the difference contributes D_v = E_v - mu_v (eigenprojection
    minus POVM weight, either possibly zero), and the supremum is the
    max of ``||sum_{v in S} D_v||`` over all subsets.

    Raises ``EnumerationCapError`` when more than ``ENUMERATION_CAP``
    merged values survive deduplication.
    """
    if a.dim != inst.dim:
        raise ValueError(f"observable dim {a.dim} does not match instrument {inst.dim}")
    tol = eigen_cluster_tol(a)
    merged = cluster_values(list(a.eigenvalues()) + list(inst.values), tol)
    if len(merged) > ENUMERATION_CAP:
        raise EnumerationCapError(
            f"{len(merged)} merged values exceed the cap of {ENUMERATION_CAP}"
        )

    w, v = a.eig()
    povm = inst.povm()
    diffs = []
    for target in merged:
        mask = np.abs(w - target) <= tol
        cols = v[:, mask]
        d = cols @ cols.conj().T
        for val, el in zip(inst.values, povm):
            if abs(val - target) <= tol:
                d = d - el.entries
        diffs.append(d)

    best = 0.0
    n = len(diffs)
    for bits in range(1, 1 << n):
        s = np.zeros((inst.dim, inst.dim), dtype=complex)
        for i in range(n):
            if bits >> i & 1:
                s = s + diffs[i]
        nrm = float(np.abs(np.linalg.eigvalsh(s)).max())
        if nrm > best:
            best = nrm
    return best


@dataclass(frozen=True)
class DisturbanceConfig:
    """Search parameters for ``delta_disturbance``.

    ``method``: "auto" picks the Bloch grid for dim 2 and the projection
    manifold search otherwise; "grid" and "manifold" force a path.
    """

    restarts: int = 32
    seed: int = 0
    eps_opt: float = EPS_OPT
    grid_points: int = 10_000
    method: str = "auto"


@dataclass(frozen=True)
class DisturbanceEstimate:
    """A certified lower bound on ``sup_P ||R(P) - P||``.

    ``value`` always equals ``||R(P*) - P*||`` for the stored witness
    projection ``P*``; it can fall short of the true supremum by at most
    the optimizer's blind spot, so treat it as a lower bound with
    resolution ``eps_opt``.  ``estimated`` is True on the generic
    (dim > 2) search path.
    """

    value: float
    witness: Projection
    restarts: int
    converged: bool
    eps_opt: float
    estimated: bool

    @property
    def rank(self) -> int:
        return self.witness.rank

    @property
    def dim(self) -> int:
        return self.witness.dim

    def to_json_dict(self) -> dict:
        return {
            "value": self.value,
            "rank": self.rank,
            "restarts": self.restarts,
            "converged": self.converged,
            "eps_opt": self.eps_opt,
        }


def _defect_norm(channel: KrausMap, p: np.ndarray) -> float:
    return float(np.abs(np.linalg.eigvalsh(channel.apply(p) - p)).max())


def _bloch_decomposition(channel: KrausMap) -> tuple[np.ndarray, np.ndarray]:
    """Heisenberg action on qubit Paulis: R(sigma_i) = a_i 1 + sum_j b_ij sigma_j."""
    from qchan.operators import PAULI_X, PAULI_Y, PAULI_Z

    paulis = (PAULI_X, PAULI_Y, PAULI_Z)
    a = np.zeros(3)
    b = np.zeros((3, 3))
    for i, si in enumerate(paulis):
        img = channel.apply(si)
        a[i] = 0.5 * np.trace(img).real
        for j, sj in enumerate(paulis):
            b[i, j] = 0.5 * np.trace(img @ sj).real
    return a, b


def _qubit_objective(a: np.ndarray, b: np.ndarray):
    # ||R(P) - P|| for P = (1 + n.sigma)/2 equals
    # (|a.n| + |(b^T - 1) n|)/2: the norm of alpha*1 + beta.sigma is
    # |alpha| + |beta|.
    m = b.T - np.eye(3)

    def f(n: np.ndarray) -> float:
        return 0.5 * (abs(float(a @ n)) + float(np.linalg.norm(m @ n)))

    return f

def _fibonacci_sphere(n: int) -> np.ndarray:
    i = np.arange(n, dtype=float) + 0.5
    phi = np.pi * (1.0 + np.sqrt(5.0)) * i
    z = 1.0 - 2.0 * i / n
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def _projection_from_direction(n: np.ndarray) -> np.ndarray:
    from qchan.operators import PAULI_X, PAULI_Y, PAULI_Z

    return 0.5 * (np.eye(2, dtype=complex) + n[0] * PAULI_X + n[1] * PAULI_Y + n[2] * PAULI_Z)


def _qubit_path(channel: KrausMap, config: DisturbanceConfig) -> DisturbanceEstimate:
    a, b = _bloch_decomposition(channel)
    f = _qubit_objective(a, b)

    grid = _fibonacci_sphere(max(config.grid_points, 10_000))
    m = b.T - np.eye(3)
    # vectorized objective over the whole grid
    vals = 0.5 * (np.abs(grid @ a) + np.linalg.norm(grid @ m.T, axis=1))
    order = np.argsort(vals)[::-1]

    def from_angles(t: np.ndarray) -> np.ndarray:
        th, ph = t
        return np.array([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)])

    best_n = grid[order[0]]
    best_val = float(vals[order[0]])
    converged = False
    for idx in order[:8]:
        n0 = grid[idx]
        t0 = np.array([np.arccos(np.clip(n0[2], -1, 1)), np.arctan2(n0[1], n0[0])])
        res = scipy.optimize.minimize(
            lambda t: -f(from_angles(t)),
            t0,
            method="Nelder-Mead",
            options={"xatol": 1e-9, "fatol": 1e-12, "maxiter": 400},
        )
        cand = from_angles(res.x)
        val = f(cand)
        if val >= best_val:
            best_val, best_n = val, cand
            converged = bool(res.success)

    p = _projection_from_direction(best_n / np.linalg.norm(best_n))
    witness = Projection.from_matrix(p)
    value = _defect_norm(channel, witness.op.entries)
    return DisturbanceEstimate(
        value=value,
        witness=witness,
        restarts=8,
        converged=converged,
        eps_opt=config.eps_opt,
        estimated=False,
    )


def _chart_projection(q: np.ndarray, k: int, z: np.ndarray) -> np.ndarray:
    """Move a rank-k projection along a Grassmann chart direction ``z``."""
    d = q.shape[0]
    h = np.zeros((d, d), dtype=complex)
    h[:k, k:] = z
    h[k:, :k] = -z.conj().T
    w = q @ scipy.linalg.expm(h)
    cols = w[:, :k]
    return cols @ cols.conj().T


def _manifold_path(channel: KrausMap, config: DisturbanceConfig) -> DisturbanceEstimate:
    d = channel.dim
    if d > 16:
        raise ValueError(f"manifold search supports dim <= 16, got {d}")
    rng = np.random.default_rng(np.random.Philox(key=np.array([config.seed, 0], dtype=np.uint64)))

    best_val = -1.0
    best_p: np.ndarray | None = None
    best_rank = 1
    converged = False

    # ranks k and d-k give equal defects for unital channels, so search
    # the lower half only
    ranks = list(range(1, d // 2 + 1))
    for rank in ranks:
        n_params = 2 * rank * (d - rank)
        for restart in range(config.restarts):
            g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
            q, r = np.linalg.qr(g)
            q = q * (np.diagonal(r) / np.abs(np.diagonal(r)))
            p = q[:, :rank] @ q[:, :rank].conj().T
            val = _defect_norm(channel, p)
            ok = False
            # re-centered chart descent; a couple of rounds suffice
            for _ in range(4):
                w, vecs = np.linalg.eigh(p)
                basis = np.column_stack([vecs[:, ::-1][:, :rank], vecs[:, ::-1][:, rank:]])

                def neg(theta: np.ndarray) -> float:
                    z = (
                        theta[: n_params // 2] + 1j * theta[n_params // 2 :]
                    ).reshape(rank, d - rank)
                    return -_defect_norm(channel, _chart_projection(basis, rank, z))

                res = scipy.optimize.minimize(
                    neg,
                    np.zeros(n_params),
                    method="Nelder-Mead",
                    options={"xatol": 1e-8, "fatol": 1e-12, "maxiter": 200 * n_params},
                )
                z = (
                    res.x[: n_params // 2] + 1j * res.x[n_params // 2 :]
                ).reshape(rank, d - rank)
                p_new = _chart_projection(basis, rank, z)
                val_new = _defect_norm(channel, p_new)
                improved = val_new - val
                p, val, ok = p_new, val_new, bool(res.success)
                if improved < config.eps_opt / 10.0:
                    break
            if val > best_val:
                best_val, best_p, best_rank, converged = val, p, rank, ok

    assert best_p is not None
    # snap to an exact projection before certifying the witness value
    w, vecs = np.linalg.eigh(best_p)
    cols = vecs[:, ::-1][:, :best_rank]
    p_exact = cols @ cols.conj().T
    witness = Projection(HermitianOperator(p_exact), rank=best_rank)
    value = _defect_norm(channel, witness.op.entries)
    return DisturbanceEstimate(
        value=value,
        witness=witness,
        restarts=config.restarts,
        converged=converged,
        eps_opt=config.eps_opt,
        estimated=d > 2,
    )


def delta_disturbance(
    channel: KrausMap | Instrument, config: DisturbanceConfig | None = None
) -> DisturbanceEstimate:
    """Maximal disturbance ``sup_P ||R(P) - P||`` of the restricted channel.

    Dim 2 uses a dense Bloch-sphere grid (>= 10^4 directions) with local
    refinement; higher dimensions run a multi-start search over the
    projection manifolds of each rank.  The returned value is exact for
    the stored witness and a lower bound for the supremum.
    """
    if isinstance(channel, Instrument):
        channel = channel.restriction()
    if config is None:
        config = DisturbanceConfig()
    method = config.method
    if method == "auto":
        method = "grid" if channel.dim == 2 else "manifold"
    if method == "grid":
        if channel.dim != 2:
            raise ValueError("grid path is only defined for dim 2")
        return _qubit_path(channel, config)
    if method == "manifold":
        return _manifold_path(channel, config)
    raise ValueError(f"unknown method {config.method!r}")


@dataclass(frozen=True)
class CoherencePair:
    """Two orthonormal eigenvectors of an observable plus amplitudes.

    ``psi_x`` and ``psi_y`` must be orthonormal; when ``observable`` is
    given they must be its eigenvectors for the stored eigenvalues to
    within 1e-8.  Equal eigenvalues are rejected: the off-diagonal decay
    statement is empty for a degenerate pair.
    """

    psi_x: tuple[complex, ...]
    psi_y: tuple[complex, ...]
    x: float
    y: float
    alpha: complex = 2.0 ** -0.5
    beta: complex = 2.0 ** -0.5

    def __post_init__(self) -> None:
        vx = np.asarray(self.psi_x, dtype=complex)
        vy = np.asarray(self.psi_y, dtype=complex)
        if vx.shape != vy.shape or vx.ndim != 1:
            raise ValueError("psi_x and psi_y must be vectors of equal length")
        for name, v in (("psi_x", vx), ("psi_y", vy)):
            if abs(np.linalg.norm(v) - 1.0) > 1e-10:
                raise ValueError(f"{name} is not normalized")
        if abs(np.vdot(vx, vy)) > 1e-10:
            raise ValueError("psi_x and psi_y are not orthogonal")
        if abs(self.x - self.y) <= 1e-12:
            raise DegenerateEigenvaluePairError(
                f"eigenvalues {self.x!r} and {self.y!r} coincide"
            )
        norm2 = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(norm2 - 1.0) > 1e-10:
            raise ValueError(f"|alpha|^2 + |beta|^2 = {norm2!r}, expected 1")

    @classmethod
    def for_observable(
        cls,
        a: HermitianOperator,
        psi_x,
        psi_y,
        x: float,
        y: float,
        alpha: complex = 2.0 ** -0.5,
        beta: complex = 2.0 ** -0.5,
    ) -> "CoherencePair":
        vx = np.asarray(psi_x, dtype=complex)
        vy = np.asarray(psi_y, dtype=complex)
        for v, lam, name in ((vx, x, "psi_x"), (vy, y, "psi_y")):
            resid = np.linalg.norm(a.entries @ v - lam * v)
            if resid > 1e-8:
                raise ValueError(
                    f"{name} is not an eigenvector for {lam!r}: residual {resid:.3e}"
                )
        return cls(tuple(vx), tuple(vy), float(x), float(y), alpha, beta)

    @classmethod
    def from_extremes(
        cls,
        a: HermitianOperator,
        alpha: complex = 2.0 ** -0.5,
        beta: complex = 2.0 ** -0.5,
    ) -> "CoherencePair":
        """Pair the lowest and highest eigenvectors of ``a``."""
        w, v = a.eig()
        return cls.for_observable(
            a, v[:, 0], v[:, -1], float(w[0]), float(w[-1]), alpha, beta
        )

    @property
    def gap(self) -> float:
        return abs(self.x - self.y)

    def superposition(self) -> DensityMatrix:
        v = self.alpha * np.asarray(self.psi_x) + self.beta * np.asarray(self.psi_y)
        return DensityMatrix.pure(v)

    def mixture(self) -> DensityMatrix:
        vx = np.asarray(self.psi_x)
        vy = np.asarray(self.psi_y)
        m = abs(self.alpha) ** 2 * np.outer(vx, vx.conj()) + abs(self.beta) ** 2 * np.outer(
            vy, vy.conj()
        )
        return DensityMatrix(m)


def residual_coherence(channel: KrausMap | Instrument, pair: CoherencePair) -> float:
    """Trace distance between the channel images of superposition and mixture.

    Zero means the measurement fully decoheres the pair; the identity
    channel gives ``|alpha| |beta|``.
    """
    if isinstance(channel, Instrument):
        channel = channel.restriction()
    rho_sup = DensityMatrix(channel.apply_dual(pair.superposition()))
    rho_mix = DensityMatrix(channel.apply_dual(pair.mixture()))
    return trace_distance(rho_sup, rho_mix)
