"""Seeded random inputs for falsification sweeps.

All draws go through Philox, a counter-based generator with a stable
cross-platform bit stream.  A master seed fans out to independent
per-trial streams via ``rng_for(master_seed, index)``, which keys the
generator with the (seed, index) pair; trials can therefore run in any
order, or in parallel, and reproduce byte-identical results.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from qchan.channels import Instrument
from qchan.operators import HermitianOperator

# Retries for the Kraus-stack normalization before giving up.
MAX_NORMALIZATION_TRIES = 8

# Minimum eigenvalue of G^dag G accepted for inversion.
_SINGULAR_FLOOR = 1e-8


class NormalizationError(RuntimeError):
    """Raised when no well-conditioned random Kraus stack is found."""


@dataclass(frozen=True)
class GenConfig:
    """Shape of a random instrument draw."""

    seed: int
    dim: int = 2
    n_outcomes: int = 2
    kraus_per_outcome: int = 1

    def __post_init__(self) -> None:
        if self.dim < 2:
            raise ValueError(f"dim must be at least 2, got {self.dim}")
        if self.n_outcomes < 1:
            raise ValueError(f"n_outcomes must be positive, got {self.n_outcomes}")
        if self.kraus_per_outcome < 1:
            raise ValueError(
                f"kraus_per_outcome must be positive, got {self.kraus_per_outcome}"
            )


def rng_for(master_seed: int, index: int = 0) -> np.random.Generator:
    """Independent stream for trial ``index`` under ``master_seed``."""
    key = np.array([np.uint64(master_seed), np.uint64(index)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_unitary_from(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Unitary from the QR of a complex Gaussian matrix with the phase of
    the R diagonal absorbed.  Uniform enough for falsification work."""
    q, r = np.linalg.qr(_complex_gaussian(rng, (dim, dim)))
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_pure_state_from(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = _complex_gaussian(rng, dim)
    return v / np.linalg.norm(v)


def random_pure_state(seed: int, dim: int = 2) -> np.ndarray:
    return random_pure_state_from(rng_for(seed), dim)


def random_hermitian_from(
    rng: np.random.Generator, dim: int, norm_cap: float | None = None
) -> HermitianOperator:
    g = _complex_gaussian(rng, (dim, dim))
    h = (g + g.conj().T) / 2.0
    if norm_cap is not None:
        nrm = float(np.abs(np.linalg.eigvalsh(h)).max())
        if nrm > norm_cap:
            h = h * (norm_cap / nrm)
    return HermitianOperator(h)


def random_hermitian(seed: int, dim: int = 2, norm_cap: float | None = None) -> HermitianOperator:
    return random_hermitian_from(rng_for(seed), dim, norm_cap)


def distinct_values_from(
    rng: np.random.Generator, n: int, min_gap: float = 1e-3
) -> tuple[float, ...]:
    """Real outcome readings with pairwise separation at least ``min_gap``."""
    for _ in range(MAX_NORMALIZATION_TRIES):
        vals = np.sort(rng.standard_normal(n))
        if n == 1 or np.diff(vals).min() >= min_gap:
            return tuple(float(v) for v in rng.permutation(vals))
    raise NormalizationError(f"could not draw {n} separated values")


def random_instrument_from(
    rng: np.random.Generator,
    dim: int,
    n_outcomes: int,
    kraus_per_outcome: int,
) -> Instrument:
    """Random instrument: Gaussian Kraus stack, right-normalized.

    The raw stack G is normalized by ``S^{-1/2}`` with ``S = sum G^dag G``,
    which enforces unitality exactly (up to rounding).  Draws whose S is
    near singular are rejected and retried.
    """
    for _ in range(MAX_NORMALIZATION_TRIES):
        raw = [
            [_complex_gaussian(rng, (dim, dim)) for _ in range(kraus_per_outcome)]
            for _ in range(n_outcomes)
        ]
        s = sum(g.conj().T @ g for fam in raw for g in fam)
        w, v = np.linalg.eigh(s)
        if w.min() < _SINGULAR_FLOOR:
            continue
        inv_sqrt = v @ np.diag(1.0 / np.sqrt(w)) @ v.conj().T
        values = distinct_values_from(rng, n_outcomes)
        outcomes = [(i, values[i]) for i in range(n_outcomes)]
        branches = [[g @ inv_sqrt for g in fam] for fam in raw]
        return Instrument(outcomes, branches)
    raise NormalizationError("no well-conditioned Kraus stack found")


def random_instrument(cfg: GenConfig) -> Instrument:
    return random_instrument_from(
        rng_for(cfg.seed), cfg.dim, cfg.n_outcomes, cfg.kraus_per_outcome
    )


def random_projective_instrument_from(
    rng: np.random.Generator, dim: int
) -> tuple[Instrument, HermitianOperator]:
    """A sharp instrument: rank-1 projections onto a random orthonormal
    basis, one outcome per basis vector, plus the observable it measures."""
    u = random_unitary_from(rng, dim)
    values = distinct_values_from(rng, dim)
    outcomes = []
    branches = []
    for i in range(dim):
        col = u[:, i : i + 1]
        outcomes.append((i, values[i]))
        branches.append([col @ col.conj().T])
    a = u @ np.diag(values) @ u.conj().T
    return Instrument(outcomes, branches), HermitianOperator(a)


def random_nondestructive_instrument_from(
    rng: np.random.Generator,
    dim: int,
    n_outcomes: int,
    kraus_per_outcome: int,
) -> tuple[Instrument, HermitianOperator]:
    """An instrument whose restriction fixes a random eigenbasis.

    All Kraus operators are diagonal in one random basis, so basis
    states pass through undisturbed while coherences decay: the
    nondestructive regime.  Returns the instrument and an observable
    diagonal in that basis with separated eigenvalues.
    """
    u = random_unitary_from(rng, dim)
    diags = _complex_gaussian(rng, (n_outcomes, kraus_per_outcome, dim))
    col_norm = np.sqrt((np.abs(diags) ** 2).sum(axis=(0, 1)))
    if col_norm.min() < 1e-6:
        # vanishing column: renormalization would blow up; redraw once
        diags = _complex_gaussian(rng, (n_outcomes, kraus_per_outcome, dim))
        col_norm = np.sqrt((np.abs(diags) ** 2).sum(axis=(0, 1)))
    diags = diags / col_norm
    values = distinct_values_from(rng, n_outcomes)
    eigs = distinct_values_from(rng, dim)
    outcomes = []
    branches = []
    for i in range(n_outcomes):
        outcomes.append((i, values[i]))
        branches.append(
            [u @ np.diag(diags[i, k]) @ u.conj().T for k in range(kraus_per_outcome)]
        )
    a = u @ np.diag(eigs) @ u.conj().T
    return Instrument(outcomes, branches), HermitianOperator(a)


def random_aligned_instrument_from(
    rng: np.random.Generator,
    dim: int,
    n_outcomes: int,
    kraus_per_outcome: int,
    alignment: float | None = None,
) -> tuple[Instrument, HermitianOperator]:
    """A nondestructive instrument that imperfectly reads out its observable.

    Outcome values are the observable's own eigenvalues (each claimed by
    at least one outcome), and the Kraus weights concentrate on the
    claimed eigenvector up to an admixture of strength ``alignment``
    (drawn from [0.1, 0.8] when not given).  The resulting readout error
    is finite and varies over the whole admissible range instead of
    being pinned at its maximum, which is what an unaligned value draw
    would produce.
    """
    if n_outcomes < dim:
        raise ValueError("need at least one outcome per eigenvalue")
    u = random_unitary_from(rng, dim)
    eigs = distinct_values_from(rng, dim)
    extra = [int(x) for x in rng.integers(0, dim, n_outcomes - dim)]
    assign = list(range(dim)) + extra
    assign = [assign[int(i)] for i in rng.permutation(n_outcomes)]
    lam = float(rng.uniform(0.1, 0.8)) if alignment is None else float(alignment)
    base = np.zeros((n_outcomes, kraus_per_outcome, dim), dtype=complex)
    for i, j in enumerate(assign):
        base[i, :, j] = 1.0
    diags = base + lam * _complex_gaussian(rng, base.shape)
    col_norm = np.sqrt((np.abs(diags) ** 2).sum(axis=(0, 1)))
    if col_norm.min() < 1e-6:
        diags = base + lam * _complex_gaussian(rng, base.shape)
        col_norm = np.sqrt((np.abs(diags) ** 2).sum(axis=(0, 1)))
    diags = diags / col_norm
    outcomes = [(i, eigs[assign[i]]) for i in range(n_outcomes)]
    branches = [
        [u @ np.diag(diags[i, k]) @ u.conj().T for k in range(kraus_per_outcome)]
        for i in range(n_outcomes)
    ]
    a = u @ np.diag(eigs) @ u.conj().T
    return Instrument(outcomes, branches), HermitianOperator(a)
