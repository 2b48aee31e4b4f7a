"""Measurement channels in the Heisenberg picture.

Two concrete representations are used throughout:

* ``Instrument``: a measurement with finitely many classical outcomes,
  one Kraus family per outcome.  Inputs of the channel are elements
  ``X (x) f`` of (system operators) tensor (functions on the outcome
  set), represented as the pair ``(X, f)`` rather than as an explicit
  tensor-product matrix.
* ``IsometryChannel``: ``T(Y) = V^dag Y V`` for an isometry ``V``, the
  general dilation form of a channel without a distinguished classical
  outcome set.

Both support the sesquilinear defect form

    (X, Y) := T(X^dag Y) - T(X)^dag T(Y),

whose norm at ``X = Y = B`` is the maximal variance the channel adds to
the pointer observable ``B``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from qchan.operators import DensityMatrix, HermitianOperator, _as_square_matrix

# Unitality / normalization tolerance for channel construction.
UNITALITY_ATOL = 1e-10

# POVM elements may dip this far below 0 from rounding.
POVM_ATOL = 1e-10

# A Choi matrix is accepted as positive when its minimum eigenvalue is
# no smaller than this.
CHOI_ATOL = 1e-9

Label = int | str


@dataclass(frozen=True)
class PointerObservable:
    """A function on an instrument's outcome set, ``B = 1 (x) g``.

    ``labels`` identifies the outcome set it belongs to; ``values`` are
    the (real) readings ``g(omega)`` in outcome order.
    """

    labels: tuple[Label, ...]
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.labels) != len(self.values):
            raise ValueError("one value per outcome label required")

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    def indicator(self, subset: Sequence[float], tol: float = 1e-12) -> "PointerObservable":
        """Indicator function 1_S(g): 1 where g(omega) matches ``subset``."""
        s = np.atleast_1d(np.asarray(subset, dtype=float))
        vals = tuple(
            1.0 if np.any(np.abs(s - v) <= tol) else 0.0 for v in self.values
        )
        return PointerObservable(self.labels, vals)

    def scaled(self, c: float) -> "PointerObservable":
        return PointerObservable(self.labels, tuple(c * v for v in self.values))

    def shifted(self, c: float) -> "PointerObservable":
        return PointerObservable(self.labels, tuple(v + c for v in self.values))

    def apply(self, fn: Callable[[float], float]) -> "PointerObservable":
        return PointerObservable(self.labels, tuple(float(fn(v)) for v in self.values))


@dataclass(frozen=True)
class BranchOutcome:
    """One classical outcome of a measurement applied to a state."""

    label: Label
    value: float
    probability: float
    posterior: DensityMatrix | None


class KrausMap:
    """A completely positive map given by a Kraus family.

    ``apply`` is the Heisenberg picture ``X -> sum_k K^dag X K``;
    ``apply_dual`` the Schroedinger picture ``rho -> sum_k K rho K^dag``.
    """

    __slots__ = ("_kraus",)

    def __init__(self, kraus: Sequence[np.ndarray]) -> None:
        if len(kraus) == 0:
            raise ValueError("at least one Kraus operator required")
        mats = []
        dim = None
        for k in kraus:
            m = _as_square_matrix(k)
            if dim is None:
                dim = m.shape[0]
            elif m.shape[0] != dim:
                raise ValueError("Kraus operators must share one dimension")
            m = m.copy()
            m.flags.writeable = False
            mats.append(m)
        self._kraus = tuple(mats)

    @property
    def kraus(self) -> tuple[np.ndarray, ...]:
        return self._kraus

    @property
    def dim(self) -> int:
        return self._kraus[0].shape[0]

    def is_unital(self, atol: float = UNITALITY_ATOL) -> bool:
        s = sum(k.conj().T @ k for k in self._kraus)
        return bool(np.abs(s - np.eye(self.dim)).max() <= atol)

    def apply(self, x: np.ndarray | HermitianOperator) -> np.ndarray:
        m = x.entries if isinstance(x, HermitianOperator) else np.asarray(x, dtype=complex)
        return sum(k.conj().T @ m @ k for k in self._kraus)

    def apply_dual(self, rho: np.ndarray | DensityMatrix) -> np.ndarray:
        m = rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
        return sum(k @ m @ k.conj().T for k in self._kraus)


class Instrument:
    """A finite-outcome measurement channel.

    Parameters
    ----------
    outcomes : sequence of (label, value)
        Outcome labels with their real pointer readings ``g(omega)``.
        Labels must be unique.
    branches : sequence of Kraus families
        ``branches[i]`` is the list of Kraus operators of outcome ``i``.
        Unitality ``sum_{omega,k} K^dag K = 1`` is enforced to within
        ``UNITALITY_ATOL``.
    """

    __slots__ = ("_labels", "_values", "_branches", "_dim")

    def __init__(
        self,
        outcomes: Sequence[tuple[Label, float]],
        branches: Sequence[Sequence[np.ndarray]],
    ) -> None:
        if len(outcomes) == 0:
            raise ValueError("at least one outcome required")
        if len(outcomes) != len(branches):
            raise ValueError("one Kraus family per outcome required")
        labels = tuple(lab for lab, _ in outcomes)
        if len(set(labels)) != len(labels):
            raise ValueError("outcome labels must be unique")
        values = tuple(float(val) for _, val in outcomes)

        dim = None
        frozen: list[tuple[np.ndarray, ...]] = []
        for fam in branches:
            if len(fam) == 0:
                raise ValueError("every outcome needs at least one Kraus operator")
            mats = []
            for k in fam:
                m = _as_square_matrix(k)
                if dim is None:
                    dim = m.shape[0]
                elif m.shape[0] != dim:
                    raise ValueError("Kraus operators must share one dimension")
                m = m.copy()
                m.flags.writeable = False
                mats.append(m)
            frozen.append(tuple(mats))
        assert dim is not None

        total = sum(k.conj().T @ k for fam in frozen for k in fam)
        dev = np.abs(total - np.eye(dim)).max()
        if dev > UNITALITY_ATOL:
            raise ValueError(
                f"not unital: max |sum K^dag K - 1| = {dev:.3e} exceeds {UNITALITY_ATOL:.0e}"
            )
        for fam in frozen:
            el = sum(k.conj().T @ k for k in fam)
            min_eig = float(np.linalg.eigvalsh(el)[0])
            if min_eig < -POVM_ATOL:
                raise ValueError(f"POVM element not positive: min eigenvalue {min_eig:.3e}")

        self._labels = labels
        self._values = values
        self._branches = tuple(frozen)
        self._dim = dim

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def n_outcomes(self) -> int:
        return len(self._labels)

    @property
    def labels(self) -> tuple[Label, ...]:
        return self._labels

    @property
    def values(self) -> tuple[float, ...]:
        return self._values

    @property
    def branches(self) -> tuple[tuple[np.ndarray, ...], ...]:
        return self._branches

    def pointer(self) -> PointerObservable:
        """The default pointer observable reading out g(omega) = value."""
        return PointerObservable(self._labels, self._values)

    def pointer_from(
        self, f: Mapping[Label, float] | Callable[[Label], float] | Sequence[float]
    ) -> PointerObservable:
        return PointerObservable(self._labels, tuple(map(float, self._coerce_values(f))))

    def _coerce_values(self, f) -> np.ndarray:
        """Outcome-value vector from None, PointerObservable, mapping,
        callable on labels, or a plain sequence in outcome order."""
        if f is None:
            return np.ones(self.n_outcomes, dtype=complex)
        if isinstance(f, PointerObservable):
            if f.labels != self._labels:
                raise ValueError("pointer belongs to a different outcome set")
            return np.asarray(f.values, dtype=complex)
        if isinstance(f, Mapping):
            return np.array([f[lab] for lab in self._labels], dtype=complex)
        if callable(f):
            return np.array([f(lab) for lab in self._labels], dtype=complex)
        arr = np.asarray(f, dtype=complex).reshape(-1)
        if arr.shape[0] != self.n_outcomes:
            raise ValueError(
                f"expected {self.n_outcomes} outcome values, got {arr.shape[0]}"
            )
        return arr

    def povm(self) -> list[HermitianOperator]:
        """POVM elements ``mu(omega) = sum_k K^dag K`` in outcome order."""
        return [
            HermitianOperator(sum(k.conj().T @ k for k in fam)) for fam in self._branches
        ]

    def heisenberg(self, x=None, f=None) -> np.ndarray:
        """Apply the channel to ``X (x) f``:  ``sum_w f(w) sum_k K^dag X K``.

        ``x = None`` means the system identity, ``f = None`` the constant
        function 1.  The result is a plain matrix; it is Hermitian
        whenever ``x`` is Hermitian and ``f`` real-valued.
        """
        vals = self._coerce_values(f)
        if x is None:
            xm = None
        elif isinstance(x, HermitianOperator):
            xm = x.entries
        else:
            xm = _as_square_matrix(x)
            if xm.shape[0] != self._dim:
                raise ValueError(f"operator dim {xm.shape[0]} does not match {self._dim}")
        out = np.zeros((self._dim, self._dim), dtype=complex)
        for c, fam in zip(vals, self._branches):
            if c == 0.0:
                continue
            for k in fam:
                out += c * (k.conj().T @ k if xm is None else k.conj().T @ xm @ k)
        return out

    def schrodinger(self, rho: DensityMatrix) -> list[BranchOutcome]:
        """Outcome weights and normalized posterior states for ``rho``.

        Weights sum to 1 (unitality).  A branch with weight below 1e-14
        gets posterior ``None``.
        """
        if rho.dim != self._dim:
            raise ValueError(f"state dim {rho.dim} does not match {self._dim}")
        results = []
        for lab, val, fam in zip(self._labels, self._values, self._branches):
            raw = sum(k @ rho.entries @ k.conj().T for k in fam)
            w = float(np.trace(raw).real)
            post = DensityMatrix(raw / w) if w > 1e-14 else None
            results.append(BranchOutcome(lab, val, w, post))
        total = sum(r.probability for r in results)
        if abs(total - 1.0) > 1e-10:
            raise AssertionError(f"outcome weights sum to {total!r}, not 1")
        return results

    def restriction(self) -> KrausMap:
        """The system-only channel R: all Kraus operators, outcome forgotten."""
        return KrausMap([k for fam in self._branches for k in fam])

    # -- serialization ---------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "dim": self._dim,
            "outcomes": [
                {
                    "label": lab,
                    "value": val,
                    "kraus": [_encode_matrix(k) for k in fam],
                }
                for lab, val, fam in zip(self._labels, self._values, self._branches)
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "Instrument":
        dim = int(data["dim"])
        outcomes = []
        branches = []
        for entry in data["outcomes"]:
            outcomes.append((entry["label"], float(entry["value"])))
            fam = [_decode_matrix(m) for m in entry["kraus"]]
            for k in fam:
                if k.shape[0] != dim:
                    raise ValueError("kraus dimension does not match declared dim")
            branches.append(fam)
        return cls(outcomes, branches)

    @classmethod
    def from_json(cls, text: str) -> "Instrument":
        return cls.from_json_dict(json.loads(text))

    def __repr__(self) -> str:  # pragma: no cover
        return f"Instrument(dim={self._dim}, outcomes={self._labels!r})"


def _encode_matrix(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def _decode_matrix(rows: Sequence) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)


class IsometryChannel:
    """``T(Y) = V^dag Y V`` for an isometry ``V: H_in -> H_out``."""

    __slots__ = ("_v",)

    def __init__(self, v: np.ndarray) -> None:
        m = np.asarray(v, dtype=complex)
        if m.ndim != 2 or m.shape[0] < m.shape[1]:
            raise ValueError(f"isometry must be tall, got shape {m.shape}")
        dev = np.abs(m.conj().T @ m - np.eye(m.shape[1])).max()
        if dev > UNITALITY_ATOL:
            raise ValueError(
                f"not an isometry: max |V^dag V - 1| = {dev:.3e} exceeds {UNITALITY_ATOL:.0e}"
            )
        m = m.copy()
        m.flags.writeable = False
        self._v = m

    @property
    def v(self) -> np.ndarray:
        return self._v

    @property
    def dim_in(self) -> int:
        return self._v.shape[1]

    @property
    def dim_out(self) -> int:
        return self._v.shape[0]

    def apply(self, y: np.ndarray | HermitianOperator) -> np.ndarray:
        m = y.entries if isinstance(y, HermitianOperator) else _as_square_matrix(y)
        if m.shape[0] != self.dim_out:
            raise ValueError(f"operator dim {m.shape[0]} does not match {self.dim_out}")
        return self._v.conj().T @ m @ self._v

    def apply_dual(self, rho: np.ndarray | DensityMatrix) -> np.ndarray:
        m = rho.entries if isinstance(rho, DensityMatrix) else _as_square_matrix(rho)
        return self._v @ m @ self._v.conj().T


def isometry_apply(channel: IsometryChannel, y) -> np.ndarray:
    """Heisenberg action ``V^dag Y V`` of an isometry channel."""
    return channel.apply(y)


def sesquilinear_form(channel, x, y) -> np.ndarray:
    """The defect form ``(X, Y) := T(X^dag Y) - T(X)^dag T(Y)``.

    For an ``Instrument``, ``x`` and ``y`` may each be a system matrix,
    a pointer (``PointerObservable``, mapping, callable, or value
    sequence), or a pair ``(X, f)`` for the mixed element ``X (x) f``.
    For ``IsometryChannel`` and ``KrausMap`` they are matrices on the
    channel's input (output-space) side.

    ``(Y, X)`` is the adjoint of ``(X, Y)``, and ``(B, B)`` is positive
    semidefinite for any channel; neither fact is assumed here, both are
    properties of the returned matrices.
    """
    if isinstance(channel, Instrument):
        x_mat, x_vals = _instrument_element(channel, x)
        y_mat, y_vals = _instrument_element(channel, y)
        prod_mat = x_mat.conj().T @ y_mat
        prod_vals = np.conj(x_vals) * y_vals
        t_prod = channel.heisenberg(prod_mat, prod_vals)
        tx = channel.heisenberg(x_mat, x_vals)
        ty = channel.heisenberg(y_mat, y_vals)
        return t_prod - tx.conj().T @ ty
    if isinstance(channel, (IsometryChannel, KrausMap)):
        xm = x.entries if isinstance(x, HermitianOperator) else _as_square_matrix(x)
        ym = y.entries if isinstance(y, HermitianOperator) else _as_square_matrix(y)
        t_prod = channel.apply(xm.conj().T @ ym)
        return t_prod - channel.apply(xm).conj().T @ channel.apply(ym)
    raise TypeError(f"unsupported channel type {type(channel).__name__}")


def _instrument_element(inst: Instrument, obj) -> tuple[np.ndarray, np.ndarray]:
    """Normalize an algebra element to ``(system matrix, outcome values)``."""
    eye = np.eye(inst.dim, dtype=complex)
    if obj is None:
        return eye, np.ones(inst.n_outcomes, dtype=complex)
    if isinstance(obj, tuple) and len(obj) == 2:
        x, f = obj
        xm = eye if x is None else (
            x.entries if isinstance(x, HermitianOperator) else _as_square_matrix(x)
        )
        return np.asarray(xm, dtype=complex), inst._coerce_values(f)
    if isinstance(obj, HermitianOperator):
        return obj.entries.astype(complex), np.ones(inst.n_outcomes, dtype=complex)
    if isinstance(obj, np.ndarray) and obj.ndim == 2:
        return _as_square_matrix(obj), np.ones(inst.n_outcomes, dtype=complex)
    # anything else is a pointer-side element
    return eye, inst._coerce_values(obj)


def partial_trace(rho, dims: tuple[int, int], which: int):
    """Trace out factor ``which`` (1 or 2) of a state on ``H_1 (x) H_2``.

    ``dims = (d1, d2)`` must factorize the matrix dimension exactly.
    Returns a ``DensityMatrix`` when given one, else a plain matrix.
    """
    d1, d2 = int(dims[0]), int(dims[1])
    is_state = isinstance(rho, DensityMatrix)
    m = rho.entries if is_state else _as_square_matrix(rho)
    if d1 * d2 != m.shape[0]:
        raise ValueError(f"dims {dims} do not factorize dimension {m.shape[0]}")
    if which not in (1, 2):
        raise ValueError("which must be 1 or 2")
    t = m.reshape(d1, d2, d1, d2)
    out = np.einsum("kikj->ij", t) if which == 1 else np.einsum("ikjk->ij", t)
    return DensityMatrix(out) if is_state else out


@dataclass(frozen=True)
class ChoiReport:
    """Result of a complete-positivity check via the Choi matrix."""

    min_eigenvalue: float
    passed: bool
    dim_in: int
    dim_out: int
    hermiticity_error: float


def choi_matrix(apply_dual: Callable[[np.ndarray], np.ndarray], dim: int) -> np.ndarray:
    """Choi matrix ``(id (x) T*) |Omega><Omega|`` of a map on ``dim x dim``
    matrices, with ``|Omega>`` the normalized maximally entangled state."""
    blocks = []
    for i in range(dim):
        row = []
        for j in range(dim):
            e = np.zeros((dim, dim), dtype=complex)
            e[i, j] = 1.0
            row.append(np.asarray(apply_dual(e), dtype=complex))
        blocks.append(row)
    out_dim = blocks[0][0].shape[0]
    choi = np.zeros((dim * out_dim, dim * out_dim), dtype=complex)
    for i in range(dim):
        for j in range(dim):
            choi[i * out_dim : (i + 1) * out_dim, j * out_dim : (j + 1) * out_dim] = blocks[i][j]
    return choi / dim


def choi_check(channel, dim: int | None = None, atol: float = CHOI_ATOL) -> ChoiReport:
    """Check complete positivity of a channel (or raw ``rho -> rho'`` map).

    The map is CP iff its Choi matrix is positive semidefinite; ``passed``
    requires the minimum eigenvalue to be ``>= -atol``.
    """
    if isinstance(channel, Instrument):
        dual = channel.restriction().apply_dual
        d_in = channel.dim
    elif isinstance(channel, (KrausMap, IsometryChannel)):
        dual = channel.apply_dual
        d_in = channel.dim if isinstance(channel, KrausMap) else channel.dim_in
    elif callable(channel):
        if dim is None:
            raise ValueError("dim is required for a bare map")
        dual = channel
        d_in = int(dim)
    else:
        raise TypeError(f"unsupported channel type {type(channel).__name__}")

    choi = choi_matrix(dual, d_in)
    herm_err = float(np.abs(choi - choi.conj().T).max())
    sym = (choi + choi.conj().T) / 2.0
    min_eig = float(np.linalg.eigvalsh(sym)[0])
    d_out = choi.shape[0] // d_in
    passed = herm_err <= 1e-8 and min_eig >= -atol
    return ChoiReport(min_eig, passed, d_in, d_out, herm_err)
