"""Reference measurement models with known closed-form figures of merit.

* ``von_neumann_instrument``: projective qubit readout in the z basis.
  Zero infidelity, zero added variance, disturbance 1/2.
* ``sharpness_instrument``: a one-parameter unsharp z readout.  With
  error weight ``p`` it has infidelity ``p``, disturbance
  ``1/2 - sqrt(p(1-p))``, residual coherence ``sqrt(p(1-p))`` for an
  equal superposition, and off-diagonal damping ``2 sqrt(p(1-p))``.
  The family saturates every bound in :mod:`qchan.bounds`.
* ``beamsplitter_model``: two truncated oscillator modes coupled by the
  number-preserving rotation ``exp(theta (a^dag (x) a - a (x) a^dag))``;
  pointers ``x (x) 1 / cos(theta)`` and ``-1 (x) p / sin(theta)``
  jointly measure position and momentum with added variances
  ``tan^2(theta)/2`` and ``cot^2(theta)/2``.
* ``FluorescenceModel``: driven two-level decay.  Bloch vector obeys
  d/dt v = M v - c with M = [[-1/2,0,0],[0,-1/2,W],[0,-W,-1]] and
  c = (0,0,1), time in units of the inverse decay rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg

from qchan.channels import Instrument, IsometryChannel, PointerObservable
from qchan.operators import BlochVector, HermitianOperator


def von_neumann_instrument() -> Instrument:
    """Projective z-basis qubit readout with pointer readings +1 / -1."""
    p_up = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)
    p_down = np.array([[0.0, 0.0], [0.0, 1.0]], dtype=complex)
    return Instrument([(+1, +1.0), (-1, -1.0)], [[p_up], [p_down]])


def sharpness_instrument(p: float) -> Instrument:
    """Unsharp z readout: Kraus ``diag(sqrt(1-p), sqrt(p))`` for outcome +1
    and the mirrored pair for -1.  ``p`` in [0, 1/2) is the probability of
    reading the wrong sign on a z eigenstate."""
    if not 0.0 <= p < 0.5:
        raise ValueError(f"p must lie in [0, 1/2), got {p!r}")
    v_plus = np.diag([math.sqrt(1.0 - p), math.sqrt(p)]).astype(complex)
    v_minus = np.diag([math.sqrt(p), math.sqrt(1.0 - p)]).astype(complex)
    return Instrument([(+1, +1.0), (-1, -1.0)], [[v_plus], [v_minus]])


@dataclass(frozen=True)
class SharpnessFamily:
    """Closed-form metric values of the unsharp readout at error weight p."""

    p: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.p < 0.5:
            raise ValueError(f"p must lie in [0, 1/2), got {self.p!r}")

    def instrument(self) -> Instrument:
        return sharpness_instrument(self.p)

    def scaled_pointer(self) -> PointerObservable:
        """Pointer rescaled by 1/(1-2p) so the transfer is unbiased:
        T(B) equals the z observable exactly."""
        s = 1.0 / (1.0 - 2.0 * self.p)
        return PointerObservable((+1, -1), (s, -s))

    @property
    def infidelity(self) -> float:
        return self.p

    @property
    def disturbance(self) -> float:
        return 0.5 - math.sqrt(self.p * (1.0 - self.p))

    @property
    def coherence(self) -> float:
        """Residual coherence of an equal superposition of z eigenstates."""
        return math.sqrt(self.p * (1.0 - self.p))

    @property
    def damping_factor(self) -> float:
        """Factor multiplying off-diagonal matrix elements under R*."""
        return 2.0 * math.sqrt(self.p * (1.0 - self.p))

    @property
    def sigma(self) -> float:
        """Added standard deviation of the rescaled (unbiased) pointer."""
        return 2.0 * math.sqrt(self.p * (1.0 - self.p)) / (1.0 - 2.0 * self.p)

    @property
    def sigma2(self) -> float:
        return self.sigma ** 2


# -- beamsplitter ---------------------------------------------------------


def _annihilation(n: int) -> np.ndarray:
    a = np.zeros((n, n), dtype=complex)
    for i in range(1, n):
        a[i - 1, i] = math.sqrt(i)
    return a


def coherent_vector(alpha: complex, n: int) -> np.ndarray:
    """Truncated coherent state; accurate when |alpha|^2 << n."""
    out = np.zeros(n, dtype=complex)
    term = math.exp(-abs(alpha) ** 2 / 2.0)
    out[0] = term
    for k in range(1, n):
        term = term * alpha / math.sqrt(k)
        out[k] = term
    return out


class BeamsplitterModel:
    """Two oscillator modes rotated into each other, second mode read out.

    The system mode enters in an arbitrary state, the ancilla in vacuum.
    ``safe_dim`` bounds the subspace on which truncation is certified
    exact: the rotation preserves total excitation number, so matrix
    elements between basis states below ``safe_dim`` never touch the
    truncation edge at ``fock_dim``.
    """

    def __init__(self, theta: float, fock_dim: int, safe_dim: int | None = None) -> None:
        if not 0.0 < theta < math.pi / 2.0:
            raise ValueError(f"theta must lie in (0, pi/2), got {theta!r}")
        if fock_dim < 16:
            raise ValueError(f"fock_dim must be at least 16, got {fock_dim}")
        if safe_dim is None:
            safe_dim = fock_dim // 2
        if not 0 < safe_dim <= fock_dim - 2:
            raise ValueError(
                f"safe_dim must lie in [1, fock_dim - 2], got {safe_dim}"
            )
        self.theta = float(theta)
        self.fock_dim = int(fock_dim)
        self.safe_dim = int(safe_dim)

        n = self.fock_dim
        a = _annihilation(n)
        self.x = (a + a.conj().T) / math.sqrt(2.0)
        self.p = (a - a.conj().T) / (math.sqrt(2.0) * 1j)

        gen = self.theta * (np.kron(a.conj().T, a) - np.kron(a, a.conj().T))
        self.unitary = scipy.linalg.expm(gen)

        # V psi = U (psi (x) vacuum)
        e0 = np.zeros((n, 1), dtype=complex)
        e0[0, 0] = 1.0
        v = self.unitary @ np.kron(np.eye(n, dtype=complex), e0)
        self._channel = IsometryChannel(v)

        self.pointer_b = np.kron(self.x, np.eye(n)) / math.cos(self.theta)
        self.pointer_bt = -np.kron(np.eye(n), self.p) / math.sin(self.theta)

    @property
    def channel(self) -> IsometryChannel:
        return self._channel

    def _safe(self, m: np.ndarray) -> np.ndarray:
        return m[: self.safe_dim, : self.safe_dim]

    def transferred_b(self) -> np.ndarray:
        return self._channel.apply(self.pointer_b)

    def transferred_bt(self) -> np.ndarray:
        return self._channel.apply(self.pointer_bt)

    def unbiasedness_error(self) -> tuple[float, float]:
        """``||T(B) - x||`` and ``||T(B~) - p||`` on the safe subspace."""
        db = self._safe(self.transferred_b() - self.x)
        dbt = self._safe(self.transferred_bt() - self.p)
        eb = float(np.abs(np.linalg.eigvalsh((db + db.conj().T) / 2)).max())
        ebt = float(np.abs(np.linalg.eigvalsh((dbt + dbt.conj().T) / 2)).max())
        return eb, ebt

    def form_b(self) -> np.ndarray:
        from qchan.channels import sesquilinear_form

        return sesquilinear_form(self._channel, self.pointer_b, self.pointer_b)

    def form_bt(self) -> np.ndarray:
        from qchan.channels import sesquilinear_form

        return sesquilinear_form(self._channel, self.pointer_bt, self.pointer_bt)

    def sigma_b(self) -> float:
        block = self._safe(self.form_b())
        return math.sqrt(float(np.abs(np.linalg.eigvalsh((block + block.conj().T) / 2)).max()))

    def sigma_bt(self) -> float:
        block = self._safe(self.form_bt())
        return math.sqrt(float(np.abs(np.linalg.eigvalsh((block + block.conj().T) / 2)).max()))

    def commutator_half_norm(self) -> float:
        """``||[x, p]|| / 2`` on the safe subspace (equals 1/2 exactly there)."""
        comm = 1j * (self.x @ self.p - self.p @ self.x)
        block = self._safe(comm)
        return 0.5 * float(np.abs(np.linalg.eigvalsh(block)).max())

    def edge_error(self) -> float:
        """Deviation of diag (B, B) from tan^2(theta)/2 over the safe block;
        the monitor for creeping truncation error."""
        target = 0.5 * math.tan(self.theta) ** 2
        diag = np.diagonal(self._safe(self.form_b())).real
        return float(np.abs(diag - target).max())

    def coherent_image_error(self, alphas) -> float:
        """Max norm error of ``U (|alpha> (x) |0>)`` against the rotated
        coherent product state, over the given amplitudes."""
        n = self.fock_dim
        worst = 0.0
        for alpha in np.atleast_1d(alphas):
            alpha = complex(alpha)
            vec_in = np.kron(coherent_vector(alpha, n), coherent_vector(0.0, n))
            predicted = np.kron(
                coherent_vector(alpha * math.cos(self.theta), n),
                coherent_vector(-alpha * math.sin(self.theta), n),
            )
            err = float(np.linalg.norm(self.unitary @ vec_in - predicted))
            worst = max(worst, err)
        return worst


@lru_cache(maxsize=8)
def beamsplitter_model(
    theta: float, fock_dim: int, safe_dim: int | None = None
) -> BeamsplitterModel:
    """Cached constructor: the unitary is expensive at useful dimensions."""
    return BeamsplitterModel(theta, fock_dim, safe_dim)


# -- resonance fluorescence ------------------------------------------------


@dataclass(frozen=True)
class FluorescenceModel:
    """Driven two-level decay in Bloch coordinates: d/dt v = M v - c."""

    omega: float

    def __post_init__(self) -> None:
        if self.omega < 0.0:
            raise ValueError(f"drive strength must be nonnegative, got {self.omega!r}")

    def matrix(self) -> np.ndarray:
        w = self.omega
        return np.array(
            [[-0.5, 0.0, 0.0], [0.0, -0.5, w], [0.0, -w, -1.0]], dtype=float
        )

    def drive(self) -> np.ndarray:
        return np.array([0.0, 0.0, 1.0])

    def fixed_point(self) -> BlochVector:
        """Stationary Bloch vector ``(0, -2W/(1+2W^2), -1/(1+2W^2))``."""
        v = np.linalg.solve(self.matrix(), self.drive())
        return BlochVector(*map(float, v))


def fluorescence_model(omega: float) -> FluorescenceModel:
    return FluorescenceModel(float(omega))


def fluorescence_exact(model: FluorescenceModel, v0: BlochVector, t: float) -> BlochVector:
    """Closed-form solution ``e^{tM}(v0 - v_inf) + v_inf``."""
    if t < 0.0:
        raise ValueError(f"time must be nonnegative, got {t!r}")
    m = model.matrix()
    v_inf = np.linalg.solve(m, model.drive())
    v = scipy.linalg.expm(t * m) @ (v0.as_array() - v_inf) + v_inf
    return BlochVector(*map(float, v))


def fluorescence_trajectory(
    model: FluorescenceModel, v0: BlochVector, times
) -> np.ndarray:
    """Exact solution sampled at the given times, rows (x, y, z)."""
    return np.array(
        [fluorescence_exact(model, v0, float(t)).as_array() for t in np.atleast_1d(times)]
    )


def fluorescence_ode_solution(
    model: FluorescenceModel, v0: BlochVector, times
) -> np.ndarray:
    """Independent Runge-Kutta integration of the same equation of motion."""
    import scipy.integrate

    times = np.atleast_1d(np.asarray(times, dtype=float))
    m = model.matrix()
    c = model.drive()

    def rhs(_t, v):
        return m @ v - c

    sol = scipy.integrate.solve_ivp(
        rhs,
        (0.0, float(times.max()) if times.size else 0.0),
        v0.as_array(),
        t_eval=times,
        method="RK45",
        rtol=1e-12,
        atol=1e-13,
    )
    if not sol.success:
        raise RuntimeError(f"integration failed: {sol.message}")
    return sol.y.T


def fluorescence_rotating(model: FluorescenceModel, v0: BlochVector, t: float) -> np.ndarray:
    """Strong-drive limit: x damps at rate 1/2 while (y, z) spiral at the
    drive frequency inside an envelope damping at rate 3/4."""
    w = model.omega
    e1 = math.exp(-t / 2.0)
    e2 = math.exp(-3.0 * t / 4.0)
    c, s = math.cos(w * t), math.sin(w * t)
    r = np.array([[e1, 0.0, 0.0], [0.0, e2 * c, e2 * s], [0.0, -e2 * s, e2 * c]])
    return r @ v0.as_array()


def interaction_picture_contraction(t: float) -> np.ndarray:
    """Bloch contraction of the co-rotating frame: diag(e^{-t/2}, e^{-3t/4}, e^{-3t/4})."""
    return np.diag([math.exp(-t / 2.0), math.exp(-3.0 * t / 4.0), math.exp(-3.0 * t / 4.0)])


def fluorescence_disturbance(t: float) -> float:
    """Maximal disturbance after time t: ``(1 - e^{-3t/4}) / 2``."""
    if t < 0.0:
        raise ValueError(f"time must be nonnegative, got {t!r}")
    return 0.5 * (1.0 - math.exp(-0.75 * t))


def fluorescence_disturbance_from_contraction(t: float) -> float:
    """The same disturbance from the contraction matrix: half the largest
    singular value of ``1 - D(t)`` over the Bloch ball."""
    gap = np.eye(3) - interaction_picture_contraction(t)
    return 0.5 * float(np.linalg.svd(gap, compute_uv=False).max())


def fluorescence_delta_bound(t: float) -> float:
    """Lower bound on the infidelity of any readout completed by time t:
    ``1/2 - sqrt(1 - e^{-3t/2}) / 2``."""
    if t < 0.0:
        raise ValueError(f"time must be nonnegative, got {t!r}")
    return 0.5 - 0.5 * math.sqrt(1.0 - math.exp(-1.5 * t))
