"""Sharp trade-off bounds between the figures of merit.

Five inequalities, each packaged as a check that evaluates both sides
and reports pass/fail with an explicit numerical slack:

* ``JM``: joint measurement.  Two commuting pointers measuring A and
  A~ satisfy ``Sigma_B Sigma_B~ >= ||[A, A~]|| / 2``.
* ``HP_unbiased``: for an unbiased measurement,
  ``Sigma >= d(A, Z) (1/2 - Delta) / sqrt(Delta (1 - Delta))``.
* ``HP_general``: for infidelity and disturbance both in [0, 1/2],
  ``(1/2 - delta)^2 + (1/2 - Delta)^2 <= 1/4``.
* ``COLLAPSE_unbiased``: residual coherence of an eigenvector pair with
  gap ``|x - y|`` is at most ``r / sqrt(1 + 4 r^2)``, ``r = Sigma/|x-y|``.
* ``COLLAPSE_general``: for a nondestructive measurement with
  infidelity delta <= 1/2, residual coherence <= sqrt(delta (1 - delta)).

Disturbance values enter as lower-bound estimates; every check shifts
Delta by the optimizer resolution ``eps_opt`` in the direction that can
only mask a violation, never fabricate one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from qchan.metrics import DisturbanceEstimate
from qchan.operators import HermitianOperator, op_norm

DEFAULT_SLACK = 1e-9

INEQUALITY_IDS = (
    "JM",
    "HP_unbiased",
    "HP_general",
    "COLLAPSE_unbiased",
    "COLLAPSE_general",
)


@dataclass(frozen=True)
class BoundReport:
    """Outcome of evaluating one inequality on concrete numbers.

    ``lhs`` and ``rhs`` are oriented so the inequality asserts
    ``lhs >= rhs`` for the two lower bounds (JM, HP_unbiased) and
    ``lhs <= rhs`` for the three upper bounds; ``passed`` already
    accounts for the orientation and the recorded ``slack``.
    ``estimated`` marks results that depend on a dim > 2 disturbance
    search, where the witness optimum is not certified.
    """

    inequality_id: str
    lhs: float
    rhs: float
    slack: float
    passed: bool
    inputs: Mapping[str, object] = field(default_factory=dict)
    estimated: bool = False

    def __post_init__(self) -> None:
        if self.inequality_id not in INEQUALITY_IDS:
            raise ValueError(f"unknown inequality id {self.inequality_id!r}")

    def to_json_dict(self) -> dict:
        return {
            "id": self.inequality_id,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "pass": self.passed,
            "estimated": self.estimated,
            "inputs": dict(self.inputs),
        }


def _delta_value(disturbance) -> tuple[float, float, bool]:
    """Unpack a disturbance given as estimate or plain float.

    Returns (value, eps_opt shift, estimated flag).  Plain floats are
    taken at face value with no shift.
    """
    if isinstance(disturbance, DisturbanceEstimate):
        return disturbance.value, disturbance.eps_opt, disturbance.estimated
    return float(disturbance), 0.0, False


def joint_measurement_check(
    sigma_b: float,
    sigma_bt: float,
    a: HermitianOperator | np.ndarray,
    at: HermitianOperator | np.ndarray,
    slack: float = DEFAULT_SLACK,
    inputs: Mapping[str, object] | None = None,
) -> BoundReport:
    """``Sigma_B Sigma_B~ >= ||[A, A~]|| / 2`` for jointly measured A, A~."""
    am = a.entries if isinstance(a, HermitianOperator) else np.asarray(a, dtype=complex)
    atm = at.entries if isinstance(at, HermitianOperator) else np.asarray(at, dtype=complex)
    comm = am @ atm - atm @ am
    # i[A, A~] is Hermitian, so the operator norm comes from eigenvalues
    rhs = 0.5 * op_norm(1j * comm)
    lhs = float(sigma_b) * float(sigma_bt)
    rec = dict(inputs or {})
    rec.update({"sigma_b": float(sigma_b), "sigma_bt": float(sigma_bt), "comm_norm": 2 * rhs})
    return BoundReport("JM", lhs, rhs, slack, lhs + slack >= rhs, rec)


def heisenberg_unbiased_check(
    sigma: float,
    disturbance: DisturbanceEstimate | float,
    d_center: float,
    slack: float = DEFAULT_SLACK,
    inputs: Mapping[str, object] | None = None,
) -> BoundReport:
    """``Sigma >= d(A, Z) (1/2 - Delta) / sqrt(Delta (1 - Delta))``.

    Delta >= 1/2 passes trivially (the right side is 0 there).  A zero
    Delta with d(A, Z) > 0 demands an unbounded Sigma and therefore
    fails for any finite input, flagged in ``inputs``.
    """
    delta, eps, estimated = _delta_value(disturbance)
    rec = dict(inputs or {})
    rec.update({"delta_disturbance": delta, "d_center": float(d_center), "eps_opt": eps})
    lhs = float(sigma)
    if delta >= 0.5 - 1e-12:
        rec["note"] = "Delta >= 1/2: bound is vacuous"
        return BoundReport("HP_unbiased", lhs, 0.0, slack, True, rec, estimated)
    if delta <= 1e-12:
        if d_center > 1e-9:
            rec["note"] = "Delta = 0 with non-scalar target requires unbounded Sigma"
            return BoundReport("HP_unbiased", lhs, math.inf, slack, False, rec, estimated)
        return BoundReport("HP_unbiased", lhs, 0.0, slack, True, rec, estimated)
    deff = min(delta + eps, 0.5)
    rec["delta_effective"] = deff
    rhs = float(d_center) * (0.5 - deff) / math.sqrt(deff * (1.0 - deff))
    return BoundReport("HP_unbiased", lhs, rhs, slack, lhs + slack >= rhs, rec, estimated)


def heisenberg_general_check(
    delta: float,
    disturbance: DisturbanceEstimate | float,
    slack: float = DEFAULT_SLACK,
    inputs: Mapping[str, object] | None = None,
) -> BoundReport:
    """``(1/2 - delta)^2 + (1/2 - Delta)^2 <= 1/4`` on [0, 1/2]^2.

    Values above 1/2 lie outside the hypothesis and pass trivially,
    with a note recorded in ``inputs``.
    """
    dd, eps, estimated = _delta_value(disturbance)
    delta = float(delta)
    rec = dict(inputs or {})
    rec.update({"delta_infidelity": delta, "delta_disturbance": dd, "eps_opt": eps})
    if delta < -1e-12 or dd < -1e-12:
        raise ValueError("delta and Delta must be nonnegative")
    if delta > 0.5 or dd > 0.5:
        rec["note"] = "outside hypothesis: both arguments must lie in [0, 1/2]"
        return BoundReport("HP_general", 0.0, 0.25, slack, True, rec, estimated)
    deff = min(dd + eps, 0.5)
    rec["delta_effective"] = deff
    lhs = (0.5 - delta) ** 2 + (0.5 - deff) ** 2
    return BoundReport("HP_general", lhs, 0.25, slack, lhs <= 0.25 + slack, rec, estimated)


def collapse_unbiased_bound(sigma: float, gap: float) -> float:
    """Coherence ceiling ``r / sqrt(1 + 4 r^2)`` with ``r = sigma / gap``.

    Strictly increasing in ``sigma``, strictly decreasing in ``gap``,
    and always below 1/2.
    """
    if gap <= 0.0:
        raise ValueError(f"eigenvalue gap must be positive, got {gap!r}")
    if sigma < 0.0:
        raise ValueError(f"sigma must be nonnegative, got {sigma!r}")
    r = float(sigma) / float(gap)
    return r / math.sqrt(1.0 + 4.0 * r * r)


def collapse_general_bound(delta: float) -> float:
    """Coherence ceiling ``sqrt(delta (1 - delta))`` for delta in [0, 1/2].

    Consistent with the unbiased ceiling:  feeding it the worst-case
    ``sigma = sqrt(delta (1 - delta))`` and ``gap = 1 - 2 delta`` lands
    exactly back on ``sqrt(delta (1 - delta))``.
    """
    delta = float(delta)
    if not 0.0 <= delta <= 0.5:
        raise ValueError(f"delta must lie in [0, 1/2], got {delta!r}")
    return math.sqrt(delta * (1.0 - delta))


def collapse_unbiased_check(
    coherence: float,
    sigma: float,
    gap: float,
    slack: float = DEFAULT_SLACK,
    inputs: Mapping[str, object] | None = None,
) -> BoundReport:
    """Residual coherence against the added-variance ceiling."""
    rhs = collapse_unbiased_bound(sigma, gap)
    rec = dict(inputs or {})
    rec.update({"sigma": float(sigma), "gap": float(gap)})
    lhs = float(coherence)
    return BoundReport("COLLAPSE_unbiased", lhs, rhs, slack, lhs <= rhs + slack, rec)


def collapse_general_check(
    coherence: float,
    delta: float,
    slack: float = DEFAULT_SLACK,
    inputs: Mapping[str, object] | None = None,
) -> BoundReport:
    """Residual coherence against the infidelity ceiling (nondestructive
    measurements).  ``delta > 1/2`` is outside the hypothesis and passes
    trivially with a note."""
    rec = dict(inputs or {})
    rec["delta_infidelity"] = float(delta)
    lhs = float(coherence)
    if delta > 0.5:
        rec["note"] = "outside hypothesis: delta must lie in [0, 1/2]"
        return BoundReport("COLLAPSE_general", lhs, 0.5, slack, True, rec)
    rhs = collapse_general_bound(delta)
    return BoundReport("COLLAPSE_general", lhs, rhs, slack, lhs <= rhs + slack, rec)
