"""Randomized falsification sweep over the five trade-off checks.

Every trial draws fresh instruments from its own counter-based stream,
so results are independent of execution order and thread count.  The
manifest returned by :func:`run_sweep` serializes byte-identically for
a fixed configuration.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .bounds import (
    DEFAULT_SLACK,
    BoundReport,
    collapse_general_check,
    collapse_unbiased_check,
    heisenberg_general_check,
    heisenberg_unbiased_check,
    joint_measurement_check,
)
from .channels import Instrument, PointerObservable, sesquilinear_form
from .metrics import (
    CoherencePair,
    distance_to_center,
    DisturbanceConfig,
    EnumerationCapError,
    delta_disturbance,
    delta_infidelity,
    residual_coherence,
    sigma2,
)
from .operators import HermitianOperator, op_norm
from .randgen import (
    distinct_values_from,
    random_aligned_instrument_from,
    random_hermitian_from,
    random_instrument_from,
    random_projective_instrument_from,
    rng_for,
)

GAP_FLOOR = 1e-9


@dataclass(frozen=True)
class SweepConfig:
    master_seed: int = 0
    trials: int = 100
    dim: int = 2
    max_outcomes: int = 4
    max_kraus: int = 2
    slack: float = DEFAULT_SLACK

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError("trials must be positive")
        if self.dim < 2:
            raise ValueError("dim must be at least 2")
        if self.max_outcomes < 2 or self.max_kraus < 1:
            raise ValueError("need at least 2 outcomes and 1 Kraus operator")
        if self.max_outcomes < self.dim:
            raise ValueError("max_outcomes must cover every eigenvalue")


def _amplitude_draws(rng: np.random.Generator, extra: int = 2):
    """Balanced amplitudes first, then a few random points on the sphere."""
    draws = [(2.0 ** -0.5, 2.0 ** -0.5)]
    for _ in range(extra):
        v = rng.standard_normal(4)
        a = complex(v[0], v[1])
        b = complex(v[2], v[3])
        norm = math.sqrt(abs(a) ** 2 + abs(b) ** 2)
        draws.append((a / norm, b / norm))
    return draws


def _max_coherence(inst: Instrument, a: HermitianOperator, rng) -> float | None:
    """Worst surviving off-diagonal weight between the extreme
    eigenvectors of ``a``, over a few superposition amplitudes.
    Returns None when the spectrum is too flat to define a pair."""
    w = a.eigenvalues()
    if w[-1] - w[0] < GAP_FLOOR:
        return None
    worst = 0.0
    for alpha, beta in _amplitude_draws(rng):
        pair = CoherencePair.from_extremes(a, alpha, beta)
        worst = max(worst, residual_coherence(inst, pair))
    return worst


def _form_positivity_floor(inst: Instrument, rng) -> float:
    """Minimum eigenvalue of the defect form over random mixed elements,
    including a random linear combination (the form is sesquilinear, so
    the combination expands through pairwise forms)."""
    n = inst.n_outcomes
    elems = []
    for _ in range(2):
        x = random_hermitian_from(rng, inst.dim).entries
        f = rng.standard_normal(n)
        elems.append((x, PointerObservable(inst.labels, tuple(float(v) for v in f))))
    pairwise = [[sesquilinear_form(inst, ei, ej) for ej in elems] for ei in elems]
    c = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    combo = sum(
        np.conj(c[i]) * c[j] * pairwise[i][j] for i in range(2) for j in range(2)
    )
    low = min(
        float(np.linalg.eigvalsh(0.5 * (m + m.conj().T)).min())
        for m in (pairwise[0][0], pairwise[1][1], combo)
    )
    return low


def _sharp_transfer_defect(rng, dim: int) -> float:
    """Sharp instruments must transfer powers multiplicatively and land
    in the commutant of the transferred observable."""
    proj, _ = random_projective_instrument_from(rng, dim)
    g = proj.pointer()
    t1 = proj.heisenberg(f=g)
    t2 = proj.heisenberg(f=g.apply(lambda v: v * v))
    t3 = proj.heisenberg(f=g.apply(lambda v: v * v * v))
    defect = max(op_norm(t2 - t1 @ t1), op_norm(t3 - t1 @ t1 @ t1))
    x = random_hermitian_from(rng, dim).entries
    f = PointerObservable(proj.labels, tuple(float(v) for v in rng.standard_normal(dim)))
    moved = proj.heisenberg(x, f)
    defect = max(defect, op_norm(moved @ t1 - t1 @ moved))
    return defect


def run_trial(cfg: SweepConfig, index: int):
    """One falsification attempt: five reports plus diagnostic extrema."""
    rng = rng_for(cfg.master_seed, index)
    n_out = int(rng.integers(2, cfg.max_outcomes + 1))
    n_kraus = int(rng.integers(1, cfg.max_kraus + 1))
    inst = random_instrument_from(rng, cfg.dim, n_out, n_kraus)

    g = inst.pointer()
    gt = PointerObservable(inst.labels, distinct_values_from(rng, n_out))
    sigma_b = math.sqrt(max(sigma2(inst, g), 0.0))
    sigma_bt = math.sqrt(max(sigma2(inst, gt), 0.0))
    a_t = HermitianOperator(inst.heisenberg(f=g))
    at_t = HermitianOperator(inst.heisenberg(f=gt))

    reports = []
    base = {"trial": index}
    reports.append(
        joint_measurement_check(
            sigma_b, sigma_bt, a_t.entries, at_t.entries, cfg.slack, dict(base)
        )
    )

    coh = _max_coherence(inst, a_t, rng)
    if coh is None:
        reports.append(
            BoundReport(
                "COLLAPSE_unbiased", 0.0, 0.0, cfg.slack, True,
                dict(base, note="transferred spectrum too flat for a pair"),
            )
        )
    else:
        gap = float(a_t.eigenvalues()[-1] - a_t.eigenvalues()[0])
        reports.append(
            collapse_unbiased_check(coh, sigma_b, gap, cfg.slack, dict(base))
        )

    # the unbiased-noise check needs a gentle instrument: the Gaussian
    # draw above destroys every state (disturbance at or above 1/2), so
    # run it on the aligned nondestructive draw instead
    nd_out = int(rng.integers(cfg.dim, cfg.max_outcomes + 1))
    nd_kraus = int(rng.integers(1, cfg.max_kraus + 1))
    nd, a_nd = random_aligned_instrument_from(rng, cfg.dim, nd_out, nd_kraus)
    delta = delta_infidelity(nd, a_nd)
    est_nd = delta_disturbance(nd, DisturbanceConfig(seed=index))

    g_nd = nd.pointer()
    a_nd_t = HermitianOperator(nd.heisenberg(f=g_nd))
    sigma_nd = math.sqrt(max(sigma2(nd, g_nd), 0.0))
    reports.append(
        heisenberg_unbiased_check(
            sigma_nd, est_nd, distance_to_center(a_nd_t), cfg.slack, dict(base)
        )
    )

    reports.append(
        heisenberg_general_check(delta, est_nd, cfg.slack, dict(base))
    )

    coh_nd = _max_coherence(nd, a_nd, rng)
    assert coh_nd is not None  # eigenvalues are drawn with a minimum gap
    reports.append(
        collapse_general_check(coh_nd, delta, cfg.slack, dict(base))
    )

    aux = {
        "form_positivity_min_eigenvalue": _form_positivity_floor(inst, rng),
        "sharp_transfer_defect": _sharp_transfer_defect(rng, cfg.dim),
    }
    return reports, aux


def _thread_count(threads: int | None) -> int:
    if threads is not None:
        return max(1, threads)
    env = os.environ.get("QCHAN_THREADS", "")
    if env.strip():
        try:
            return max(1, int(env))
        except ValueError:
            return 1
    return 1


def run_sweep(cfg: SweepConfig, threads: int | None = None) -> dict:
    """Run all trials and assemble the manifest dictionary.

    The manifest is pure data: seed, trial count, dimensions, one report
    per check per trial (flattened in trial order), and sweep-level
    extrema under ``aux``.
    """
    workers = _thread_count(threads)

    def attempt(i: int):
        # a too-rich merged value set is reported, not fatal
        try:
            return run_trial(cfg, i)
        except EnumerationCapError:
            return None

    indices = range(cfg.trials)
    if workers == 1:
        outcomes = [attempt(i) for i in indices]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(attempt, indices))

    results = []
    positivity_floor = math.inf
    transfer_defect = 0.0
    cap_errors = 0
    trivial: dict[str, int] = {}
    for outcome in outcomes:
        if outcome is None:
            cap_errors += 1
            continue
        reports, aux = outcome
        for r in reports:
            results.append(r.to_json_dict())
            if "note" in r.inputs:
                trivial[r.inequality_id] = trivial.get(r.inequality_id, 0) + 1
        positivity_floor = min(positivity_floor, aux["form_positivity_min_eigenvalue"])
        transfer_defect = max(transfer_defect, aux["sharp_transfer_defect"])

    return {
        "master_seed": cfg.master_seed,
        "trials": cfg.trials,
        "dims": [cfg.dim],
        "results": results,
        "aux": {
            "form_positivity_min_eigenvalue": None if math.isinf(positivity_floor) else positivity_floor,
            "sharp_transfer_max_defect": transfer_defect,
            "enumeration_cap_errors": cap_errors,
            "trivial_passes": dict(sorted(trivial.items())),
        },
    }


def violations(manifest: dict) -> list[dict]:
    return [r for r in manifest["results"] if not r["pass"]]


def manifest_json(manifest: dict) -> str:
    return json.dumps(manifest, sort_keys=True, separators=(",", ":"))
