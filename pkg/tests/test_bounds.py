"""Trade-off inequalities: orientations, boundaries, and slack handling."""

import math

import numpy as np
import pytest

from qchan.bounds import (
    BoundReport,
    collapse_general_bound,
    collapse_general_check,
    collapse_unbiased_bound,
    collapse_unbiased_check,
    heisenberg_general_check,
    heisenberg_unbiased_check,
    joint_measurement_check,
)
from qchan.metrics import DisturbanceConfig, delta_disturbance, delta_infidelity, sigma2
from qchan.models import SharpnessFamily
from qchan.operators import PAULI_X, PAULI_Z, HermitianOperator


class TestBoundReport:
    def test_json_shape(self):
        report = joint_measurement_check(1.0, 1.0, PAULI_X, PAULI_Z)
        data = report.to_json_dict()
        assert set(data) == {"id", "lhs", "rhs", "slack", "pass", "estimated", "inputs"}
        assert data["id"] == "JM"

    def test_unknown_id_rejected(self):
        with pytest.raises(ValueError, match="unknown inequality"):
            BoundReport("XX", 0.0, 0.0, 0.0, True)


class TestJointMeasurement:
    def test_commuting_targets_need_nothing(self):
        report = joint_measurement_check(0.0, 0.0, PAULI_Z, np.diag([2.0, 3.0]))
        assert report.rhs == pytest.approx(0.0, abs=1e-14)
        assert report.passed

    def test_pauli_pair(self):
        # || [sigma_x, sigma_z] || = 2, so the product must reach 1
        report = joint_measurement_check(1.0, 1.0, PAULI_X, PAULI_Z)
        assert report.rhs == pytest.approx(1.0, abs=1e-12)
        assert report.passed
        report = joint_measurement_check(0.7, 1.0, PAULI_X, PAULI_Z)
        assert not report.passed

    def test_boundary_slack(self):
        report = joint_measurement_check(1.0 - 1e-10, 1.0, PAULI_X, PAULI_Z)
        assert report.passed
        report = joint_measurement_check(1.0 - 1e-6, 1.0, PAULI_X, PAULI_Z)
        assert not report.passed


class TestHeisenbergUnbiased:
    def test_sharpness_equality_across_grid(self):
        for p in np.arange(0.05, 0.46, 0.05):
            fam = SharpnessFamily(float(p))
            report = heisenberg_unbiased_check(fam.sigma, fam.disturbance, 1.0)
            assert report.passed
            assert report.lhs == pytest.approx(report.rhs, abs=1e-9)

    def test_vacuous_above_half(self):
        report = heisenberg_unbiased_check(0.0, 0.5, 1.0)
        assert report.passed
        assert report.rhs == 0.0

    def test_zero_disturbance_demands_unbounded_sigma(self):
        report = heisenberg_unbiased_check(100.0, 0.0, 1.0)
        assert not report.passed
        assert math.isinf(report.rhs)
        assert "unbounded" in report.inputs["note"]

    def test_zero_disturbance_of_scalar_target_is_fine(self):
        report = heisenberg_unbiased_check(0.0, 0.0, 0.0)
        assert report.passed

    def test_estimate_shifts_toward_leniency(self):
        # an underestimated Delta must not fabricate a violation: the
        # eps_opt shift lowers the requirement
        est = delta_disturbance(SharpnessFamily(0.2).instrument())
        exact = SharpnessFamily(0.2).disturbance
        strict = heisenberg_unbiased_check(SharpnessFamily(0.2).sigma, exact, 1.0)
        shifted = heisenberg_unbiased_check(SharpnessFamily(0.2).sigma, est, 1.0)
        assert shifted.rhs <= strict.rhs + 1e-12
        assert shifted.passed


class TestHeisenbergGeneral:
    def test_circle_boundary_passes(self):
        for delta in np.linspace(0.0, 0.5, 21):
            dd = 0.5 - math.sqrt(0.25 - (0.5 - delta) ** 2)
            report = heisenberg_general_check(float(delta), dd)
            assert report.passed
            assert report.lhs == pytest.approx(0.25, abs=1e-12)

    def test_outside_circle_fails(self):
        # radial excursion of 1e-6 beyond the quarter circle
        delta = 0.2
        dd = 0.5 - math.sqrt(0.25 - (0.5 - delta) ** 2)
        report = heisenberg_general_check(delta - 1e-6, dd - 1e-6)
        assert not report.passed

    def test_inside_circle_passes(self):
        report = heisenberg_general_check(0.4, 0.4)
        assert report.passed

    def test_out_of_hypothesis_flagged(self):
        report = heisenberg_general_check(0.7, 0.1)
        assert report.passed
        assert "outside hypothesis" in report.inputs["note"]

    def test_negative_rejected(self):
        with pytest.raises(ValueError, match="nonnegative"):
            heisenberg_general_check(-0.1, 0.1)

    def test_perfect_measurement_with_perfect_preservation_impossible(self):
        report = heisenberg_general_check(0.0, 0.0)
        assert not report.passed


class TestCollapseUnbiasedBound:
    def test_half_ratio(self):
        assert collapse_unbiased_bound(1.0, 2.0) == pytest.approx(
            0.5 / math.sqrt(2.0), abs=1e-12
        )

    def test_zero_sigma(self):
        assert collapse_unbiased_bound(0.0, 1.0) == 0.0

    def test_monotone_in_sigma(self):
        vals = [collapse_unbiased_bound(s, 1.0) for s in np.linspace(0.01, 5.0, 50)]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_monotone_in_gap(self):
        vals = [collapse_unbiased_bound(1.0, g) for g in np.linspace(0.1, 5.0, 50)]
        assert all(b < a for a, b in zip(vals, vals[1:]))

    def test_stays_below_half(self):
        assert collapse_unbiased_bound(1e6, 1.0) < 0.5

    def test_gap_must_be_positive(self):
        with pytest.raises(ValueError, match="gap"):
            collapse_unbiased_bound(1.0, 0.0)

    def test_sigma_must_be_nonnegative(self):
        with pytest.raises(ValueError, match="sigma"):
            collapse_unbiased_bound(-1.0, 1.0)


class TestCollapseGeneralBound:
    def test_known_point(self):
        assert round(collapse_general_bound(0.13), 3) == 0.336

    def test_endpoints(self):
        assert collapse_general_bound(0.0) == 0.0
        assert collapse_general_bound(0.5) == 0.5

    def test_range_check(self):
        with pytest.raises(ValueError, match="delta"):
            collapse_general_bound(0.6)
        with pytest.raises(ValueError, match="delta"):
            collapse_general_bound(-0.01)

    def test_consistency_with_unbiased_bound(self):
        # the worst nondestructive case sigma = sqrt(d(1-d)), gap = 1-2d
        # fed through the unbiased ceiling returns sqrt(d(1-d)) exactly
        for delta in np.linspace(0.01, 0.49, 25):
            direct = collapse_general_bound(float(delta))
            chained = collapse_unbiased_bound(direct, 1.0 - 2.0 * float(delta))
            assert chained == pytest.approx(direct, abs=1e-12)


class TestCollapseChecks:
    def test_unbiased_check_orientation(self):
        good = collapse_unbiased_check(0.1, 1.0, 2.0)
        assert good.passed
        bad = collapse_unbiased_check(0.49, 1.0, 2.0)
        assert not bad.passed

    def test_general_check_orientation(self):
        # ceiling at delta = 0.13 is about 0.336
        assert collapse_general_check(0.34, 0.13).passed is False
        assert collapse_general_check(0.33, 0.13).passed is True

    def test_general_check_out_of_hypothesis(self):
        report = collapse_general_check(0.4, 0.9)
        assert report.passed
        assert "outside hypothesis" in report.inputs["note"]


class TestSharpnessSaturatesEverything:
    def test_all_bounds_tight_at_p_quarter(self):
        fam = SharpnessFamily(0.25)
        inst = fam.instrument()
        delta = delta_infidelity(inst, HermitianOperator(PAULI_Z))
        est = delta_disturbance(inst, DisturbanceConfig(seed=2))
        sigma = math.sqrt(sigma2(inst, fam.scaled_pointer()))

        # the eps_opt shift moves rhs by roughly 1.6e-5 here
        hp_u = heisenberg_unbiased_check(sigma, est, 1.0)
        assert hp_u.passed
        assert hp_u.lhs == pytest.approx(hp_u.rhs, abs=1e-4)

        hp_g = heisenberg_general_check(delta, est)
        assert hp_g.passed
        assert hp_g.lhs == pytest.approx(0.25, abs=1e-5)

        ceiling = collapse_general_bound(delta)
        assert ceiling == pytest.approx(fam.coherence, abs=1e-12)
