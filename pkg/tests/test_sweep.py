"""Falsification sweep: coverage, determinism, manifest shape."""

import json

import pytest

from qchan.bounds import INEQUALITY_IDS
from qchan.sweep import SweepConfig, manifest_json, run_sweep, run_trial, violations


@pytest.fixture(scope="module")
def manifest():
    return run_sweep(SweepConfig(master_seed=11, trials=40))


class TestRunTrial:
    def test_five_reports_per_trial(self):
        reports, aux = run_trial(SweepConfig(master_seed=11, trials=1), 0)
        assert sorted(r.inequality_id for r in reports) == sorted(INEQUALITY_IDS)
        assert all(r.inputs["trial"] == 0 for r in reports)
        assert "form_positivity_min_eigenvalue" in aux
        assert "sharp_transfer_defect" in aux

    def test_trial_is_self_seeded(self):
        cfg = SweepConfig(master_seed=11, trials=10)
        a, _ = run_trial(cfg, 7)
        b, _ = run_trial(cfg, 7)
        assert [r.to_json_dict() for r in a] == [r.to_json_dict() for r in b]


class TestManifest:
    def test_no_violations(self, manifest):
        assert violations(manifest) == []

    def test_shape(self, manifest):
        assert manifest["master_seed"] == 11
        assert manifest["trials"] == 40
        assert manifest["dims"] == [2]
        assert len(manifest["results"]) == 5 * 40
        aux = manifest["aux"]
        assert aux["form_positivity_min_eigenvalue"] >= -1e-8
        assert aux["sharp_transfer_max_defect"] <= 1e-8
        assert aux["enumeration_cap_errors"] == 0

    def test_every_check_has_nontrivial_instances(self, manifest):
        nontrivial = {name: 0 for name in INEQUALITY_IDS}
        for r in manifest["results"]:
            if "note" not in r["inputs"]:
                nontrivial[r["id"]] += 1
        assert all(count > 0 for count in nontrivial.values()), nontrivial

    def test_byte_identical_rerun(self, manifest):
        again = run_sweep(SweepConfig(master_seed=11, trials=40))
        assert manifest_json(manifest) == manifest_json(again)

    def test_thread_count_does_not_change_bytes(self, manifest):
        threaded = run_sweep(SweepConfig(master_seed=11, trials=40), threads=4)
        assert manifest_json(manifest) == manifest_json(threaded)

    def test_json_round_trip(self, manifest):
        assert json.loads(manifest_json(manifest)) == manifest

    def test_different_seed_different_bytes(self, manifest):
        other = run_sweep(SweepConfig(master_seed=12, trials=40))
        assert manifest_json(manifest) != manifest_json(other)


class TestConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            SweepConfig(trials=0)
        with pytest.raises(ValueError):
            SweepConfig(dim=1)
        with pytest.raises(ValueError):
            SweepConfig(dim=3, max_outcomes=2)

    def test_env_thread_cap(self, monkeypatch):
        from qchan.sweep import _thread_count

        monkeypatch.setenv("QCHAN_THREADS", "3")
        assert _thread_count(None) == 3
        monkeypatch.setenv("QCHAN_THREADS", "junk")
        assert _thread_count(None) == 1
        monkeypatch.delenv("QCHAN_THREADS")
        assert _thread_count(None) == 1
        assert _thread_count(6) == 6
