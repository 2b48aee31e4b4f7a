"""CLI contract: exit codes, file outputs, wire formats."""

import json
import math
import subprocess
import sys

import pytest

from qchan.cli import main

FIXTURE = "src/qchan/fixtures/non_cp_transpose.json"


def run(argv):
    try:
        return main(argv)
    except SystemExit as exc:  # argparse usage failures
        return exc.code


class TestVerify:
    def test_small_sweep_passes(self, capsys, tmp_path):
        report = tmp_path / "manifest.json"
        code = run(["verify", "--trials", "4", "--seed", "3",
                    "--report", str(report)])
        assert code == 0
        out = capsys.readouterr().out
        assert "JM: 4/4 pass" in out
        assert "violations: 0" in out
        manifest = json.loads(report.read_text())
        assert manifest["master_seed"] == 3
        assert len(manifest["results"]) == 20

    def test_report_deterministic_bytes(self, tmp_path):
        a = tmp_path / "a.json"
        b = tmp_path / "b.json"
        assert run(["verify", "--trials", "3", "--seed", "5", "--report", str(a)]) == 0
        assert run(["verify", "--trials", "3", "--seed", "5", "--report", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_csv_report(self, tmp_path):
        report = tmp_path / "manifest.csv"
        code = run(["verify", "--trials", "2", "--report", str(report),
                    "--format", "csv"])
        assert code == 0
        lines = report.read_text().splitlines()
        assert lines[0] == "id,trial,lhs,rhs,slack,pass,estimated,note"
        assert len(lines) == 1 + 10

    def test_zero_trials_is_usage_error(self):
        assert run(["verify", "--trials", "0"]) == 64

    def test_noncp_fixture_exits_2(self, capsys):
        code = run(["verify", "--trials", "1", "--fixture", FIXTURE])
        assert code == 2
        out = capsys.readouterr()
        assert "min eigenvalue -0.5" in out.out
        assert "FAIL" in out.out

    def test_missing_fixture_exits_2(self):
        assert run(["verify", "--trials", "1", "--fixture", "no/such.json"]) == 2

    def test_instrument_fixture_accepted(self, tmp_path, capsys):
        from qchan.models import sharpness_instrument

        path = tmp_path / "inst.json"
        path.write_text(sharpness_instrument(0.2).to_json())
        code = run(["verify", "--trials", "2", "--fixture", str(path)])
        assert code == 0
        assert "ok" in capsys.readouterr().out

    def test_report_io_failure_exits_2(self):
        code = run(["verify", "--trials", "1", "--report", "/no/dir/r.json"])
        assert code == 2


class TestFigure:
    @pytest.mark.parametrize("fid", [2, 3, 4, 5, 6])
    def test_emits_header_and_monotone_x(self, fid, tmp_path):
        out = tmp_path / f"f{fid}.csv"
        assert run(["figure", str(fid), "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == f"# qchan-figure: {fid}"
        assert lines[1].startswith("# x-axis: ")
        assert lines[2].startswith("# y-axis: ")
        assert lines[3] in ("# forbidden: below", "# forbidden: above")
        xs = [float(l.split(",")[0]) for l in lines[5:]]
        assert all(b > a for a, b in zip(xs, xs[1:]))

    def test_unknown_id_is_usage_error(self):
        assert run(["figure", "7"]) == 64

    def test_too_few_points_is_usage_error(self):
        assert run(["figure", "3", "--points", "8"]) == 64

    def test_figure3_sharpness_points_on_curve(self, tmp_path):
        out = tmp_path / "f3.csv"
        assert run(["figure", "3", "--out", str(out)]) == 0
        found = 0
        for line in out.read_text().splitlines()[5:]:
            x, bound, model = line.split(",")
            if model:
                found += 1
                assert abs(float(model) - float(bound)) <= 1e-6
        assert found == 9

    def test_figure4_matches_closed_form(self, tmp_path):
        out = tmp_path / "f4.csv"
        assert run(["figure", "4", "--out", str(out)]) == 0
        for line in out.read_text().splitlines()[5:]:
            t, floor = (float(v) for v in line.split(","))
            expected = 0.5 - 0.5 * math.sqrt(1.0 - math.exp(-1.5 * t))
            assert abs(floor - expected) <= 1e-12

    def test_figure5_zero_ratio_zero_bound(self, tmp_path):
        out = tmp_path / "f5.csv"
        assert run(["figure", "5", "--out", str(out)]) == 0
        first = out.read_text().splitlines()[5]
        assert first == "0,0"

    def test_write_failure_exits_2(self):
        assert run(["figure", "3", "--out", "/no/dir/f.csv"]) == 2


class TestModel:
    def test_sharpness_table(self, capsys):
        assert run(["model", "sharpness", "--p", "0.13"]) == 0
        out = capsys.readouterr().out
        values = dict(line.split(" = ") for line in out.strip().splitlines())
        assert float(values["delta"]) == pytest.approx(0.13, abs=1e-12)
        assert round(float(values["collapse_bound"]), 3) == 0.336
        assert abs(float(values["circle_residual"])) <= 1e-6
        assert abs(float(values["collapse_residual"])) <= 1e-6

    def test_sharpness_requires_p(self):
        assert run(["model", "sharpness"]) == 64

    def test_sharpness_bad_p(self):
        assert run(["model", "sharpness", "--p", "0.6"]) == 64

    def test_unknown_model_is_usage_error(self):
        assert run(["model", "stern-gerlach"]) == 64

    def test_von_neumann_table(self, capsys):
        assert run(["model", "von-neumann"]) == 0
        values = dict(
            line.split(" = ") for line in capsys.readouterr().out.strip().splitlines()
        )
        assert float(values["delta"]) == 0.0
        assert float(values["Delta"]) == pytest.approx(0.5, abs=1e-6)
        assert float(values["Sigma2"]) == pytest.approx(0.0, abs=1e-12)
        assert float(values["coherence"]) == pytest.approx(0.0, abs=1e-12)

    def test_beamsplitter_table(self, capsys):
        # small cutoff keeps this test quick; the acceptance test runs 40
        assert run(["model", "beamsplitter", "--theta", str(math.pi / 4.0),
                    "--fock-dim", "24", "--safe-dim", "10"]) == 0
        values = dict(
            line.split(" = ") for line in capsys.readouterr().out.strip().splitlines()
        )
        assert float(values["sigma_product"]) == pytest.approx(0.5, abs=1e-5)
        assert abs(float(values["jm_residual"])) <= 1e-5

    def test_beamsplitter_bad_theta(self):
        assert run(["model", "beamsplitter", "--theta", "0"]) == 64

    def test_fluorescence_csv(self, capsys):
        assert run(["model", "fluorescence", "--omega", "50", "--tmax", "5",
                    "--steps", "11"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "t,Delta,delta_floor"
        assert len(lines) == 12
        t, dd, floor = (float(v) for v in lines[-1].split(","))
        assert t == 5.0
        assert dd == pytest.approx(0.5 * (1.0 - math.exp(-3.75)), abs=1e-12)

    def test_fluorescence_requires_omega(self):
        assert run(["model", "fluorescence"]) == 64

    def test_fluorescence_file_output(self, tmp_path):
        out = tmp_path / "traj.csv"
        assert run(["model", "fluorescence", "--omega", "2", "--out", str(out)]) == 0
        assert out.read_text().startswith("t,Delta,delta_floor\n")


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "qchan.cli", "figure", "5", "--out", "/dev/null"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
