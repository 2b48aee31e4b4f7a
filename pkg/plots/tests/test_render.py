"""Rendering contract: five CSVs in, five images out, flags on the
wrong side of the curve, byte-stable SVG."""

import subprocess

import pytest

from qchan_plots import FigureFormatError, parse_figure_csv, render
from qchan_plots.cli import main as cli_main

FIGURE_IDS = (2, 3, 4, 5, 6)


@pytest.fixture(scope="module")
def csv_dir(tmp_path_factory):
    """The five figure CSVs, produced through the emitter CLI so the
    interchange goes over the real contract."""
    out = tmp_path_factory.mktemp("csv")
    for fid in FIGURE_IDS:
        proc = subprocess.run(
            ["qchan", "figure", str(fid), "--out", str(out / f"figure{fid}.csv")],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0, proc.stderr
    return out


class TestParse:
    def test_reads_all_five(self, csv_dir):
        for fid in FIGURE_IDS:
            fig = parse_figure_csv(csv_dir / f"figure{fid}.csv")
            assert fig.figure_id == fid
            assert fig.forbidden in ("below", "above")
            assert len(fig.x) >= 256

    def test_refuses_missing_header(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("x,y\n0,1\n1,2\n")
        with pytest.raises(FigureFormatError, match="qchan-figure"):
            parse_figure_csv(bad)

    def test_refuses_non_monotone_x(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text(
            "# qchan-figure: 6\n# x-axis: a\n# y-axis: b\n# forbidden: above\n"
            "x,bound\n0.2,0.1\n0.1,0.2\n"
        )
        with pytest.raises(FigureFormatError, match="not increasing"):
            parse_figure_csv(bad)

    def test_refuses_bad_forbidden_side(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text(
            "# qchan-figure: 6\n# x-axis: a\n# y-axis: b\n# forbidden: sideways\n"
            "x,bound\n0.1,0.1\n0.2,0.2\n"
        )
        with pytest.raises(FigureFormatError, match="forbidden side"):
            parse_figure_csv(bad)


class TestRender:
    def test_five_csvs_five_images(self, csv_dir, tmp_path):
        for fid in FIGURE_IDS:
            out = tmp_path / f"figure{fid}.svg"
            report = render(csv_dir / f"figure{fid}.csv", out)
            assert out.exists() and out.stat().st_size > 0
            assert report.figure_id == fid
            assert report.flagged == 0

    def test_figure3_points_on_curve(self, csv_dir, tmp_path):
        report = render(csv_dir / "figure3.csv", tmp_path / "f3.svg")
        assert report.model_points == 9
        assert report.max_vertical_deviation <= 1e-4

    def test_figure4_is_curve_only(self, csv_dir, tmp_path):
        report = render(csv_dir / "figure4.csv", tmp_path / "f4.svg")
        assert report.model_points == 0
        assert report.max_vertical_deviation is None

    def test_svg_bytes_stable(self, csv_dir, tmp_path):
        a = tmp_path / "a.svg"
        b = tmp_path / "b.svg"
        render(csv_dir / "figure5.csv", a)
        render(csv_dir / "figure5.csv", b)
        assert a.read_bytes() == b.read_bytes()

    def test_png_output(self, csv_dir, tmp_path):
        out = tmp_path / "f2.png"
        render(csv_dir / "figure2.csv", out, "png")
        assert out.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"

    def test_point_in_forbidden_region_is_flagged(self, tmp_path):
        # one synthetic point 0.05 above the ceiling curve
        csv = tmp_path / "synthetic.csv"
        csv.write_text(
            "# qchan-figure: 6\n"
            "# x-axis: delta (measurement infidelity)\n"
            "# y-axis: residual coherence\n"
            "# forbidden: above\n"
            "delta,coherence_bound,model\n"
            "0.1,0.3,\n"
            "0.2,0.4,0.45\n"
            "0.3,0.458257569496,0.458257569496\n"
            "0.4,0.489897948557,\n"
        )
        report = render(csv, tmp_path / "synthetic.svg")
        assert report.model_points == 2
        assert report.flagged == 1

    def test_point_below_floor_curve_is_flagged(self, tmp_path):
        csv = tmp_path / "floor.csv"
        csv.write_text(
            "# qchan-figure: 3\n"
            "# x-axis: Delta\n"
            "# y-axis: delta\n"
            "# forbidden: below\n"
            "Delta,bound,model\n"
            "0.1,0.2,0.15\n"
            "0.2,0.1,0.1\n"
        )
        report = render(csv, tmp_path / "floor.svg")
        assert report.flagged == 1


class TestCli:
    def test_render_ok(self, csv_dir, tmp_path, capsys):
        out = tmp_path / "f6.svg"
        code = cli_main(["render", str(csv_dir / "figure6.csv"), str(out)])
        assert code == 0
        assert "figure 6" in capsys.readouterr().out
        assert out.exists()

    def test_malformed_csv_exits_2(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("not,a,figure\n")
        assert cli_main(["render", str(bad), str(tmp_path / "x.svg")]) == 2

    def test_missing_file_exits_2(self, tmp_path):
        assert cli_main(["render", "no/such.csv", str(tmp_path / "x.svg")]) == 2

    def test_usage_error_is_64(self):
        with pytest.raises(SystemExit) as exc:
            cli_main(["render"])
        assert exc.value.code == 64
