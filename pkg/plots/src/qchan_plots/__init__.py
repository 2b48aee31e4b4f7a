"""Render qchan figure CSVs: bound curve, shaded forbidden region,
model points (flagged when they land on the wrong side).

This package does no numerics of its own; everything it draws comes
from the CSV contract: a ``# qchan-figure: <id>`` header, axis names
and the forbidden side in comment lines, then a column header and the
data rows.
"""

from __future__ import annotations

from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "qchan-plots"

import matplotlib.pyplot as plt  # noqa: E402

__version__ = "0.1.0"

# a model point must sit this deep inside the forbidden region before
# it is drawn in the flagged style; keeps curve-touching points clean
FLAG_TOL = 1e-9


class FigureFormatError(ValueError):
    """The file does not follow the figure-CSV contract."""


@dataclass(frozen=True)
class FigureFile:
    figure_id: int
    x_label: str
    y_label: str
    forbidden: str  # "below" or "above"
    columns: tuple[str, ...]
    x: tuple[float, ...]
    bound: tuple[float, ...]
    model: tuple[float | None, ...]  # aligned with x; None where empty


@dataclass(frozen=True)
class RenderReport:
    figure_id: int
    curve_points: int
    model_points: int
    flagged: int
    max_vertical_deviation: float | None


def parse_figure_csv(path) -> FigureFile:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [line.rstrip("\n") for line in fh]
    if not lines or not lines[0].startswith("# qchan-figure: "):
        raise FigureFormatError(
            f"{path}: missing '# qchan-figure: <id>' header line"
        )
    try:
        figure_id = int(lines[0].split(":", 1)[1].strip())
    except ValueError as exc:
        raise FigureFormatError(f"{path}: unreadable figure id") from exc

    meta = {"x-axis": "", "y-axis": "", "forbidden": ""}
    body_start = 1
    for i, line in enumerate(lines[1:], start=1):
        if not line.startswith("# "):
            body_start = i
            break
        key, _, value = line[2:].partition(":")
        if key in meta:
            meta[key] = value.strip()
    else:
        raise FigureFormatError(f"{path}: no data after metadata")

    if meta["forbidden"] not in ("below", "above"):
        raise FigureFormatError(
            f"{path}: forbidden side must be 'below' or 'above', "
            f"got {meta['forbidden']!r}"
        )

    columns = tuple(lines[body_start].split(","))
    if len(columns) < 2:
        raise FigureFormatError(f"{path}: need at least x and bound columns")

    xs: list[float] = []
    bounds: list[float] = []
    models: list[float | None] = []
    for n, line in enumerate(lines[body_start + 1 :], start=body_start + 2):
        if not line:
            continue
        cells = line.split(",")
        if len(cells) != len(columns):
            raise FigureFormatError(f"{path}:{n}: wrong number of cells")
        try:
            xs.append(float(cells[0]))
            bounds.append(float(cells[1]))
            if len(cells) > 2 and cells[2]:
                models.append(float(cells[2]))
            else:
                models.append(None)
        except ValueError as exc:
            raise FigureFormatError(f"{path}:{n}: non-numeric cell") from exc
    if len(xs) < 2:
        raise FigureFormatError(f"{path}: fewer than two data rows")
    if any(b <= a for a, b in zip(xs, xs[1:])):
        raise FigureFormatError(f"{path}: x column is not increasing")

    return FigureFile(
        figure_id, meta["x-axis"], meta["y-axis"], meta["forbidden"],
        columns, tuple(xs), tuple(bounds), tuple(models),
    )


def _split_model_points(fig: FigureFile):
    """Model rows sorted into on-the-allowed-side and flagged lists.
    Deviation is vertical distance to the bound at the shared abscissa."""
    ok, flagged = [], []
    worst = None
    for x, bound, model in zip(fig.x, fig.bound, fig.model):
        if model is None:
            continue
        deviation = abs(model - bound)
        worst = deviation if worst is None else max(worst, deviation)
        into_forbidden = (
            bound - model if fig.forbidden == "below" else model - bound
        )
        (flagged if into_forbidden > FLAG_TOL else ok).append((x, model))
    return ok, flagged, worst


def render(csv_path, out_path, fmt: str = "svg") -> RenderReport:
    """Draw one figure file; returns what was drawn.

    SVG output is byte-stable for identical input: the hash salt is
    pinned and the date metadata is stripped.
    """
    if fmt not in ("svg", "png"):
        raise ValueError(f"format must be 'svg' or 'png', got {fmt!r}")
    fig_data = parse_figure_csv(csv_path)
    ok, flagged, worst = _split_model_points(fig_data)

    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    try:
        ax.plot(fig_data.x, fig_data.bound, color="#1f4e79", lw=1.8,
                label=fig_data.columns[1], zorder=3)

        top = max(fig_data.bound)
        for pts in (ok, flagged):
            if pts:
                top = max(top, max(y for _, y in pts))
        top *= 1.08
        if fig_data.forbidden == "below":
            ax.fill_between(fig_data.x, 0.0, fig_data.bound,
                            color="#c44", alpha=0.18, lw=0, label="forbidden")
            ax.set_ylim(0.0, top)
        else:
            ax.fill_between(fig_data.x, fig_data.bound, top,
                            color="#c44", alpha=0.18, lw=0, label="forbidden")
            ax.set_ylim(0.0, top)

        if ok:
            ax.scatter([x for x, _ in ok], [y for _, y in ok],
                       s=28, color="#e08214", zorder=4,
                       label=fig_data.columns[2] if len(fig_data.columns) > 2 else "model")
        if flagged:
            ax.scatter([x for x, _ in flagged], [y for _, y in flagged],
                       s=60, color="#d62728", marker="x", zorder=5,
                       label="violates bound")

        ax.set_xlabel(fig_data.x_label)
        ax.set_ylabel(fig_data.y_label)
        ax.set_title(f"figure {fig_data.figure_id}")
        ax.legend(loc="best", fontsize=8)
        fig.tight_layout()
        fig.savefig(out_path, format=fmt, metadata={"Date": None} if fmt == "svg" else None)
    finally:
        plt.close(fig)

    return RenderReport(
        figure_id=fig_data.figure_id,
        curve_points=len(fig_data.x),
        model_points=len(ok) + len(flagged),
        flagged=len(flagged),
        max_vertical_deviation=worst,
    )
