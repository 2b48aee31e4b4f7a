"""Figure-curve CSV emitter.

Each figure file is self-describing: a ``# qchan-figure: <id>`` header,
axis names, and which side of the curve is forbidden.  Numbers are
written at 12 significant digits.  Figures 2, 3 and 6 carry a second
series: the two-outcome sharpness family evaluated on a fixed p grid,
whose points attain the bound, inserted at their exact abscissae.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bounds import collapse_general_bound, collapse_unbiased_bound

FIGURE_IDS = (2, 3, 4, 5, 6)
MIN_POINTS = 16
DEFAULT_POINTS = 256
P_GRID = tuple(round(0.05 * k, 2) for k in range(1, 10))


@dataclass(frozen=True)
class FigureSpec:
    figure_id: int
    x_name: str
    y_name: str
    forbidden: str
    columns: tuple[str, ...]
    rows: tuple[tuple, ...]  # (x, bound, model-or-None) or (x, bound)


def _sharpness_triplet(p: float) -> tuple[float, float, float]:
    """(disturbance, infidelity, root added variance) of the family."""
    q = 1.0 - p
    root = math.sqrt(p * q)
    return 0.5 - root, p, 2.0 * root / (1.0 - 2.0 * p)


def _hp_unbiased_curve(dd: float) -> float:
    return (0.5 - dd) / math.sqrt(dd * (1.0 - dd))


def _hp_general_curve(dd: float) -> float:
    return 0.5 - math.sqrt(0.25 - (0.5 - dd) ** 2)


def _merge_grid(grid: np.ndarray, extras: list[float]) -> list[tuple[float, bool]]:
    """Insert model abscissae into the regular grid, keeping x monotone.

    The CSV is the contract, so collisions are judged at its 12-digit
    precision: a grid point that prints like a model point is replaced
    by the model point (whose exact abscissa the model column needs).
    """
    pairs = [(float(x), False) for x in grid]
    pairs.extend((float(x), True) for x in extras)
    pairs.sort(key=lambda t: (t[0], not t[1]))
    merged: list[tuple[float, bool]] = []
    for x, is_model in pairs:
        if merged and f"{merged[-1][0]:.12g}" == f"{x:.12g}":
            if is_model and not merged[-1][1]:
                merged[-1] = (x, True)
        else:
            merged.append((x, is_model))
    return merged


def figure_spec(figure_id: int, points: int = DEFAULT_POINTS) -> FigureSpec:
    if figure_id not in FIGURE_IDS:
        raise ValueError(f"unknown figure id {figure_id!r}, expected one of 2..6")
    if points < MIN_POINTS:
        raise ValueError(f"points must be at least {MIN_POINTS}")

    if figure_id == 2:
        # noise floor against disturbance; diverges at zero disturbance
        grid = np.linspace(0.002, 0.5, points)
        model = {(_sharpness_triplet(p)[0]): _sharpness_triplet(p)[2] for p in P_GRID}
        rows = tuple(
            (x, _hp_unbiased_curve(x), model.get(x) if is_m else None)
            for x, is_m in _merge_grid(grid, list(model))
        )
        return FigureSpec(
            2, "Delta (maximal disturbance)",
            "Sigma (root maximal added variance)", "below",
            ("Delta", "Sigma_bound", "sharpness_Sigma"), rows,
        )

    if figure_id == 3:
        grid = np.linspace(0.0, 0.5, points)
        model = {(_sharpness_triplet(p)[0]): p for p in P_GRID}
        rows = tuple(
            (x, _hp_general_curve(x), model.get(x) if is_m else None)
            for x, is_m in _merge_grid(grid, list(model))
        )
        return FigureSpec(
            3, "Delta (maximal disturbance)",
            "delta (measurement infidelity)", "below",
            ("Delta", "delta_bound", "sharpness_delta"), rows,
        )

    if figure_id == 4:
        grid = np.linspace(0.0, 5.0, points)
        rows = tuple(
            (float(t), 0.5 - 0.5 * math.sqrt(1.0 - math.exp(-1.5 * float(t))))
            for t in grid
        )
        return FigureSpec(
            4, "t (interaction time)", "delta (measurement infidelity)",
            "below", ("t", "delta_floor"), rows,
        )

    if figure_id == 5:
        grid = np.linspace(0.0, 3.0, points)
        rows = tuple(
            (float(r), collapse_unbiased_bound(float(r), 1.0)) for r in grid
        )
        return FigureSpec(
            5, "Sigma/|x-y| (noise-to-gap ratio)", "residual coherence",
            "above", ("ratio", "coherence_bound"), rows,
        )

    # figure 6: coherence ceiling against infidelity
    grid = np.linspace(0.0, 0.5, points)
    model = {p: math.sqrt(p * (1.0 - p)) for p in P_GRID}
    rows = tuple(
        (x, collapse_general_bound(x), model.get(x) if is_m else None)
        for x, is_m in _merge_grid(grid, list(model))
    )
    return FigureSpec(
        6, "delta (measurement infidelity)", "residual coherence",
        "above", ("delta", "coherence_bound", "sharpness_coherence"), rows,
    )


def _fmt(value) -> str:
    if value is None:
        return ""
    return f"{value:.12g}"


def format_csv(spec: FigureSpec) -> str:
    lines = [
        f"# qchan-figure: {spec.figure_id}",
        f"# x-axis: {spec.x_name}",
        f"# y-axis: {spec.y_name}",
        f"# forbidden: {spec.forbidden}",
        ",".join(spec.columns),
    ]
    for row in spec.rows:
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def write_figure_csv(spec: FigureSpec, path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(format_csv(spec))
