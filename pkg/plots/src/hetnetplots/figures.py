"""Figure builders over the evaluator's sweep CSVs.

Purely presentational: every plotted number is read straight out of the
CSV (analytical columns become lines, Monte Carlo columns become markers
with their standard-error bars); nothing is recomputed here.  Each figure
kind declares the columns it needs and fails with a named diagnostic when
one is missing.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


class CsvContractError(ValueError):
    """The CSV does not carry what the requested figure needs."""


@dataclass(frozen=True)
class Series:
    column: str
    label: str
    err_column: str | None = None     # Monte Carlo series carry an SE column
    optional: bool = False


@dataclass(frozen=True)
class FigureKind:
    name: str
    x_label: str
    y_label: str
    lines: tuple        # analytical Series
    markers: tuple      # Monte Carlo Series


FIGURE_KINDS = {
    "association-altitude": FigureKind(
        name="association-altitude",
        x_label="ABS altitude h [m]",
        y_label="association probability",
        lines=(Series("A_T", "$A_T$ analytical"),
               Series("A_L", "$A_L$ analytical"),
               Series("A_N", "$A_N$ analytical")),
        markers=(Series("mc_A_T", "$A_T$ simulation", "se_A_T"),
                 Series("mc_A_L", "$A_L$ simulation", "se_A_L"),
                 Series("mc_A_N", "$A_N$ simulation", "se_A_N")),
    ),
    "coverage-threshold": FigureKind(
        name="coverage-threshold",
        x_label=r"SINR threshold $\epsilon$ [dB]",
        y_label="coverage probability",
        lines=(Series("P_A_C", "$P_A^C$ analytical"),),
        markers=(Series("mc_P_A_C", "NOMA simulation", "se_P_A_C"),
                 Series("mc_P_OMA_C", "OMA simulation", optional=True)),
    ),
    "coverage-altitude": FigureKind(
        name="coverage-altitude",
        x_label="ABS altitude h [m]",
        y_label="coverage probability",
        lines=(Series("P_A_C", "$P_A^C$ analytical"),),
        markers=(Series("mc_P_A_C", "NOMA simulation", "se_P_A_C"),
                 Series("mc_P_OMA_C", "OMA simulation", optional=True)),
    ),
    "coverage-density": FigureKind(
        name="coverage-density",
        x_label=r"ABS density $\lambda_A$ [1/m$^2$]",
        y_label="coverage probability",
        lines=(Series("P_A_C", "$P_A^C$ analytical"),),
        markers=(Series("mc_P_A_C", "NOMA simulation", "se_P_A_C"),
                 Series("mc_P_OMA_C", "OMA simulation", optional=True)),
    ),
    "rate-altitude": FigureKind(
        name="rate-altitude",
        x_label="ABS altitude h [m]",
        y_label="spectrum efficiency [bit/s/Hz]",
        lines=(Series("R_T", "$R_T$ analytical"),
               Series("R_A", "$R_A$ analytical")),
        markers=(Series("mc_R_T", "$R_T$ simulation", "se_R_T"),
                 Series("mc_R_A", "$R_A$ simulation", "se_R_A"),
                 Series("mc_R_OMA", "OMA simulation", optional=True)),
    ),
}


def read_sweep_csv(path: str | Path) -> dict[str, np.ndarray]:
    """CSV -> column arrays; empty or header-only files are an error."""
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or len(rows) < 2:
        raise CsvContractError(f"{path}: no data rows")
    header, body = rows[0], rows[1:]
    cols = {}
    for j, name in enumerate(header):
        values = []
        for row in body:
            cell = row[j] if j < len(row) else ""
            values.append(float(cell) if cell not in ("", "nan") else np.nan)
        cols[name] = np.asarray(values)
    return cols


def _column(cols, series: Series, kind: str, path):
    if series.column not in cols:
        if series.optional:
            return None
        raise CsvContractError(
            f"{path}: column {series.column!r} missing (required by {kind!r})")
    return cols[series.column]


def build_figure(csv_path: str | Path, kind_name: str):
    """Assemble one figure; returns the matplotlib Figure."""
    if kind_name not in FIGURE_KINDS:
        raise CsvContractError(
            f"unknown figure kind {kind_name!r}; expected one of "
            f"{sorted(FIGURE_KINDS)}")
    kind = FIGURE_KINDS[kind_name]
    cols = read_sweep_csv(csv_path)
    if "sweep_value" not in cols:
        raise CsvContractError(f"{csv_path}: column 'sweep_value' missing")
    x = cols["sweep_value"]

    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    for series in kind.lines:
        y = _column(cols, series, kind.name, csv_path)
        if y is not None:
            ax.plot(x, y, "-", label=series.label)
    for series in kind.markers:
        y = _column(cols, series, kind.name, csv_path)
        if y is None:
            continue
        err = cols.get(series.err_column) if series.err_column else None
        ax.errorbar(x, y, yerr=err, fmt="o", markersize=4.5, capsize=2.5,
                    linestyle="none", label=series.label)
    ax.set_xlabel(kind.x_label)
    ax.set_ylabel(kind.y_label)
    ax.grid(alpha=0.3)
    ax.legend(fontsize=9)
    fig.tight_layout()
    return fig


def plot(csv_path: str | Path, kind_name: str, out_path: str | Path) -> int:
    """Render one figure kind from one CSV to ``out_path`` (PNG/SVG by
    extension).  Returns a process exit status."""
    try:
        fig = build_figure(csv_path, kind_name)
    except (CsvContractError, OSError, ValueError) as err:
        print(f"error: {err}")
        return 1
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return 0
