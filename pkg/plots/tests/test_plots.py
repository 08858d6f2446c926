"""Figure regeneration against the evaluator's CSV contract."""

import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from hetnetplots import CsvContractError, FIGURE_KINDS, build_figure, plot
from hetnetplots.cli import main as cli_main

# sentinel values: the plotted data must be these numbers verbatim
SENTINEL_A_T = [0.123456789, 0.2, 0.31]
SENTINEL_MC = [0.111111111, 0.222222222, 0.333333333]


def write_association_csv(path: Path):
    rows = [
        "sweep_value,A_T,A_L,A_N,mc_A_T,mc_A_L,mc_A_N,se_A_T,se_A_L,se_A_N,t_analytic_s,t_mc_s",
        f"50,{SENTINEL_A_T[0]},0.5,0.3,{SENTINEL_MC[0]},0.49,0.31,0.01,0.01,0.01,0.1,1.0",
        f"100,{SENTINEL_A_T[1]},0.5,0.3,{SENTINEL_MC[1]},0.52,0.28,0.01,0.01,0.01,0.1,1.0",
        f"150,{SENTINEL_A_T[2]},0.5,0.2,{SENTINEL_MC[2]},0.47,0.22,0.01,0.01,0.01,0.1,1.0",
    ]
    path.write_text("\n".join(rows) + "\n")


def write_coverage_csv(path: Path, with_oma: bool = True):
    header = "sweep_value,P_A_C,mc_P_A_C,se_P_A_C"
    if with_oma:
        header += ",mc_P_OMA_C"
    header += ",feasible,t_analytic_s,t_mc_s"
    rows = [header]
    for i, x in enumerate((-4.0, 0.0, 4.0)):
        row = f"{x},{0.8 - 0.2 * i},{0.79 - 0.2 * i},0.005"
        if with_oma:
            row += f",{0.60 - 0.2 * i}"
        row += ",1,0.1,2.0"
        rows.append(row)
    path.write_text("\n".join(rows) + "\n")


def write_rate_csv(path: Path):
    rows = [
        "sweep_value,R_T,R_A,mc_R_T,se_R_T,mc_R_A,se_R_A,mc_R_OMA,t_analytic_s,t_mc_s",
        "100,9.5,3.2,9.4,0.08,3.1,0.02,2.5,1.0,2.0",
        "200,9.6,1.9,9.7,0.08,1.8,0.02,2.0,1.0,2.0",
        "300,9.7,1.2,9.6,0.08,1.3,0.02,1.5,1.0,2.0",
    ]
    path.write_text("\n".join(rows) + "\n")


def test_association_figure_three_curves(tmp_path):
    csv_path = tmp_path / "association.csv"
    write_association_csv(csv_path)
    fig = build_figure(csv_path, "association-altitude")
    assert len(fig.axes[0].lines) >= 3


def test_values_pass_through_untouched(tmp_path):
    csv_path = tmp_path / "association.csv"
    write_association_csv(csv_path)
    fig = build_figure(csv_path, "association-altitude")
    ax = fig.axes[0]
    line_a_t = ax.lines[0]
    np.testing.assert_array_equal(line_a_t.get_ydata(), SENTINEL_A_T)
    # error-bar containers hold the Monte Carlo markers
    marker_sets = [c for c in ax.containers]
    assert marker_sets, "expected errorbar containers"
    np.testing.assert_array_equal(marker_sets[0][0].get_ydata(), SENTINEL_MC)


def test_coverage_figure_noma_and_oma(tmp_path):
    csv_path = tmp_path / "coverage_noma.csv"
    write_coverage_csv(csv_path, with_oma=True)
    for kind in ("coverage-threshold", "coverage-altitude", "coverage-density"):
        fig = build_figure(csv_path, kind)
        labels = [t.get_text() for t in fig.axes[0].get_legend().get_texts()]
        assert any("NOMA" in t for t in labels)
        assert any("OMA" in t for t in labels)


def test_oma_column_is_optional(tmp_path):
    csv_path = tmp_path / "coverage_noma.csv"
    write_coverage_csv(csv_path, with_oma=False)
    fig = build_figure(csv_path, "coverage-threshold")
    labels = [t.get_text() for t in fig.axes[0].get_legend().get_texts()]
    assert not any(t == "OMA simulation" for t in labels)


def test_missing_column_named(tmp_path):
    csv_path = tmp_path / "bad.csv"
    csv_path.write_text("sweep_value,unrelated\n1,2\n")
    with pytest.raises(CsvContractError, match="P_A_C"):
        build_figure(csv_path, "coverage-threshold")


def test_empty_csv_nonzero_exit(tmp_path):
    csv_path = tmp_path / "empty.csv"
    csv_path.write_text("")
    assert plot(csv_path, "rate-altitude", tmp_path / "x.png") == 1
    csv_path.write_text("sweep_value,R_T\n")      # header only
    assert plot(csv_path, "rate-altitude", tmp_path / "x.png") == 1


def test_unknown_kind_rejected(tmp_path):
    csv_path = tmp_path / "rate.csv"
    write_rate_csv(csv_path)
    assert plot(csv_path, "association-altitude", tmp_path / "x.png") == 1


def test_all_kinds_render_files(tmp_path):
    sources = {
        "association-altitude": write_association_csv,
        "coverage-threshold": write_coverage_csv,
        "coverage-altitude": write_coverage_csv,
        "coverage-density": write_coverage_csv,
        "rate-altitude": write_rate_csv,
    }
    assert set(sources) == set(FIGURE_KINDS)
    for kind, writer in sources.items():
        csv_path = tmp_path / f"{kind}.csv"
        writer(csv_path)
        out = tmp_path / f"{kind}.png"
        assert plot(csv_path, kind, out) == 0
        assert out.stat().st_size > 0


def test_cli_entry(tmp_path):
    csv_path = tmp_path / "rate.csv"
    write_rate_csv(csv_path)
    out = tmp_path / "rate.svg"
    assert cli_main(["--csv", str(csv_path), "--kind", "rate-altitude",
                     "--out", str(out)]) == 0
    assert out.stat().st_size > 0


def test_end_to_end_with_evaluator(tmp_path):
    """Drive the evaluator CLI for a tiny sweep, then render its CSV."""
    cmd = [sys.executable, "-m", "uavhetnet.cli", "association",
           "--sweep", "h=100:300:100", "--trials", "60", "--seed", "1",
           "--out", str(tmp_path)]
    proc = subprocess.run(cmd, capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    out = tmp_path / "assoc.png"
    assert plot(tmp_path / "association.csv", "association-altitude", out) == 0
    assert out.stat().st_size > 0
