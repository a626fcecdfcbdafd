"""Tests for the sweep pipeline."""

import logging
import math
from pathlib import Path

import pytest

from uwqkd.config import ExperimentConfig
from uwqkd.experiment import calibrated_optics, compute_rows, run_experiment, run_many, state_family
from uwqkd.results import format_cell, read_data
from uwqkd.types import BB84Label, EnvironmentLabel, SecurityVerdict, SweepKey


def _small(**changes: object) -> ExperimentConfig:
    """A configuration small enough to run in a unit test."""
    base = ExperimentConfig(photons=200, psd_bins=6, theta_points=181, seed=101)
    return base.with_overrides(**changes)


def test_state_families_are_fixed() -> None:
    """Test every label owns its own stream family."""
    assert [state_family(label) for label in BB84Label] == [0, 1, 2, 3]


def test_calibrated_optics_matches_water_type() -> None:
    """Test the configured water is calibrated to its extinction."""
    assert calibrated_optics(_small()).mu_e == pytest.approx(0.03)


def test_rows_are_grouped_by_environment() -> None:
    """Test rows come environment by environment, each in ascending sweep order."""
    cfg = _small(
        sweep=SweepKey.DISTANCE,
        sweep_values=(10.0, 20.0),
        environments=(EnvironmentLabel.STARLIGHT, EnvironmentLabel.NONE),
    )
    rows = compute_rows(cfg)

    assert [(r.environment, r.sweep_value) for r in rows] == [
        ("starlight", 10.0),
        ("starlight", 20.0),
        ("none", 10.0),
        ("none", 20.0),
    ]
    assert all(r.sweep_key == "distance" for r in rows)
    assert rows[0].received_ballistic == rows[2].received_ballistic
    assert rows[1].received_ballistic == rows[3].received_ballistic
    assert rows[2].background_error_rate == 0.0
    assert rows[0].background_error_rate > 0.0


def test_states_are_pooled_for_counts_and_split_for_fidelity() -> None:
    """Test two prepared states double the launched photons and get a fidelity each."""
    rows = compute_rows(_small(distance=20.0, states=(BB84Label.H, BB84Label.V)))

    assert len(rows) == 1
    row = rows[0]
    assert row.launched == 400
    assert row.sweep_key == ""
    assert row.sweep_value is None
    assert set(row.fidelity) == {BB84Label.H, BB84Label.V}
    assert row.se_received_ballistic == pytest.approx(math.sqrt(row.received_ballistic))


def test_dark_short_link_is_secure() -> None:
    """Test a short link without background light is secure with a positive key rate."""
    row = compute_rows(_small(distance=10.0, environments=(EnvironmentLabel.NONE,)))[0]

    assert row.qber < 0.10
    assert row.verdict is SecurityVerdict.SECURE_SOPHISTICATED
    assert row.kappa > 0


def test_depth_sweep_reuses_transport() -> None:
    """Test depth changes only the background, never the photon counts."""
    rows = compute_rows(_small(distance=20.0, sweep=SweepKey.DEPTH, sweep_values=(100.0, 200.0, 300.0)))

    assert len({r.received_ballistic for r in rows}) == 1
    assert len({r.received_scattered for r in rows}) == 1
    backgrounds = [r.background_error_rate for r in rows]
    assert backgrounds == sorted(backgrounds, reverse=True)
    qbers = [r.qber for r in rows]
    assert qbers == sorted(qbers, reverse=True)


def test_rows_are_reproducible() -> None:
    """Test identical configurations give identical rows."""
    cfg = _small(distance=30.0, states=(BB84Label.P,))
    states = [BB84Label.P]

    first = [[format_cell(c) for c in row.cells(states)] for row in compute_rows(cfg)]
    second = [[format_cell(c) for c in row.cells(states)] for row in compute_rows(cfg)]

    assert first == second


@pytest.mark.slow
def test_worker_count_does_not_change_results(tmp_path: Path) -> None:
    """Test runs on 1, 2 and 8 workers write byte-identical files apart from the creation time."""
    contents = []
    for workers in (1, 2, 8):
        cfg = _small(photons=5000, sweep=SweepKey.DISTANCE, sweep_values=(10.0, 20.0), workers=workers)
        path = run_experiment(cfg, tmp_path / f"workers-{workers}.csv")
        lines = path.read_bytes().splitlines(keepends=True)
        contents.append(b"".join(line for line in lines if not line.startswith(b"# created:")))

    assert contents[0] == contents[1] == contents[2]
    assert contents[0].count(b"\n") > 2


def test_empty_sweep_warns(caplog: pytest.LogCaptureFixture) -> None:
    """Test an empty sweep produces no rows and says so."""
    with caplog.at_level(logging.WARNING, logger="uwqkd.experiment"):
        rows = compute_rows(_small(sweep=SweepKey.APERTURE, sweep_values=()))

    assert rows == []
    assert "empty sweep over aperture" in caplog.text


def test_run_experiment_writes_csv(tmp_path: Path) -> None:
    """Test a run lands in the requested file with provenance and one row per point."""
    cfg = _small(sweep=SweepKey.DISTANCE, sweep_values=(10.0, 20.0))
    path = run_experiment(cfg, tmp_path / "sweep.csv")

    assert path == tmp_path / "sweep.csv"
    assert path.read_text(encoding="utf-8").startswith("# uwqkd ")
    columns, rows = read_data(path)
    assert len(rows) == 2
    assert [row[columns.index("distance_m")] for row in rows] == ["10", "20"]


def test_run_experiment_uses_configured_output(tmp_path: Path) -> None:
    """Test the file named in the configuration is used when no path is passed."""
    target = tmp_path / "configured.csv"

    assert run_experiment(_small(distance=10.0, output=target)) == target
    assert target.exists()


def test_run_many_concatenates(tmp_path: Path) -> None:
    """Test several configurations share one file in order."""
    configs = [_small(distance=10.0), _small(distance=10.0, states=(BB84Label.M,))]
    path = run_many(configs, tmp_path / "many.csv")

    columns, rows = read_data(path)
    assert len(rows) == 2
    assert "fidelity_H" in columns
    assert "fidelity_M" in columns
    assert "config_hash[1]" in path.read_text(encoding="utf-8")
