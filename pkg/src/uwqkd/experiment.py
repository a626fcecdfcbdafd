"""Sweep pipeline shared by configuration runs and presets.

For every swept point the prepared states are transported once, their
tallies pooled for the link budget, and one row emitted per configured
environment. Depth and environment do not change the photon histories,
so transport results are reused across them.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from pathlib import Path

from uwqkd.base.errors import EmptyEnsembleError, UndefinedQBERError
from uwqkd.config import ExperimentConfig
from uwqkd.link import (
    LinkBudget,
    LinkParams,
    background_error_rate,
    budget_standard_errors,
    expected_scatter_errors,
    link_budget,
    photon_rate,
    signal_rate,
)
from uwqkd.physics.medium import WaterOptics, calibrate, irradiance_at_depth
from uwqkd.physics.polarization import BB84_STATES, fidelity, fidelity_standard_error
from uwqkd.physics.transport import TransportTallies, run_transport, tables_for
from uwqkd.results import ResultRow, write_results
from uwqkd.types import BB84Label, EnvironmentLabel, SweepKey

logger = logging.getLogger(__name__)

_STATE_FAMILY = {label: index for index, label in enumerate(BB84Label)}

GeometryKey = tuple[float, float, float]


def state_family(label: BB84Label) -> int:
    """Random stream family of a prepared state, fixed per label."""
    return _STATE_FAMILY[label]


def calibrated_optics(cfg: ExperimentConfig) -> WaterOptics:
    """Calibrate the configured water."""
    return calibrate(
        cfg.water_type(), cfg.psd, cfg.relative_index(), cfg.wavelength, n_medium=cfg.n_water
    )


class _TransportCache:
    """Tallies per (distance, aperture, fov) and prepared state."""

    def __init__(self, cfg: ExperimentConfig, optics: WaterOptics) -> None:
        self.cfg = cfg
        self.optics = optics
        self.tables = tables_for(optics, bins=cfg.psd_bins, points=cfg.theta_points)
        self._tallies: dict[GeometryKey, dict[BB84Label, TransportTallies]] = {}

    def get(self, point: dict[SweepKey, float]) -> dict[BB84Label, TransportTallies]:
        key = (point[SweepKey.DISTANCE], point[SweepKey.APERTURE], point[SweepKey.FOV])
        if key not in self._tallies:
            recv = self.cfg.geometry(point)
            self._tallies[key] = {
                label: run_transport(
                    BB84_STATES[label],
                    self.optics,
                    recv,
                    self.cfg.photons,
                    self.cfg.seed,
                    self.cfg.workers,
                    state_index=state_family(label),
                    tables=self.tables,
                    max_events=self.cfg.max_events,
                )
                for label in self.cfg.states
            }
        return self._tallies[key]


def _budget(
    n: float, a: float, scatter: float, background: float, p: LinkParams
) -> LinkBudget | None:
    try:
        return link_budget(n, a, scatter, background, p)
    except UndefinedQBERError:
        return None


def build_row(
    cfg: ExperimentConfig,
    point: dict[SweepKey, float],
    env_label: EnvironmentLabel,
    tallies: dict[BB84Label, TransportTallies],
) -> ResultRow:
    """Assemble one result row from per-state tallies.

    Counts, rates, QBER and key rate use the tallies of all states pooled;
    fidelity is reported per state.
    """
    p = cfg.link_params()
    pooled = TransportTallies()
    for label in cfg.states:
        pooled = pooled.merge(tallies[label])
    scatter_errors = sum(expected_scatter_errors(tallies[label], BB84_STATES[label]) for label in cfg.states)

    n, a = signal_rate(pooled, p)
    scatter = photon_rate(scatter_errors, pooled.launched, p)
    env = cfg.environment(env_label)
    depth = point[SweepKey.DEPTH]
    background = background_error_rate(
        irradiance_at_depth(env, depth), point[SweepKey.APERTURE], point[SweepKey.FOV], p
    )
    budget = _budget(n, a, scatter, background, p)

    fidelities: dict[BB84Label, float] = {}
    fidelity_errors: dict[BB84Label, float] = {}
    for label in cfg.states:
        ensemble = tallies[label].scattered_ensemble
        try:
            fidelities[label] = fidelity(BB84_STATES[label], ensemble)
            fidelity_errors[label] = fidelity_standard_error(BB84_STATES[label], ensemble)
        except EmptyEnsembleError:
            fidelities[label] = math.nan
            fidelity_errors[label] = math.nan

    if budget is None:
        qber_value, verdict, kappa = math.nan, None, 0.0
        se_n, se_q, se_k = 0.0, math.nan, 0.0
    else:
        qber_value, verdict, kappa = budget.qber, budget.verdict, budget.kappa
        se_n, se_q, se_k = budget_standard_errors(budget, pooled.received, pooled.launched, p)

    return ResultRow(
        sweep_key="" if cfg.sweep is None else cfg.sweep.value,
        sweep_value=None if cfg.sweep is None else point[cfg.sweep],
        water=cfg.water.value,
        environment=env_label.value,
        distance=point[SweepKey.DISTANCE],
        aperture=point[SweepKey.APERTURE],
        fov=point[SweepKey.FOV],
        depth=depth,
        launched=pooled.launched,
        received_ballistic=pooled.received_ballistic,
        received_scattered=pooled.received_scattered,
        fidelity=fidelities,
        signal_rate=n,
        scatter_error_rate=scatter,
        background_error_rate=background,
        qber=qber_value,
        verdict=verdict,
        kappa=kappa,
        se_received_ballistic=math.sqrt(pooled.received_ballistic),
        se_received_scattered=math.sqrt(pooled.received_scattered),
        se_fidelity=fidelity_errors,
        se_signal_rate=se_n,
        se_qber=se_q,
        se_kappa=se_k,
    )


def compute_rows(cfg: ExperimentConfig) -> list[ResultRow]:
    """Compute every row of a configuration, series by series.

    Rows are grouped by environment, each group in ascending sweep order.
    """
    points = cfg.points()
    if not points:
        logger.warning("empty sweep over %s; no rows to compute", cfg.sweep.value if cfg.sweep else "-")
        return []
    optics = calibrated_optics(cfg)
    cache = _TransportCache(cfg, optics)
    rows = []
    for env_label in cfg.environments:
        for point in points:
            rows.append(build_row(cfg, point, env_label, cache.get(point)))
    logger.info("computed %d rows for %s water", len(rows), cfg.water.value)
    return rows


def run_experiment(cfg: ExperimentConfig, output: Path | None = None) -> Path:
    """Run a configuration and write its CSV file.

    Args:
        cfg: Validated configuration.
        output: Destination; defaults to ``cfg.output`` and then
            ``results.csv``.

    Returns:
        The path written.
    """
    path = output or cfg.output or Path("results.csv")
    return write_results(path, compute_rows(cfg), [cfg])


def run_many(configs: Sequence[ExperimentConfig], output: Path) -> Path:
    """Run several configurations into one file, in order."""
    rows: list[ResultRow] = []
    for cfg in configs:
        rows.extend(compute_rows(cfg))
    return write_results(output, rows, configs)


__all__ = [
    "build_row",
    "calibrated_optics",
    "compute_rows",
    "run_experiment",
    "run_many",
    "state_family",
]
