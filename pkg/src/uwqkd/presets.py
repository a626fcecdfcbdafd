"""Built-in experiment presets, one per published curve family.

A preset expands to one or more `ExperimentConfig` objects whose rows are
concatenated into a single CSV file. Presets default to 1e5 photons per
point; count and QBER presets prepare H only, fidelity presets all four
BB84 states. ``fig2`` is special: it writes sampled scattering-angle
histograms next to their quadrature-predicted counts.
"""

from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from uwqkd.config import ExperimentConfig
from uwqkd.constants import DEFAULT_SEED
from uwqkd.experiment import calibrated_optics, run_many, state_family
from uwqkd.physics.polarization import BB84_STATES
from uwqkd.physics.transport import sample_angle_histograms, tables_for
from uwqkd.results import provenance, write_csv
from uwqkd.types import BB84Label, EnvironmentLabel, SweepKey, WaterTypeName

logger = logging.getLogger(__name__)

PRESET_PHOTONS = 100_000

ALL_STATES = tuple(BB84Label)
NIGHT_SKIES = (
    EnvironmentLabel.NONE,
    EnvironmentLabel.FULL_MOON,
    EnvironmentLabel.STARLIGHT,
    EnvironmentLabel.CLOUDY_NIGHT,
)


def _span(start: float, stop: float, step: float) -> tuple[float, ...]:
    count = round((stop - start) / step) + 1
    return tuple(float(v) for v in np.round(np.linspace(start, stop, count), 10))


@dataclass(frozen=True)
class Preset:
    """A named set of configurations."""

    name: str
    description: str
    build: Callable[[ExperimentConfig], list[ExperimentConfig]]
    """Expand a base config (photons, seed, workers set) into the preset's configs."""


def _fig3(base: ExperimentConfig) -> list[ExperimentConfig]:
    distances = _span(10, 100, 10)
    return [
        base.with_overrides(
            water=water,
            sweep=SweepKey.DISTANCE,
            sweep_values=distances,
            environments=(EnvironmentLabel.NONE,),
        )
        for water in WaterTypeName
    ]


def _fig4a(base: ExperimentConfig) -> list[ExperimentConfig]:
    return [
        base.with_overrides(
            distance=distance,
            sweep=SweepKey.APERTURE,
            sweep_values=_span(0.10, 0.50, 0.05),
            environments=(EnvironmentLabel.NONE,),
        )
        for distance in (60.0, 100.0)
    ]


def _fig4b(base: ExperimentConfig) -> list[ExperimentConfig]:
    return [
        base.with_overrides(
            distance=distance,
            aperture=0.20,
            sweep=SweepKey.FOV,
            sweep_values=_span(0.05, 0.50, 0.05),
            environments=(EnvironmentLabel.NONE,),
        )
        for distance in (60.0, 100.0)
    ]


def _fig5(base: ExperimentConfig) -> list[ExperimentConfig]:
    common = base.with_overrides(distance=60.0, states=ALL_STATES, environments=(EnvironmentLabel.NONE,))
    return [
        common.with_overrides(sweep=SweepKey.APERTURE, sweep_values=_span(0.10, 0.50, 0.05)),
        common.with_overrides(sweep=SweepKey.FOV, sweep_values=_span(0.05, 0.50, 0.05)),
    ]


def _fig6(base: ExperimentConfig) -> list[ExperimentConfig]:
    return [
        base.with_overrides(
            states=ALL_STATES,
            sweep=SweepKey.DISTANCE,
            sweep_values=_span(20, 100, 10),
            environments=(EnvironmentLabel.NONE,),
        )
    ]


def _fig7a(base: ExperimentConfig) -> list[ExperimentConfig]:
    return [
        base.with_overrides(
            distance=60.0,
            depth=200.0,
            sweep=SweepKey.APERTURE,
            sweep_values=_span(0.05, 0.50, 0.05),
            environments=NIGHT_SKIES,
        )
    ]


def _fig7b(base: ExperimentConfig) -> list[ExperimentConfig]:
    return [
        base.with_overrides(
            distance=60.0,
            depth=200.0,
            sweep=SweepKey.FOV,
            sweep_values=_span(0.05, 0.50, 0.05),
            environments=NIGHT_SKIES,
        )
    ]


def _fig8(base: ExperimentConfig) -> list[ExperimentConfig]:
    return [
        base.with_overrides(
            depth=200.0,
            sweep=SweepKey.DISTANCE,
            sweep_values=_span(10, 150, 10),
            environments=NIGHT_SKIES,
        )
    ]


def _fig9(base: ExperimentConfig) -> list[ExperimentConfig]:
    return [
        base.with_overrides(
            distance=100.0,
            sweep=SweepKey.DEPTH,
            sweep_values=_span(100, 500, 20),
            environments=(EnvironmentLabel.STARLIGHT, EnvironmentLabel.CLOUDY_NIGHT),
        )
    ]


def _fig10(base: ExperimentConfig) -> list[ExperimentConfig]:
    return [
        base.with_overrides(
            depth=200.0,
            sweep=SweepKey.DISTANCE,
            sweep_values=_span(10, 150, 10),
            environments=(EnvironmentLabel.STARLIGHT,),
        )
    ]


def _fig2(base: ExperimentConfig) -> list[ExperimentConfig]:
    return [base.with_overrides(states=ALL_STATES, environments=(EnvironmentLabel.NONE,))]


PRESETS: dict[str, Preset] = {
    preset.name: preset
    for preset in (
        Preset("fig2", "scattering-angle histograms vs quadrature, Jerlov I", _fig2),
        Preset("fig3", "received photons vs distance, Jerlov I/II/III", _fig3),
        Preset("fig4a", "received photons vs aperture at 60 and 100 m", _fig4a),
        Preset("fig4b", "received photons vs field of view at 60 and 100 m, A = 20 cm", _fig4b),
        Preset("fig5", "fidelity vs aperture and field of view at 60 m", _fig5),
        Preset("fig6", "fidelity vs distance", _fig6),
        Preset("fig7a", "QBER vs aperture at 60 m under four skies, 200 m deep", _fig7a),
        Preset("fig7b", "QBER vs field of view at 60 m under four skies, 200 m deep", _fig7b),
        Preset("fig8", "QBER vs distance under four skies, 200 m deep", _fig8),
        Preset("fig9", "QBER vs receiver depth, 100 m link", _fig9),
        Preset("fig10", "sifted key rate vs distance, starlight, 200 m deep", _fig10),
    )
}


def preset_configs(
    name: str,
    *,
    photons: int | None = None,
    seed: int | None = None,
    workers: int | None = None,
) -> list[ExperimentConfig]:
    """Expand a preset into its configurations.

    Raises:
        KeyError: If the preset does not exist.
    """
    preset = PRESETS[name]
    base = ExperimentConfig(
        photons=photons or PRESET_PHOTONS,
        seed=DEFAULT_SEED if seed is None else seed,
        workers=workers or 1,
        preset=name,
    )
    return preset.build(base)


def _write_angle_histograms(cfg: ExperimentConfig, output: Path) -> Path:
    optics = calibrated_optics(cfg)
    tables = tables_for(optics, bins=cfg.psd_bins, points=cfg.theta_points)
    if tables is None:
        raise ValueError("angle histograms need scattering water")
    columns = ["state", "angle", "bin_low", "bin_high", "count", "expected"]
    records: list[list[str | int | float | None]] = []
    for label in cfg.states:
        hist = sample_angle_histograms(
            BB84_STATES[label].stokes,
            optics,
            tables,
            cfg.photons,
            cfg.seed,
            family=state_family(label),
        )
        for angle, edges, counts, expected in (
            ("theta", hist.theta_edges, hist.theta_counts, hist.theta_expected),
            ("phi", hist.phi_edges, hist.phi_counts, hist.phi_expected),
        ):
            for k in range(counts.shape[0]):
                records.append(
                    [
                        label.value,
                        angle,
                        float(edges[k]),
                        float(edges[k + 1]),
                        int(counts[k]),
                        float(expected[k]) * cfg.photons,
                    ]
                )
    return write_csv(output, provenance(cfg), columns, records)


def run_preset(
    name: str,
    *,
    photons: int | None = None,
    seed: int | None = None,
    workers: int | None = None,
    output: Path | None = None,
) -> Path:
    """Run a preset and write its CSV file.

    Args:
        name: Preset name, see `PRESETS`.
        photons: Photons per point (angle draws per state for ``fig2``).
        seed: Run seed.
        workers: Worker processes.
        output: Destination; defaults to ``<name>.csv``.

    Returns:
        The path written.
    """
    configs = preset_configs(name, photons=photons, seed=seed, workers=workers)
    path = output or Path(f"{name}.csv")
    logger.info("preset %s: %d configuration(s) -> %s", name, len(configs), path)
    if name == "fig2":
        return _write_angle_histograms(configs[0], path)
    return run_many(configs, path)


__all__ = [
    "PRESETS",
    "PRESET_PHOTONS",
    "Preset",
    "preset_configs",
    "run_preset",
]
