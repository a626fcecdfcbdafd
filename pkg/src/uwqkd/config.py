"""Experiment configuration.

Configurations are TOML documents. Every key is optional; missing keys
take the defaults in `uwqkd.constants`. One of ``distance``, ``aperture``,
``fov`` or ``depth`` may be given as a list, which makes it the swept
quantity; ``environment`` and ``states`` may also be lists.

Example:
    ```toml
    water = "jerlov-i"
    distance = [20, 40, 60, 80, 100]
    aperture = "10cm"
    fov = "10deg"
    environment = ["starlight", "cloudy-night"]
    photons = 100000

    [psd]
    epsilon = 4.0
    ```
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
import os
import tomllib
from collections.abc import Callable, Mapping
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from uwqkd.base.errors import ConfigError
from uwqkd.constants import (
    DEFAULT_APERTURE,
    DEFAULT_DEPTH,
    DEFAULT_DISTANCE,
    DEFAULT_FOV,
    DEFAULT_PHOTONS,
    DEFAULT_SEED,
    DEFAULT_WAVELENGTH,
    DIFFUSE_ATTENUATION,
    MAX_SCATTER_EVENTS,
    N_WATER,
    PARTICLE_INDEX,
    PSD_BINS,
    PURE_WATER_ABSORPTION,
    THETA_POINTS,
)
from uwqkd.helpers import parse_angle, parse_complex_index, parse_length, parse_time
from uwqkd.link import LinkParams
from uwqkd.physics.medium import Environment, JungePSD, WaterType
from uwqkd.physics.mie import ComplexIndex
from uwqkd.physics.transport import ReceiverGeometry
from uwqkd.types import BB84Label, EnvironmentLabel, SweepKey, WaterTypeName

WORKERS_ENV = "UWQKD_WORKERS"

TOP_LEVEL_KEYS = frozenset(
    {
        "water",
        "wavelength",
        "distance",
        "aperture",
        "fov",
        "depth",
        "environment",
        "states",
        "photons",
        "seed",
        "workers",
        "output",
        "max_events",
        "psd",
        "link",
        "medium",
    }
)
PSD_KEYS = frozenset({"epsilon", "dmin", "dmax", "d0", "bins"})
LINK_KEYS = frozenset({"mean_photons", "bit_period", "gate", "detection_efficiency"})
MEDIUM_KEYS = frozenset({"particle_index", "n_water", "mu_d", "mu_a_water", "theta_points"})


@dataclass(frozen=True, kw_only=True)
class ExperimentConfig:
    """A validated experiment.

    The fixed geometry fields hold the value used for every row; when
    ``sweep`` is set, ``sweep_values`` replace the swept field row by row.
    """

    water: WaterTypeName = WaterTypeName.JERLOV_I
    wavelength: float = DEFAULT_WAVELENGTH
    distance: float = DEFAULT_DISTANCE
    aperture: float = DEFAULT_APERTURE
    fov: float = DEFAULT_FOV
    depth: float = DEFAULT_DEPTH
    sweep: SweepKey | None = None
    sweep_values: tuple[float, ...] = ()
    """Swept values in ascending order."""

    environments: tuple[EnvironmentLabel, ...] = (EnvironmentLabel.STARLIGHT,)
    states: tuple[BB84Label, ...] = (BB84Label.H,)
    photons: int = DEFAULT_PHOTONS
    seed: int = DEFAULT_SEED
    workers: int = 1
    max_events: int = MAX_SCATTER_EVENTS
    psd: JungePSD = field(default_factory=JungePSD)
    psd_bins: int = PSD_BINS
    link: LinkParams = field(default_factory=LinkParams)
    particle_index: complex = PARTICLE_INDEX
    """Absolute particle index, ``n - ik``."""

    n_water: float = N_WATER
    mu_d: float = DIFFUSE_ATTENUATION
    mu_a_water: float = PURE_WATER_ABSORPTION
    theta_points: int = THETA_POINTS
    output: Path | None = None
    preset: str | None = None
    """Name of the preset that produced this config, for provenance."""

    def __post_init__(self) -> None:
        """Validate ranges, naming the offending key."""
        _require(self.wavelength > 0, "wavelength", "must be positive")
        _require(self.distance > 0, "distance", "must be positive")
        _require(self.aperture > 0, "aperture", "must be positive")
        _require(0 < self.fov <= 0.5 * math.pi, "fov", "must lie in (0, pi/2] radians")
        _require(self.depth >= 0, "depth", "must be non-negative")
        _require(self.photons >= 1, "photons", "must be at least 1")
        _require(0 <= self.seed < 2**64, "seed", "must be a 64-bit unsigned integer")
        _require(self.workers >= 1, "workers", "must be at least 1")
        _require(self.max_events >= 1, "max_events", "must be at least 1")
        _require(self.psd_bins >= 1, "psd.bins", "must be at least 1")
        _require(self.theta_points >= 2, "medium.theta_points", "must be at least 2")
        _require(self.n_water > 0, "medium.n_water", "must be positive")
        _require(self.mu_d >= 0, "medium.mu_d", "must be non-negative")
        _require(self.mu_a_water >= 0, "medium.mu_a_water", "must be non-negative")
        _require(self.particle_index.real > 0, "medium.particle_index", "real part must be positive")
        _require(len(self.environments) > 0, "environment", "needs at least one entry")
        _require(len(self.states) > 0, "states", "needs at least one entry")
        _require(len(set(self.states)) == len(self.states), "states", "must not repeat")
        _require(
            len(set(self.environments)) == len(self.environments), "environment", "must not repeat"
        )
        if self.sweep is None:
            _require(not self.sweep_values, "sweep", "values given without a swept key")
        else:
            for value in self.sweep_values:
                self._check_sweep_value(self.sweep, value)
            _require(
                list(self.sweep_values) == sorted(self.sweep_values),
                self.sweep.value,
                "sweep values must be ascending",
            )

    @staticmethod
    def _check_sweep_value(key: SweepKey, value: float) -> None:
        if key is SweepKey.FOV:
            _require(0 < value <= 0.5 * math.pi, key.value, f"value {value} must lie in (0, pi/2]")
        elif key is SweepKey.DEPTH:
            _require(value >= 0, key.value, f"value {value} must be non-negative")
        else:
            _require(value > 0, key.value, f"value {value} must be positive")

    def points(self) -> list[dict[SweepKey, float]]:
        """Geometry of every row, in sweep order.

        Without a sweep this is a single point at the fixed values.
        """
        fixed = {
            SweepKey.DISTANCE: self.distance,
            SweepKey.APERTURE: self.aperture,
            SweepKey.FOV: self.fov,
            SweepKey.DEPTH: self.depth,
        }
        if self.sweep is None:
            return [fixed]
        return [{**fixed, self.sweep: value} for value in self.sweep_values]

    def water_type(self) -> WaterType:
        """The configured water type."""
        return WaterType.named(self.water, mu_a_water=self.mu_a_water)

    def environment(self, label: EnvironmentLabel) -> Environment:
        """One configured environment."""
        return Environment.named(label, mu_d=self.mu_d)

    def link_params(self) -> LinkParams:
        """Link parameters at the configured wavelength."""
        if self.link.wavelength == self.wavelength:
            return self.link
        return dataclasses.replace(self.link, wavelength=self.wavelength)

    def relative_index(self) -> ComplexIndex:
        """Particle index relative to water."""
        return ComplexIndex.from_complex(self.particle_index).relative_to(self.n_water)

    @staticmethod
    def geometry(point: Mapping[SweepKey, float]) -> ReceiverGeometry:
        """Receiver geometry of one row."""
        return ReceiverGeometry(
            distance=point[SweepKey.DISTANCE],
            aperture=point[SweepKey.APERTURE],
            fov=point[SweepKey.FOV],
        )

    def semantic_dict(self) -> dict[str, Any]:
        """Every field that changes results, as JSON-ready values."""
        return {
            "water": self.water.value,
            "wavelength": self.wavelength,
            "distance": self.distance,
            "aperture": self.aperture,
            "fov": self.fov,
            "depth": self.depth,
            "sweep": None if self.sweep is None else self.sweep.value,
            "sweep_values": list(self.sweep_values),
            "environments": [e.value for e in self.environments],
            "states": [s.value for s in self.states],
            "photons": self.photons,
            "seed": self.seed,
            "max_events": self.max_events,
            "psd": {
                "epsilon": self.psd.epsilon,
                "dmin": self.psd.dmin,
                "dmax": self.psd.dmax,
                "d0": self.psd.d0,
                "bins": self.psd_bins,
            },
            "link": {
                "mean_photons": self.link.mean_photons,
                "bit_period": self.link.bit_period,
                "gate": self.link.gate,
                "detection_efficiency": self.link.detection_efficiency,
            },
            "medium": {
                "particle_index": [self.particle_index.real, self.particle_index.imag],
                "n_water": self.n_water,
                "mu_d": self.mu_d,
                "mu_a_water": self.mu_a_water,
                "theta_points": self.theta_points,
            },
            "preset": self.preset,
        }

    def config_hash(self) -> str:
        """SHA-256 of the canonical JSON of `semantic_dict`."""
        canonical = json.dumps(self.semantic_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def with_overrides(self, **changes: Any) -> ExperimentConfig:
        """Copy with some fields replaced (``None`` values are ignored)."""
        return dataclasses.replace(self, **{k: v for k, v in changes.items() if v is not None})


def _require(condition: bool, key: str, message: str) -> None:
    if not condition:
        raise ConfigError(key, message)


def _convert(key: str, value: object, parser: Callable[[object], float]) -> float:
    try:
        result = parser(value)
    except ValueError as exc:
        raise ConfigError(key, str(exc)) from None
    if not math.isfinite(result):
        raise ConfigError(key, f"must be finite, got {value!r}")
    return result


def _integer(key: str, value: object) -> int:
    if isinstance(value, bool) or not isinstance(value, int | float):
        raise ConfigError(key, f"expected an integer, got {value!r}")
    if isinstance(value, float) and not value.is_integer():
        raise ConfigError(key, f"expected an integer, got {value!r}")
    return int(value)


def _number(key: str, value: object) -> float:
    if isinstance(value, bool) or not isinstance(value, int | float):
        raise ConfigError(key, f"expected a number, got {value!r}")
    return float(value)


def _enum_list(key: str, value: object, enum: Callable[[str], Any]) -> tuple[Any, ...]:
    items = value if isinstance(value, list) else [value]
    result = []
    for item in items:
        try:
            result.append(enum(str(item)))
        except ValueError:
            raise ConfigError(key, f"unknown value {item!r}") from None
    return tuple(result)


def _check_keys(section: str, table: Mapping[str, Any], allowed: frozenset[str]) -> None:
    for key in table:
        if key not in allowed:
            name = f"{section}.{key}" if section else key
            raise ConfigError(name, "unknown key")


def _table(data: Mapping[str, Any], key: str) -> Mapping[str, Any]:
    value = data.get(key, {})
    if not isinstance(value, dict):
        raise ConfigError(key, "expected a table")
    return value


def default_workers() -> int:
    """Worker count from the ``UWQKD_WORKERS`` environment variable, else 1."""
    raw = os.environ.get(WORKERS_ENV)
    if raw is None or raw.strip() == "":
        return 1
    try:
        workers = int(raw)
    except ValueError:
        raise ConfigError(WORKERS_ENV, f"expected an integer, got {raw!r}") from None
    _require(workers >= 1, WORKERS_ENV, "must be at least 1")
    return workers


_GEOMETRY_PARSERS: dict[SweepKey, Callable[[object], float]] = {
    SweepKey.DISTANCE: parse_length,
    SweepKey.APERTURE: parse_length,
    SweepKey.FOV: parse_angle,
    SweepKey.DEPTH: parse_length,
}


def config_from_mapping(data: Mapping[str, Any]) -> ExperimentConfig:
    """Validate a parsed document into an `ExperimentConfig`.

    Raises:
        ConfigError: On unknown keys, bad values, or more than one sweep.
    """
    _check_keys("", data, TOP_LEVEL_KEYS)
    values: dict[str, Any] = {}

    sweeps = [key for key in SweepKey if isinstance(data.get(key.value), list)]
    if len(sweeps) > 1:
        names = ", ".join(key.value for key in sweeps)
        raise ConfigError(names, "only one quantity may be swept per run")
    for key, parser in _GEOMETRY_PARSERS.items():
        if key.value not in data:
            continue
        raw = data[key.value]
        if isinstance(raw, list):
            swept = sorted(_convert(key.value, item, parser) for item in raw)
            values["sweep"] = key
            values["sweep_values"] = tuple(swept)
        else:
            values[key.value] = _convert(key.value, raw, parser)

    if "water" in data:
        try:
            values["water"] = WaterTypeName(str(data["water"]))
        except ValueError:
            known = ", ".join(w.value for w in WaterTypeName)
            raise ConfigError("water", f"unknown water type {data['water']!r} (known: {known})") from None
    if "wavelength" in data:
        values["wavelength"] = _convert("wavelength", data["wavelength"], parse_length)
    if "environment" in data:
        values["environments"] = _enum_list("environment", data["environment"], EnvironmentLabel)
    if "states" in data:
        values["states"] = _enum_list("states", data["states"], BB84Label)
    for key in ("photons", "seed", "max_events"):
        if key in data:
            values[key] = _integer(key, data[key])
    values["workers"] = _integer("workers", data["workers"]) if "workers" in data else default_workers()
    if "output" in data:
        if not isinstance(data["output"], str) or not data["output"]:
            raise ConfigError("output", "expected a file path")
        values["output"] = Path(data["output"])

    psd_table = _table(data, "psd")
    _check_keys("psd", psd_table, PSD_KEYS)
    psd_args = {
        key: _convert(f"psd.{key}", psd_table[key], parse_length)
        for key in ("dmin", "dmax", "d0")
        if key in psd_table
    }
    if "epsilon" in psd_table:
        psd_args["epsilon"] = _number("psd.epsilon", psd_table["epsilon"])
    try:
        values["psd"] = JungePSD(**psd_args)
    except ValueError as exc:
        raise ConfigError("psd", str(exc)) from None
    if "bins" in psd_table:
        values["psd_bins"] = _integer("psd.bins", psd_table["bins"])

    medium_table = _table(data, "medium")
    _check_keys("medium", medium_table, MEDIUM_KEYS)
    if "particle_index" in medium_table:
        try:
            values["particle_index"] = parse_complex_index(medium_table["particle_index"])
        except ValueError as exc:
            raise ConfigError("medium.particle_index", str(exc)) from None
    for key in ("n_water", "mu_d", "mu_a_water"):
        if key in medium_table:
            values[key] = _number(f"medium.{key}", medium_table[key])
    if "theta_points" in medium_table:
        values["theta_points"] = _integer("medium.theta_points", medium_table["theta_points"])

    link_table = _table(data, "link")
    _check_keys("link", link_table, LINK_KEYS)
    link_args: dict[str, float] = {"wavelength": values.get("wavelength", DEFAULT_WAVELENGTH)}
    for key in ("bit_period", "gate"):
        if key in link_table:
            link_args[key] = _convert(f"link.{key}", link_table[key], parse_time)
    for key in ("mean_photons", "detection_efficiency"):
        if key in link_table:
            link_args[key] = _number(f"link.{key}", link_table[key])
    try:
        values["link"] = LinkParams(**link_args)
    except ValueError as exc:
        raise ConfigError("link", str(exc)) from None

    return ExperimentConfig(**values)


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate a TOML configuration document.

    Args:
        text: The document; an empty string gives all defaults.

    Raises:
        ConfigError: On malformed TOML or invalid content.
    """
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError("<document>", f"malformed TOML: {exc}") from None
    return config_from_mapping(data)


def load_config(path: Path) -> ExperimentConfig:
    """Read and parse a configuration file."""
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(str(path), f"cannot read configuration: {exc.strerror or exc}") from None
    return parse_config(text)


__all__ = [
    "WORKERS_ENV",
    "ExperimentConfig",
    "config_from_mapping",
    "default_workers",
    "load_config",
    "parse_config",
]
