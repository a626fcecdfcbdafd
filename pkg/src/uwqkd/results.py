"""Result rows and CSV emission.

Files start with ``#``-prefixed provenance lines (package version, preset,
seed, photon count, config hash, creation time) followed by an ordinary
CSV header and data. Floats are written with 17 significant digits so
every value re-parses to exactly the number that was computed.
"""

from __future__ import annotations

import csv
import logging
import math
import os
import tempfile
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from datetime import UTC, datetime
from pathlib import Path

from uwqkd import __version__
from uwqkd.config import ExperimentConfig
from uwqkd.types import BB84Label, SecurityVerdict

logger = logging.getLogger(__name__)

Cell = str | int | float | None


def format_cell(value: Cell) -> str:
    """Render one CSV cell; floats use 17 significant digits."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return format(value, ".17g")
    return value


@dataclass(frozen=True, kw_only=True)
class ResultRow:
    """One swept point of one series.

    ``qber`` is NaN and ``verdict`` None when the QBER is undefined (no
    signal and no errors); fidelities are NaN when no scattered photon
    was received.
    """

    sweep_key: str
    sweep_value: float | None
    water: str
    environment: str
    distance: float
    aperture: float
    fov: float
    depth: float
    launched: int
    received_ballistic: int
    received_scattered: int
    fidelity: dict[BB84Label, float] = field(default_factory=dict)
    signal_rate: float
    scatter_error_rate: float
    background_error_rate: float
    qber: float
    verdict: SecurityVerdict | None
    kappa: float
    se_received_ballistic: float
    se_received_scattered: float
    se_fidelity: dict[BB84Label, float] = field(default_factory=dict)
    se_signal_rate: float
    se_qber: float
    se_kappa: float

    def __post_init__(self) -> None:
        """Check the received counts against the launched total."""
        if self.received_ballistic + self.received_scattered > self.launched:
            raise ValueError("received counts exceed launched photons")

    @staticmethod
    def columns(states: Sequence[BB84Label]) -> list[str]:
        """Column names for rows carrying fidelities of ``states``."""
        return [
            "sweep_key",
            "sweep_value",
            "water",
            "environment",
            "distance_m",
            "aperture_m",
            "fov_rad",
            "depth_m",
            "launched",
            "received_ballistic",
            "received_scattered",
            *(f"fidelity_{s.value}" for s in states),
            "signal_rate",
            "scatter_error_rate",
            "background_error_rate",
            "qber",
            "verdict",
            "kappa",
            "se_received_ballistic",
            "se_received_scattered",
            *(f"se_fidelity_{s.value}" for s in states),
            "se_signal_rate",
            "se_qber",
            "se_kappa",
        ]

    def cells(self, states: Sequence[BB84Label]) -> list[Cell]:
        """Values in `columns` order."""
        return [
            self.sweep_key,
            self.sweep_value,
            self.water,
            self.environment,
            self.distance,
            self.aperture,
            self.fov,
            self.depth,
            self.launched,
            self.received_ballistic,
            self.received_scattered,
            *(self.fidelity.get(s, math.nan) for s in states),
            self.signal_rate,
            self.scatter_error_rate,
            self.background_error_rate,
            self.qber,
            None if self.verdict is None else self.verdict.value,
            self.kappa,
            self.se_received_ballistic,
            self.se_received_scattered,
            *(self.se_fidelity.get(s, math.nan) for s in states),
            self.se_signal_rate,
            self.se_qber,
            self.se_kappa,
        ]


def provenance(cfg: ExperimentConfig, *, timestamp: datetime | None = None) -> list[str]:
    """Header comment lines describing how a file was produced."""
    created = (timestamp or datetime.now(UTC)).isoformat(timespec="seconds")
    return [
        f"uwqkd {__version__}",
        f"preset: {cfg.preset or '-'}",
        f"seed: {cfg.seed}",
        f"photons: {cfg.photons}",
        f"config_hash: {cfg.config_hash()}",
        f"created: {created}",
    ]


def write_csv(
    path: Path,
    header: Iterable[str],
    columns: Sequence[str],
    records: Iterable[Sequence[Cell]],
) -> Path:
    """Write a commented CSV file atomically.

    The file is written next to ``path`` under a temporary name and moved
    into place only once complete; on any failure the temporary file is
    removed and ``path`` is left untouched.

    Args:
        path: Destination.
        header: Provenance lines, written with a ``# `` prefix.
        columns: Column names.
        records: Rows of cells in column order.

    Returns:
        The destination path.
    """
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    tmp = Path(tmp_name)
    count = 0
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            for line in header:
                handle.write(f"# {line}\n")
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(columns)
            for record in records:
                if len(record) != len(columns):
                    raise ValueError(f"row has {len(record)} cells, expected {len(columns)}")
                writer.writerow([format_cell(cell) for cell in record])
                count += 1
        os.replace(tmp, path)
    except BaseException:
        tmp.unlink(missing_ok=True)
        raise
    logger.info("wrote %d rows to %s", count, path)
    return path


def write_results(
    path: Path,
    rows: Iterable[ResultRow],
    configs: Sequence[ExperimentConfig],
    *,
    timestamp: datetime | None = None,
) -> Path:
    """Write experiment rows with the provenance of every config that produced them.

    The fidelity columns cover the union of the configs' prepared states.
    """
    if not configs:
        raise ValueError("at least one configuration is required for provenance")
    states = [s for s in BB84Label if any(s in cfg.states for cfg in configs)]
    header = provenance(configs[0], timestamp=timestamp)
    for index, cfg in enumerate(configs[1:], start=1):
        header.append(f"config_hash[{index}]: {cfg.config_hash()}")
    return write_csv(path, header, ResultRow.columns(states), (row.cells(states) for row in rows))


def read_data(path: Path) -> tuple[list[str], list[list[str]]]:
    """Read a results file back, skipping provenance lines.

    Returns:
        ``(columns, rows)`` as strings.
    """
    with path.open(encoding="utf-8", newline="") as handle:
        lines = [line for line in handle if not line.startswith("#")]
    reader = csv.reader(lines)
    columns = next(reader, [])
    return columns, list(reader)


__all__ = [
    "ResultRow",
    "format_cell",
    "provenance",
    "read_data",
    "write_csv",
    "write_results",
]
