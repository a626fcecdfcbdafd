"""Type definitions and enums."""

from enum import Enum

from uwqkd.types.environment import EnvironmentLabel
from uwqkd.types.outcome import PhotonOutcomeKind
from uwqkd.types.states import BB84Label
from uwqkd.types.verdict import SecurityVerdict
from uwqkd.types.water import WaterTypeName


class SweepKey(str, Enum):
    """Quantities an experiment may sweep."""

    DISTANCE = "distance"
    APERTURE = "aperture"
    FOV = "fov"
    DEPTH = "depth"


__all__ = [
    "BB84Label",
    "EnvironmentLabel",
    "PhotonOutcomeKind",
    "SecurityVerdict",
    "SweepKey",
    "WaterTypeName",
]
