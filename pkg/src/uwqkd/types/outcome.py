"""Photon history outcomes."""

from enum import Enum


class PhotonOutcomeKind(str, Enum):
    """How a single photon history ended."""

    RECEIVED_BALLISTIC = "received-ballistic"
    RECEIVED_SCATTERED = "received-scattered"
    ABSORBED = "absorbed"
    LOST = "lost"
