"""BB84 state labels."""

from enum import Enum


class BB84Label(str, Enum):
    """Linear polarization states of the two BB84 bases."""

    H = "H"
    """Horizontal, 0 degrees."""

    V = "V"
    """Vertical, 90 degrees."""

    P = "P"
    """Diagonal, 45 degrees."""

    M = "M"
    """Anti-diagonal, 135 degrees."""

    def __str__(self) -> str:
        """Return the label value as a string."""
        return self.value
