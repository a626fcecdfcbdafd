"""Water type definitions."""

from enum import Enum


class WaterTypeName(str, Enum):
    """Jerlov oceanic water types covered by the embedded tables."""

    JERLOV_I = "jerlov-i"
    """Clearest open-ocean water."""

    JERLOV_II = "jerlov-ii"
    """Intermediate water."""

    JERLOV_III = "jerlov-iii"
    """Murky water."""

    def __str__(self) -> str:
        """Return the water type value as a string."""
        return self.value
