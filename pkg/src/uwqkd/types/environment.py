"""Ambient light environment labels."""

from enum import Enum


class EnvironmentLabel(str, Enum):
    """Sky conditions setting the surface irradiance."""

    FULL_MOON = "full-moon"
    STARLIGHT = "starlight"
    CLOUDY_NIGHT = "cloudy-night"
    NONE = "none"
    """No background light at all."""

    def __str__(self) -> str:
        """Return the environment value as a string."""
        return self.value
