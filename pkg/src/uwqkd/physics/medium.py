"""Seawater optical models.

Jerlov water types, the Junge particle size distribution, calibration of
the particle concentration against a water type's total extinction, and
ambient irradiance versus depth.

Example:
    ```python
    water = WaterType.named(WaterTypeName.JERLOV_I)
    optics = calibrate(water, JungePSD(), ComplexIndex.from_complex(PARTICLE_INDEX))
    optics.mu_e  # 0.03
    ```
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

from uwqkd.base.errors import CalibrationError
from uwqkd.constants import (
    DEFAULT_WAVELENGTH,
    DIFFUSE_ATTENUATION,
    JERLOV_EXTINCTION,
    N_WATER,
    PARTICLE_INDEX,
    PSD_D0,
    PSD_DMAX,
    PSD_DMIN,
    PSD_EPSILON,
    PURE_WATER_ABSORPTION,
    SURFACE_IRRADIANCE,
)
from uwqkd.physics.mie import ComplexIndex, bulk_coefficients
from uwqkd.types import EnvironmentLabel, WaterTypeName

logger = logging.getLogger(__name__)

SUM_TOLERANCE = 1e-9


@dataclass(frozen=True, kw_only=True)
class WaterType:
    """Bulk extinction of a named water type."""

    name: WaterTypeName
    mu_e: float
    """Total beam extinction, 1/m."""

    mu_a_water: float = PURE_WATER_ABSORPTION
    """Pure seawater absorption, 1/m."""

    def __post_init__(self) -> None:
        """Validate the coefficients."""
        if self.mu_e < 0 or self.mu_a_water < 0:
            raise ValueError("extinction and water absorption must be non-negative")

    @classmethod
    def named(cls, name: WaterTypeName | str, mu_a_water: float = PURE_WATER_ABSORPTION) -> WaterType:
        """Look up a water type in the embedded 480 nm table."""
        key = WaterTypeName(name)
        return cls(name=key, mu_e=JERLOV_EXTINCTION[key], mu_a_water=mu_a_water)


@dataclass(frozen=True, kw_only=True)
class JungePSD:
    """Truncated power-law (Junge) particle size distribution.

    ``N(D) = k * (D / d0) ** -epsilon`` on ``[dmin, dmax]``. Sampling and
    the bulk integrals only need the shape; ``k`` and ``d0`` set the
    absolute scale reported by `number_density`.
    """

    epsilon: float = PSD_EPSILON
    """Power-law slope, 3 to 5."""

    d0: float = PSD_D0
    """Reference diameter in metres."""

    dmin: float = PSD_DMIN
    dmax: float = PSD_DMAX
    k: float = 1.0
    """Number concentration at ``d0``."""

    def __post_init__(self) -> None:
        """Validate the distribution."""
        if not 3.0 <= self.epsilon <= 5.0:
            raise ValueError(f"epsilon must lie in [3, 5], got {self.epsilon}")
        if not 0 < self.dmin < self.dmax:
            raise ValueError(f"need 0 < dmin < dmax, got dmin={self.dmin}, dmax={self.dmax}")
        if self.d0 <= 0 or self.k < 0:
            raise ValueError("d0 must be positive and k non-negative")

    @property
    def _exponent(self) -> float:
        return 1.0 - self.epsilon

    def number_density(self, diameter: float) -> float:
        """Unnormalized ``N(D)``."""
        return self.k * (diameter / self.d0) ** -self.epsilon

    def pdf(self, diameter: float) -> float:
        """Normalized probability density over ``[dmin, dmax]``, 1/m."""
        if not self.dmin <= diameter <= self.dmax:
            return 0.0
        e = self._exponent
        norm = e / (self.dmax**e - self.dmin**e)
        return norm * diameter**-self.epsilon

    def cdf(self, diameter: float) -> float:
        """Cumulative probability of diameters at or below ``diameter``."""
        if diameter <= self.dmin:
            return 0.0
        if diameter >= self.dmax:
            return 1.0
        e = self._exponent
        lo = self.dmin**e
        return (diameter**e - lo) / (self.dmax**e - lo)


def sample_diameter(psd: JungePSD, u: float) -> float:
    """Invert the truncated power-law CDF.

    Args:
        psd: Size distribution.
        u: Uniform deviate in ``[0, 1]``.

    Returns:
        Diameter in metres; ``u = 0`` gives ``dmin`` and ``u = 1`` gives ``dmax``.
    """
    if u <= 0.0:
        return psd.dmin
    if u >= 1.0:
        return psd.dmax
    e = 1.0 - psd.epsilon
    lo = psd.dmin**e
    return (lo + u * (psd.dmax**e - lo)) ** (1.0 / e)


@dataclass(frozen=True, kw_only=True)
class WaterOptics:
    """Calibrated optical coefficients of a water body."""

    mu_m: float
    """Water (and dissolved matter) absorption, 1/m."""

    mu_s_p: float
    """Particle scattering, 1/m."""

    mu_a_p: float
    """Particle absorption, 1/m."""

    mu_e: float
    """Total extinction, 1/m."""

    psd: JungePSD = field(default_factory=JungePSD)
    particle_index: ComplexIndex = field(
        default_factory=lambda: ComplexIndex.from_complex(PARTICLE_INDEX).relative_to(N_WATER)
    )
    """Particle index relative to water."""

    wavelength: float = DEFAULT_WAVELENGTH
    n_medium: float = N_WATER
    concentration: float = 0.0
    """Particles per cubic metre."""

    def __post_init__(self) -> None:
        """Check the components are non-negative and add up."""
        if min(self.mu_m, self.mu_s_p, self.mu_a_p) < 0:
            raise ValueError("optical coefficients must be non-negative")
        total = self.mu_m + self.mu_a_p + self.mu_s_p
        if abs(total - self.mu_e) > SUM_TOLERANCE * max(1.0, self.mu_e):
            raise ValueError(f"mu_e={self.mu_e} does not equal the component sum {total}")

    @property
    def particle_albedo(self) -> float:
        """Fraction of particle interactions that scatter."""
        total = self.mu_s_p + self.mu_a_p
        return self.mu_s_p / total if total > 0 else 0.0


def calibrate(
    water: WaterType,
    psd: JungePSD,
    index: ComplexIndex,
    wavelength: float = DEFAULT_WAVELENGTH,
    *,
    n_medium: float = N_WATER,
) -> WaterOptics:
    """Solve for the particle concentration that reproduces ``water.mu_e``.

    Particle coefficients scale linearly with concentration and their
    ratio is fixed by the PSD-averaged Mie efficiencies, so the solution
    is a single division. CDOM and detritus are not modelled; water
    absorption is pure seawater only.

    Args:
        water: Target water type.
        psd: Particle size distribution.
        index: Particle index relative to water.
        wavelength: Vacuum wavelength in metres.
        n_medium: Real index of water.

    Raises:
        CalibrationError: If the target lies below pure-water absorption.
    """
    particle_target = water.mu_e - water.mu_a_water
    if particle_target < -SUM_TOLERANCE:
        raise CalibrationError(
            f"{water.name}: extinction {water.mu_e}/m is below water absorption "
            f"{water.mu_a_water}/m; no non-negative particle concentration fits"
        )
    if particle_target <= 0:
        return WaterOptics(
            mu_m=water.mu_a_water,
            mu_s_p=0.0,
            mu_a_p=0.0,
            mu_e=water.mu_a_water,
            psd=psd,
            particle_index=index,
            wavelength=wavelength,
            n_medium=n_medium,
        )

    sigma_s, sigma_a = bulk_coefficients(psd, 1.0, wavelength, index, n_medium)
    if sigma_s + sigma_a <= 0:
        raise CalibrationError(f"{water.name}: particles have zero cross section")
    concentration = particle_target / (sigma_s + sigma_a)
    mu_s_p, mu_a_p = concentration * sigma_s, concentration * sigma_a
    logger.info(
        "%s: %.4g particles/m^3, mu_s_p=%.5g/m, mu_a_p=%.5g/m",
        water.name,
        concentration,
        mu_s_p,
        mu_a_p,
    )
    return WaterOptics(
        mu_m=water.mu_a_water,
        mu_s_p=mu_s_p,
        mu_a_p=mu_a_p,
        mu_e=water.mu_a_water + mu_a_p + mu_s_p,
        psd=psd,
        particle_index=index,
        wavelength=wavelength,
        n_medium=n_medium,
        concentration=concentration,
    )


@dataclass(frozen=True, kw_only=True)
class Environment:
    """Ambient light above the water."""

    label: EnvironmentLabel
    surface_irradiance: float
    """Sea-level irradiance, W/m^2."""

    mu_d: float = DIFFUSE_ATTENUATION
    """Diffuse attenuation of downwelling irradiance, 1/m."""

    def __post_init__(self) -> None:
        """Validate the values."""
        if self.surface_irradiance < 0 or self.mu_d < 0:
            raise ValueError("irradiance and diffuse attenuation must be non-negative")

    @classmethod
    def named(cls, label: EnvironmentLabel | str, mu_d: float = DIFFUSE_ATTENUATION) -> Environment:
        """Look up an environment in the embedded irradiance table."""
        key = EnvironmentLabel(label)
        return cls(label=key, surface_irradiance=SURFACE_IRRADIANCE[key], mu_d=mu_d)


def irradiance_at_depth(env: Environment, z: float) -> float:
    """Downwelling irradiance at depth ``z`` metres, W/m^2."""
    if z < 0:
        raise ValueError(f"depth must be non-negative, got {z}")
    return env.surface_irradiance * math.exp(-env.mu_d * z)


def ballistic_transmission(mu_e: float, length: float) -> float:
    """Fraction of photons crossing ``length`` metres without any interaction."""
    if length < 0:
        raise ValueError(f"path length must be non-negative, got {length}")
    return math.exp(-mu_e * length)


__all__ = [
    "Environment",
    "JungePSD",
    "WaterOptics",
    "WaterType",
    "ballistic_transmission",
    "calibrate",
    "irradiance_at_depth",
    "sample_diameter",
]
