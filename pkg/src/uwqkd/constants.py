"""Embedded physical constants and default tables.

Every default the simulator uses lives here so a configuration file can
override it by name.

Example:
    ```python
    from uwqkd.constants import JERLOV_EXTINCTION, PLANCK
    mu_e = JERLOV_EXTINCTION[WaterTypeName.JERLOV_I]
    ```
"""

from uwqkd.types import EnvironmentLabel, WaterTypeName

# CODATA exact values
PLANCK = 6.62607015e-34
SPEED_OF_LIGHT = 299_792_458.0

DEFAULT_WAVELENGTH = 480e-9

# Total beam extinction at 480 nm, 1/m
JERLOV_EXTINCTION: dict[WaterTypeName, float] = {
    WaterTypeName.JERLOV_I: 0.03,
    WaterTypeName.JERLOV_II: 0.18,
    WaterTypeName.JERLOV_III: 0.3,
}

# Pure seawater absorption at 480 nm, 1/m
PURE_WATER_ABSORPTION = 0.0176

# Sea-level irradiance over 400-700 nm, W/m^2
SURFACE_IRRADIANCE: dict[EnvironmentLabel, float] = {
    EnvironmentLabel.FULL_MOON: 1e-3,
    EnvironmentLabel.STARLIGHT: 1e-6,
    EnvironmentLabel.CLOUDY_NIGHT: 1e-7,
    EnvironmentLabel.NONE: 0.0,
}

# Diffuse attenuation of downwelling irradiance, Jerlov I at 480 nm, 1/m
DIFFUSE_ATTENUATION = 0.019

# Plankton index, n - ik sign convention; divided by N_WATER before Mie evaluation
PARTICLE_INDEX = complex(1.41, -0.00672)
N_WATER = 1.34

# Junge PSD defaults
PSD_EPSILON = 4.0
PSD_DMIN = 1e-6
PSD_DMAX = 2e-4
PSD_D0 = 1e-6
PSD_BINS = 48

# Mueller table resolution
THETA_POINTS = 1800

# Receiver and link defaults
DEFAULT_DISTANCE = 60.0
DEFAULT_APERTURE = 0.10
DEFAULT_FOV = 0.175
DEFAULT_DEPTH = 200.0
DEFAULT_PHOTONS = 1_000_000
DEFAULT_SEED = 20140301
MAX_SCATTER_EVENTS = 10_000

BIT_PERIOD = 35e-9
GATE_TIME = 200e-12
MEAN_PHOTONS = 0.1
DETECTION_EFFICIENCY = 1.0

# BB84 security thresholds (inclusive)
QBER_SOPHISTICATED = 0.10
QBER_INTERCEPT_RESEND = 0.25


__all__ = [
    "BIT_PERIOD",
    "DEFAULT_APERTURE",
    "DEFAULT_DEPTH",
    "DEFAULT_DISTANCE",
    "DEFAULT_FOV",
    "DEFAULT_PHOTONS",
    "DEFAULT_SEED",
    "DEFAULT_WAVELENGTH",
    "DETECTION_EFFICIENCY",
    "DIFFUSE_ATTENUATION",
    "GATE_TIME",
    "JERLOV_EXTINCTION",
    "MAX_SCATTER_EVENTS",
    "MEAN_PHOTONS",
    "N_WATER",
    "PARTICLE_INDEX",
    "PLANCK",
    "PSD_BINS",
    "PSD_D0",
    "PSD_DMAX",
    "PSD_DMIN",
    "PSD_EPSILON",
    "PURE_WATER_ABSORPTION",
    "QBER_INTERCEPT_RESEND",
    "QBER_SOPHISTICATED",
    "SPEED_OF_LIGHT",
    "SURFACE_IRRADIANCE",
    "THETA_POINTS",
]
