"""Underwater free-space QKD channel simulator.

Polarized-photon Monte Carlo transport through Mie-scattering seawater,
plus the BB84 link budget (QBER, security verdict, sifted key rate) built
on top of the simulated received fractions.
"""

__version__ = "0.3.0"
__author__ = "Jian"

__all__ = [
    "__version__",
]
