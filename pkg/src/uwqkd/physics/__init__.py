"""Optics of seawater and polarized photon transport."""

from uwqkd.physics.medium import (
    Environment,
    JungePSD,
    WaterOptics,
    WaterType,
    ballistic_transmission,
    calibrate,
    irradiance_at_depth,
    sample_diameter,
)
from uwqkd.physics.mie import (
    ComplexIndex,
    Efficiencies,
    MieTable,
    MieTableSet,
    MuellerElements,
    SizeParameter,
    efficiencies,
    mie_coefficients,
    mueller_elements,
    scattering_amplitudes,
    table_set,
)
from uwqkd.physics.polarization import (
    BB84_STATES,
    BB84State,
    EnsemblePolarization,
    MuellerMatrix,
    StokesVector,
    apply_mueller,
    fidelity,
    measurement_error_probability,
    rotation,
    scatter_chain,
)
from uwqkd.physics.transport import (
    PhotonOutcome,
    ReceiverGeometry,
    TransportTallies,
    propagate_photon,
    run_transport,
)

__all__ = [
    "BB84_STATES",
    "BB84State",
    "ComplexIndex",
    "Efficiencies",
    "EnsemblePolarization",
    "Environment",
    "JungePSD",
    "MieTable",
    "MieTableSet",
    "MuellerElements",
    "MuellerMatrix",
    "PhotonOutcome",
    "ReceiverGeometry",
    "SizeParameter",
    "StokesVector",
    "TransportTallies",
    "WaterOptics",
    "WaterType",
    "apply_mueller",
    "ballistic_transmission",
    "calibrate",
    "efficiencies",
    "fidelity",
    "irradiance_at_depth",
    "measurement_error_probability",
    "mie_coefficients",
    "mueller_elements",
    "propagate_photon",
    "rotation",
    "run_transport",
    "sample_diameter",
    "scatter_chain",
    "scattering_amplitudes",
    "table_set",
]
