"""Stokes-vector algebra and BB84 polarization states.

Stokes vectors follow the usual ``(I, Q, U, V)`` layout with ``Q`` the
horizontal/vertical component and ``U`` the diagonal one. A scattering
event is the rotation ``R(phi)`` into the scattering plane followed by the
sphere's Mueller matrix ``M(theta)``; a chain of events is applied left to
right in event order.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from uwqkd.base.errors import EmptyEnsembleError
from uwqkd.physics.mie import MuellerElements
from uwqkd.types import BB84Label

logger = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]

PURITY_TOLERANCE = 1e-9


@dataclass(frozen=True, slots=True)
class StokesVector:
    """Stokes parameters of a light beam or photon ensemble."""

    i: float
    q: float
    u: float
    v: float

    @property
    def polarized_intensity(self) -> float:
        """``sqrt(q^2 + u^2 + v^2)``."""
        return math.sqrt(self.q * self.q + self.u * self.u + self.v * self.v)

    @property
    def degree_of_polarization(self) -> float:
        """Polarized fraction, 1 for a pure state and 0 for unpolarized light."""
        if self.i <= 0:
            raise ValueError(f"degree of polarization needs positive intensity, got i={self.i}")
        return self.polarized_intensity / self.i

    @property
    def linear_polarization(self) -> float:
        """Linearly polarized fraction ``sqrt(q^2 + u^2) / i``."""
        if self.i <= 0:
            raise ValueError(f"linear polarization needs positive intensity, got i={self.i}")
        return math.hypot(self.q, self.u) / self.i

    def normalized(self) -> StokesVector:
        """Return the vector scaled to unit intensity."""
        if self.i <= 0:
            raise ValueError(f"cannot normalize a Stokes vector with i={self.i}")
        scale = 1.0 / self.i
        return StokesVector(1.0, self.q * scale, self.u * scale, self.v * scale)

    def bloch(self) -> tuple[float, float, float]:
        """Normalized polarization vector ``(q, u, v) / i``."""
        n = self.normalized()
        return n.q, n.u, n.v

    def is_pure(self, rtol: float = PURITY_TOLERANCE) -> bool:
        """True when ``q^2 + u^2 + v^2 = i^2`` within ``rtol``."""
        return abs(self.polarized_intensity - self.i) <= rtol * abs(self.i)

    def as_array(self) -> FloatArray:
        """The four parameters as a numpy array."""
        return np.array([self.i, self.q, self.u, self.v], dtype=np.float64)

    @classmethod
    def from_array(cls, values: Sequence[float] | FloatArray) -> StokesVector:
        """Build from any four-element sequence."""
        if len(values) != 4:
            raise ValueError(f"a Stokes vector has four components, got {len(values)}")
        return cls(float(values[0]), float(values[1]), float(values[2]), float(values[3]))


UNPOLARIZED = StokesVector(1.0, 0.0, 0.0, 0.0)


@dataclass(frozen=True, eq=False)
class MuellerMatrix:
    """A 4x4 real Mueller matrix."""

    matrix: FloatArray

    def __post_init__(self) -> None:
        """Validate the shape and freeze the array."""
        if self.matrix.shape != (4, 4):
            raise ValueError(f"a Mueller matrix is 4x4, got shape {self.matrix.shape}")
        self.matrix.setflags(write=False)

    @classmethod
    def identity(cls) -> MuellerMatrix:
        """The identity matrix."""
        return cls(np.eye(4))

    @classmethod
    def from_elements(cls, elements: MuellerElements) -> MuellerMatrix:
        """Build a sphere's block-diagonal matrix from m1..m4."""
        m1, m2, m3, m4 = elements.m1, elements.m2, elements.m3, elements.m4
        return cls(
            np.array(
                [
                    [m1, m2, 0.0, 0.0],
                    [m2, m1, 0.0, 0.0],
                    [0.0, 0.0, m3, m4],
                    [0.0, 0.0, -m4, m3],
                ],
                dtype=np.float64,
            )
        )

    def __matmul__(self, other: MuellerMatrix) -> MuellerMatrix:
        return MuellerMatrix(self.matrix @ other.matrix)


def rotation(phi: float) -> MuellerMatrix:
    """Rotate the Stokes reference plane by ``phi`` radians.

    Only ``2 phi`` enters, so the matrix has period pi.
    """
    c, s = math.cos(2.0 * phi), math.sin(2.0 * phi)
    return MuellerMatrix(
        np.array(
            [
                [1.0, 0.0, 0.0, 0.0],
                [0.0, c, s, 0.0],
                [0.0, -s, c, 0.0],
                [0.0, 0.0, 0.0, 1.0],
            ],
            dtype=np.float64,
        )
    )


def apply_mueller(mat: MuellerMatrix, s: StokesVector) -> StokesVector:
    """Matrix-vector product ``mat @ s``, without renormalization."""
    return StokesVector.from_array(mat.matrix @ s.as_array())


def scatter_once(s: StokesVector, phi: float, elements: MuellerElements) -> StokesVector:
    """Apply ``M(theta) R(phi)`` to ``s`` in closed form.

    Equivalent to ``apply_mueller(from_elements(e) @ rotation(phi), s)``
    without building either matrix.
    """
    c, sn = math.cos(2.0 * phi), math.sin(2.0 * phi)
    q = c * s.q + sn * s.u
    u = -sn * s.q + c * s.u
    m1, m2, m3, m4 = elements.m1, elements.m2, elements.m3, elements.m4
    return StokesVector(
        m1 * s.i + m2 * q,
        m2 * s.i + m1 * q,
        m3 * u + m4 * s.v,
        -m4 * u + m3 * s.v,
    )


def scatter_chain(
    s0: StokesVector, events: Iterable[tuple[float, float, MuellerElements]]
) -> StokesVector:
    """Apply a sequence of scattering events to ``s0``.

    Args:
        s0: Incident Stokes vector.
        events: ``(theta, phi, elements)`` per event, first to last. The
            elements already belong to ``theta``; both angles are logged at
            debug level.

    Returns:
        ``M(theta_n) R(phi_n) ... M(theta_1) R(phi_1) s0``, not renormalized.
    """
    s = s0
    for k, (theta, phi, elements) in enumerate(events):
        s = scatter_once(s, phi, elements)
        logger.debug("event %d: theta=%.6g phi=%.6g intensity=%.6g", k, theta, phi, s.i)
    return s


@dataclass(frozen=True)
class BB84State:
    """One of the four BB84 polarization states."""

    label: BB84Label
    stokes: StokesVector

    @property
    def bloch(self) -> tuple[float, float, float]:
        """Unit polarization vector of the state."""
        return self.stokes.bloch()

    @property
    def basis(self) -> str:
        """``"rectilinear"`` for H/V, ``"diagonal"`` for P/M."""
        return "rectilinear" if self.label in (BB84Label.H, BB84Label.V) else "diagonal"

    @property
    def antipode(self) -> BB84State:
        """The orthogonal state of the same basis."""
        return BB84_STATES[_ANTIPODES[self.label]]


BB84_STATES: dict[BB84Label, BB84State] = {
    BB84Label.H: BB84State(BB84Label.H, StokesVector(1.0, 1.0, 0.0, 0.0)),
    BB84Label.V: BB84State(BB84Label.V, StokesVector(1.0, -1.0, 0.0, 0.0)),
    BB84Label.P: BB84State(BB84Label.P, StokesVector(1.0, 0.0, 1.0, 0.0)),
    BB84Label.M: BB84State(BB84Label.M, StokesVector(1.0, 0.0, -1.0, 0.0)),
}

_ANTIPODES = {
    BB84Label.H: BB84Label.V,
    BB84Label.V: BB84Label.H,
    BB84Label.P: BB84Label.M,
    BB84Label.M: BB84Label.P,
}


def bb84_state(label: BB84Label | str) -> BB84State:
    """Look up a BB84 state by label."""
    return BB84_STATES[BB84Label(label)]


@dataclass(frozen=True, kw_only=True)
class EnsemblePolarization:
    """Sums of normalized Stokes vectors over a photon ensemble.

    First moments give the mean polarization vector; the second moments
    are kept so the standard error of any projection can be reported.
    """

    count: int = 0
    sums: tuple[float, float, float] = (0.0, 0.0, 0.0)
    """``(sum q, sum u, sum v)`` of normalized vectors."""

    second_moments: tuple[tuple[float, float, float], ...] = field(
        default=((0.0, 0.0, 0.0), (0.0, 0.0, 0.0), (0.0, 0.0, 0.0))
    )
    """3x3 sum of outer products of the normalized vectors."""

    def __post_init__(self) -> None:
        """Validate the count."""
        if self.count < 0:
            raise ValueError(f"count must be non-negative, got {self.count}")

    @classmethod
    def from_vectors(cls, vectors: FloatArray) -> EnsemblePolarization:
        """Build from an ``(n, 3)`` array of normalized polarization vectors."""
        data = np.asarray(vectors, dtype=np.float64).reshape(-1, 3)
        outer = data.T @ data
        return cls(
            count=int(data.shape[0]),
            sums=(float(data[:, 0].sum()), float(data[:, 1].sum()), float(data[:, 2].sum())),
            second_moments=tuple(
                (float(row[0]), float(row[1]), float(row[2])) for row in outer
            ),
        )

    def merge(self, other: EnsemblePolarization) -> EnsemblePolarization:
        """Exact sum of two ensembles (left operand first)."""
        return EnsemblePolarization(
            count=self.count + other.count,
            sums=(
                self.sums[0] + other.sums[0],
                self.sums[1] + other.sums[1],
                self.sums[2] + other.sums[2],
            ),
            second_moments=tuple(
                (a[0] + b[0], a[1] + b[1], a[2] + b[2])
                for a, b in zip(self.second_moments, other.second_moments, strict=True)
            ),
        )

    def mean(self) -> tuple[float, float, float]:
        """Mean normalized polarization ``(q, u, v)``.

        Raises:
            EmptyEnsembleError: If the ensemble holds no photons.
        """
        if self.count == 0:
            raise EmptyEnsembleError("mean polarization of an empty ensemble is undefined")
        return (
            self.sums[0] / self.count,
            self.sums[1] / self.count,
            self.sums[2] / self.count,
        )

    def projection_variance(self, direction: tuple[float, float, float]) -> float:
        """Sample variance of ``direction . s`` over the ensemble."""
        if self.count == 0:
            raise EmptyEnsembleError("variance of an empty ensemble is undefined")
        b = np.asarray(direction, dtype=np.float64)
        mean = np.asarray(self.mean(), dtype=np.float64)
        second = np.asarray(self.second_moments, dtype=np.float64) / self.count
        return max(float(b @ second @ b - (b @ mean) ** 2), 0.0)


def _dot(a: tuple[float, float, float], b: tuple[float, float, float]) -> float:
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def fidelity(psi: BB84State, ens: EnsemblePolarization) -> float:
    """Fidelity of a pure BB84 state with the ensemble's density operator.

    The ensemble is the qubit ``rho = (1 + s . sigma) / 2`` with ``s`` the
    mean normalized polarization, so ``F = sqrt((1 + b . s) / 2)``.

    Raises:
        EmptyEnsembleError: If the ensemble is empty.
    """
    overlap = 0.5 * (1.0 + _dot(psi.bloch, ens.mean()))
    return math.sqrt(min(max(overlap, 0.0), 1.0))


def fidelity_standard_error(psi: BB84State, ens: EnsemblePolarization) -> float:
    """First-order standard error of `fidelity` from the ensemble spread.

    Undefined (NaN) at zero fidelity, where the square root has no slope.
    """
    f = fidelity(psi, ens)
    spread = math.sqrt(ens.projection_variance(psi.bloch) / ens.count)
    if f == 0.0:
        return math.nan
    return spread / (4.0 * f)


def measurement_error_probability(
    prepared: BB84State, received: tuple[float, float, float]
) -> float:
    """Probability a matched-basis measurement returns the wrong bit.

    Args:
        prepared: State the sender prepared.
        received: Normalized polarization vector of the received photon.

    Returns:
        ``(1 - b . s) / 2``.

    Raises:
        ValueError: If ``received`` is longer than unit length.
    """
    norm = math.sqrt(_dot(received, received))
    if norm > 1.0 + PURITY_TOLERANCE:
        raise ValueError(f"received polarization vector has length {norm} > 1")
    return min(max(0.5 * (1.0 - _dot(prepared.bloch, received)), 0.0), 1.0)


__all__ = [
    "BB84_STATES",
    "UNPOLARIZED",
    "BB84State",
    "EnsemblePolarization",
    "MuellerMatrix",
    "StokesVector",
    "apply_mueller",
    "bb84_state",
    "fidelity",
    "fidelity_standard_error",
    "measurement_error_probability",
    "rotation",
    "scatter_chain",
    "scatter_once",
]
