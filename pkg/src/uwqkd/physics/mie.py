"""Mie scattering by homogeneous spheres.

Series coefficients, scattering amplitudes, Mueller elements and
efficiency factors for a single sphere, the PSD-integrated bulk
coefficients of a particle population, and the precomputed per-diameter
Mueller tables the transport loop samples from.

Conventions:
    * Indices are relative to the surrounding water and the size parameter
      uses the wavelength in water, ``x = pi * D * n_water / lambda``.
    * `ComplexIndex` stores the imaginary part as a non-negative
      ``absorption`` magnitude. The series itself runs in the ``n + ik``
      convention; `ComplexIndex.series_value` is the only place the sign
      is chosen.
    * ``m2 = (|S2|^2 - |S1|^2) / 2`` so that unpolarized light scattered by
      a small sphere has degree of polarization ``-m2/m1 > 0`` at 90 degrees,
      and ``m4 = Im(S2 * conj(S1))`` fills the lower block as
      ``[[m3, m4], [-m4, m3]]``.
"""

from __future__ import annotations

import bisect
import functools
import logging
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any, TypeVar

import numpy as np
from numpy.typing import NDArray
from scipy import integrate

from uwqkd.base.errors import MieError, QuadratureError
from uwqkd.constants import N_WATER, THETA_POINTS

if TYPE_CHECKING:
    from uwqkd.physics.medium import JungePSD

logger = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]
ComplexArray = NDArray[np.complex128]
_ArrayT = TypeVar("_ArrayT", bound=NDArray[Any])

QUADRATURE_RTOL = 1e-6
QUADRATURE_LIMIT = 2000


@dataclass(frozen=True, kw_only=True)
class ComplexIndex:
    """Complex refractive index of a particle.

    Example:
        >>> ComplexIndex.from_complex(1.41 - 0.00672j).relative_to(1.34)
    """

    real: float
    """Real part, strictly positive."""

    absorption: float = 0.0
    """Magnitude of the imaginary part; zero for a lossless particle."""

    def __post_init__(self) -> None:
        """Validate the index."""
        if not (math.isfinite(self.real) and self.real > 0):
            raise ValueError(f"real part of the index must be positive, got {self.real}")
        if not (math.isfinite(self.absorption) and self.absorption >= 0):
            raise ValueError(f"absorption must be a non-negative magnitude, got {self.absorption}")

    @classmethod
    def from_complex(cls, value: complex) -> ComplexIndex:
        """Build from a complex number written in either sign convention."""
        return cls(real=value.real, absorption=abs(value.imag))

    @property
    def imag(self) -> float:
        """Imaginary part in the ``n - ik`` convention (never positive)."""
        return -self.absorption

    @property
    def value(self) -> complex:
        """The index as ``n - ik``."""
        return complex(self.real, -self.absorption)

    @property
    def series_value(self) -> complex:
        """The index as ``n + ik``, the form the Mie recurrences expect."""
        return complex(self.real, self.absorption)

    def relative_to(self, n_medium: float) -> ComplexIndex:
        """Return this index relative to a real medium index."""
        if n_medium <= 0:
            raise ValueError(f"medium index must be positive, got {n_medium}")
        return ComplexIndex(real=self.real / n_medium, absorption=self.absorption / n_medium)


@dataclass(frozen=True, kw_only=True)
class SizeParameter:
    """Size parameter of a sphere in water."""

    diameter: float
    """Particle diameter in metres."""

    wavelength: float
    """Vacuum wavelength in metres."""

    n_medium: float = N_WATER
    """Real index of the surrounding medium."""

    def __post_init__(self) -> None:
        """Validate the inputs."""
        if self.diameter <= 0 or self.wavelength <= 0 or self.n_medium <= 0:
            raise ValueError("diameter, wavelength and medium index must all be positive")

    @property
    def x(self) -> float:
        """Dimensionless size parameter ``pi * D * n_medium / lambda``."""
        return math.pi * self.diameter * self.n_medium / self.wavelength


@dataclass(frozen=True)
class MieAngular:
    """Scattering amplitudes at one angle."""

    s1: complex
    """Perpendicular amplitude."""

    s2: complex
    """Parallel amplitude."""

    theta: float
    """Scattering angle in radians."""


@dataclass(frozen=True)
class MuellerElements:
    """The four independent elements of a sphere's Mueller matrix."""

    m1: float
    m2: float
    m3: float
    m4: float

    @classmethod
    def from_amplitudes(cls, s1: complex, s2: complex) -> MuellerElements:
        """Build the elements from the two scattering amplitudes."""
        p1 = s1.real * s1.real + s1.imag * s1.imag
        p2 = s2.real * s2.real + s2.imag * s2.imag
        s21 = s2 * s1.conjugate()
        return cls(0.5 * (p2 + p1), 0.5 * (p2 - p1), s21.real, s21.imag)

    def degree_of_polarization(self) -> float:
        """Linear polarization produced from unpolarized light, ``-m2/m1``."""
        return -self.m2 / self.m1


@dataclass(frozen=True)
class Efficiencies:
    """Efficiency factors of one sphere."""

    q_ext: float
    q_sca: float
    q_abs: float
    q_back: float = 0.0
    """Backscatter efficiency."""

    g: float = 0.0
    """Asymmetry parameter, mean cosine of the scattering angle."""


def _as_x(x: float | SizeParameter) -> float:
    value = x.x if isinstance(x, SizeParameter) else float(x)
    if not (math.isfinite(value) and value > 0):
        raise ValueError(f"size parameter must be positive and finite, got {value}")
    return value


def truncation_order(x: float) -> int:
    """Number of series terms kept for size parameter ``x``."""
    return math.ceil(x + 4.0 * x ** (1.0 / 3.0) + 2.0)


def _series_coefficients(x: float, m: complex) -> tuple[ComplexArray, ComplexArray]:
    nstop = truncation_order(x)
    mx = m * x
    nmx = max(nstop, math.ceil(abs(mx))) + 16

    # Logarithmic derivative D_n(mx), downward from D_nmx = 0
    log_der = [0j] * (nmx + 1)
    for n in range(nmx, 0, -1):
        ratio = n / mx
        log_der[n - 1] = ratio - 1.0 / (log_der[n] + ratio)

    # Riccati-Bessel psi_n(x), chi_n(x), upward from n = -1, 0
    psi = [0.0] * (nstop + 1)
    chi = [0.0] * (nstop + 1)
    psi_prev, psi[0] = math.cos(x), math.sin(x)
    chi_prev, chi[0] = -math.sin(x), math.cos(x)
    for n in range(1, nstop + 1):
        factor = (2 * n - 1) / x
        psi[n] = factor * psi[n - 1] - psi_prev
        chi[n] = factor * chi[n - 1] - chi_prev
        psi_prev, chi_prev = psi[n - 1], chi[n - 1]

    with np.errstate(all="ignore"):
        order = np.arange(1, nstop + 1, dtype=np.float64)
        d_n = np.asarray(log_der[1 : nstop + 1], dtype=np.complex128)
        psi_arr = np.asarray(psi, dtype=np.float64)
        xi_arr = psi_arr - 1j * np.asarray(chi, dtype=np.float64)
        psi_n, psi_nm1 = psi_arr[1:], psi_arr[:-1]
        xi_n, xi_nm1 = xi_arr[1:], xi_arr[:-1]

        ta = d_n / m + order / x
        tb = d_n * m + order / x
        a = (ta * psi_n - psi_nm1) / (ta * xi_n - xi_nm1)
        b = (tb * psi_n - psi_nm1) / (tb * xi_n - xi_nm1)

    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise MieError(x, m, "non-finite series coefficient (recurrence overflow)")
    return a, b


def mie_coefficients(
    x: float | SizeParameter, m: ComplexIndex
) -> tuple[ComplexArray, ComplexArray]:
    """Compute the external Mie coefficients.

    Args:
        x: Size parameter.
        m: Index relative to the medium.

    Returns:
        Arrays ``(a, b)`` of length ``ceil(x + 4 x^(1/3) + 2)``, entry ``k``
        holding order ``n = k + 1``.

    Raises:
        MieError: If a recurrence overflows.
    """
    return _series_coefficients(_as_x(x), m.series_value)


def _amplitudes(a: ComplexArray, b: ComplexArray, mu: FloatArray) -> tuple[ComplexArray, ComplexArray]:
    s1 = np.zeros(mu.shape, dtype=np.complex128)
    s2 = np.zeros(mu.shape, dtype=np.complex128)
    pi_prev = np.zeros(mu.shape, dtype=np.float64)
    pi_cur = np.ones(mu.shape, dtype=np.float64)
    for k in range(a.shape[0]):
        n = k + 1
        tau = n * mu * pi_cur - (n + 1) * pi_prev
        fn = (2 * n + 1) / (n * (n + 1))
        s1 += fn * (a[k] * pi_cur + b[k] * tau)
        s2 += fn * (a[k] * tau + b[k] * pi_cur)
        pi_prev, pi_cur = pi_cur, ((2 * n + 1) * mu * pi_cur - (n + 1) * pi_prev) / n
    return s1, s2


def _check_theta(theta: float) -> None:
    if not 0.0 <= theta <= math.pi:
        raise ValueError(f"scattering angle must lie in [0, pi], got {theta}")


def scattering_amplitudes(x: float | SizeParameter, m: ComplexIndex, theta: float) -> MieAngular:
    """Compute the scattering amplitudes S1, S2 at one angle.

    Args:
        x: Size parameter.
        m: Index relative to the medium.
        theta: Scattering angle in radians, within ``[0, pi]``.
    """
    _check_theta(theta)
    a, b = mie_coefficients(x, m)
    s1, s2 = _amplitudes(a, b, np.array([math.cos(theta)]))
    return MieAngular(complex(s1[0]), complex(s2[0]), theta)


def mueller_elements(x: float | SizeParameter, m: ComplexIndex, theta: float) -> MuellerElements:
    """Compute m1..m4 at one angle."""
    angular = scattering_amplitudes(x, m, theta)
    return MuellerElements.from_amplitudes(angular.s1, angular.s2)


def efficiencies(x: float | SizeParameter, m: ComplexIndex) -> Efficiencies:
    """Compute the efficiency factors of one sphere.

    ``q_abs`` is the difference ``q_ext - q_sca``; a negative difference
    within 1e-12 is rounding and is clamped to zero by setting
    ``q_sca = q_ext``.

    Raises:
        MieError: If the series overflows or the absorption comes out
            clearly negative.
    """
    xv = _as_x(x)
    a, b = mie_coefficients(xv, m)
    n = np.arange(1, a.shape[0] + 1, dtype=np.float64)
    weight = 2.0 * n + 1.0
    scale = 2.0 / (xv * xv)

    q_ext = float(scale * np.sum(weight * (a.real + b.real)))
    q_sca = float(scale * np.sum(weight * (np.abs(a) ** 2 + np.abs(b) ** 2)))
    q_abs = q_ext - q_sca
    if q_abs < 0.0:
        if q_abs < -1e-12 * max(1.0, q_ext):
            raise MieError(xv, m.series_value, f"negative absorption efficiency {q_abs}")
        q_abs = 0.0
        q_sca = q_ext

    sign = np.where(n % 2 == 1, -1.0, 1.0)
    q_back = float(abs(np.sum(weight * sign * (a - b))) ** 2 / (xv * xv))

    g = 0.0
    if q_sca > 0.0:
        cross = np.sum(weight / (n * (n + 1.0)) * (a * b.conj()).real)
        nn = n[:-1]
        adjacent = np.sum(
            nn * (nn + 2.0) / (nn + 1.0) * (a[:-1] * a[1:].conj() + b[:-1] * b[1:].conj()).real
        )
        g = float(4.0 / (xv * xv * q_sca) * (adjacent + cross))
    return Efficiencies(q_ext, q_sca, q_abs, q_back, g)


def phase_function(x: float | SizeParameter, m: ComplexIndex, theta: float) -> float:
    """Single-sphere phase function ``m1 / (pi x^2 q_sca)``, unit integral over 4 pi."""
    xv = _as_x(x)
    elements = mueller_elements(xv, m, theta)
    return elements.m1 / (math.pi * xv * xv * efficiencies(xv, m).q_sca)


@functools.lru_cache(maxsize=64)
def _mean_cross_sections(
    psd: JungePSD, wavelength: float, m: ComplexIndex, n_medium: float
) -> tuple[float, float]:
    """PSD-averaged scattering and absorption cross sections per particle."""

    def integrand(log_d: float) -> FloatArray:
        diameter = math.exp(log_d)
        eff = efficiencies(SizeParameter(diameter=diameter, wavelength=wavelength, n_medium=n_medium), m)
        geometric = 0.25 * math.pi * diameter * diameter
        weight = psd.pdf(diameter) * diameter * geometric
        return np.array([weight * eff.q_sca, weight * eff.q_abs])

    result, _, info = integrate.quad_vec(
        integrand,
        math.log(psd.dmin),
        math.log(psd.dmax),
        epsabs=0.0,
        epsrel=QUADRATURE_RTOL,
        limit=QUADRATURE_LIMIT,
        full_output=True,
    )
    if not info.success:
        raise QuadratureError(
            "PSD-weighted Mie cross section integral N(D) * (pi D^2 / 4) * Q(D) over "
            f"[{psd.dmin}, {psd.dmax}] m did not reach rtol {QUADRATURE_RTOL} "
            f"after {info.neval} evaluations"
        )
    sigma_s, sigma_a = (float(v) for v in result)
    logger.debug("mean cross sections: scattering %.6g m^2, absorption %.6g m^2", sigma_s, sigma_a)
    return sigma_s, sigma_a


def bulk_coefficients(
    psd: JungePSD,
    concentration: float,
    wavelength: float,
    m: ComplexIndex,
    n_medium: float = N_WATER,
) -> tuple[float, float]:
    """Particle scattering and absorption coefficients of a population.

    Args:
        psd: Size distribution of the particles.
        concentration: Number of particles per cubic metre.
        wavelength: Vacuum wavelength in metres.
        m: Particle index relative to the medium.
        n_medium: Real index of the medium.

    Returns:
        ``(mu_s, mu_a)`` in 1/m.

    Raises:
        QuadratureError: If the size integral does not converge.
    """
    if concentration < 0:
        raise ValueError(f"concentration must be non-negative, got {concentration}")
    if concentration == 0:
        return 0.0, 0.0
    sigma_s, sigma_a = _mean_cross_sections(psd, wavelength, m, n_medium)
    return concentration * sigma_s, concentration * sigma_a


def _readonly(array: _ArrayT) -> _ArrayT:
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class MieTable:
    """Mueller elements of one sphere on a uniform theta grid.

    Amplitudes are stored alongside m1..m4: `elements` interpolates S1 and
    S2 and rebuilds the Mueller elements from them, so an interpolated
    event still maps pure states to pure states. `density` interpolates
    m1 and m2 directly, which is all the angle sampler needs.
    """

    diameter: float
    x: float
    theta: FloatArray
    s1: ComplexArray
    s2: ComplexArray
    m1: FloatArray
    m2: FloatArray
    m3: FloatArray
    m4: FloatArray
    m1_mean: float
    """Mean of m1 over cos(theta) in [-1, 1]."""

    @property
    def step(self) -> float:
        """Grid spacing in radians."""
        return float(self.theta[1] - self.theta[0])

    def amplitudes(self, theta: float) -> tuple[complex, complex]:
        """Linearly interpolated (S1, S2) at ``theta``."""
        last = self.theta.shape[0] - 2
        pos = theta / self.step
        j = min(max(int(pos), 0), last)
        frac = pos - j
        s1a, s1b = complex(self.s1[j]), complex(self.s1[j + 1])
        s2a, s2b = complex(self.s2[j]), complex(self.s2[j + 1])
        return s1a + (s1b - s1a) * frac, s2a + (s2b - s2a) * frac

    def elements(self, theta: float) -> MuellerElements:
        """Mueller elements at ``theta`` from interpolated amplitudes."""
        s1, s2 = self.amplitudes(theta)
        return MuellerElements.from_amplitudes(s1, s2)

    def density(self, theta: FloatArray) -> tuple[FloatArray, FloatArray]:
        """Linearly interpolated (m1, m2) at an array of angles."""
        return np.interp(theta, self.theta, self.m1), np.interp(theta, self.theta, self.m2)

    def envelope(self, linear_polarization: float) -> float:
        """Rejection envelope ``max(m1 + |m2| * p)`` for linear polarization ``p``."""
        return float(np.max(self.m1 + np.abs(self.m2) * linear_polarization))


def build_table(
    x: float, m: ComplexIndex, *, diameter: float = 0.0, points: int = THETA_POINTS
) -> MieTable:
    """Tabulate one sphere on ``points`` equally spaced angles over ``[0, pi]``."""
    if points < 2:
        raise ValueError(f"a table needs at least two angles, got {points}")
    a, b = mie_coefficients(x, m)
    theta = np.linspace(0.0, math.pi, points)
    mu = np.cos(theta)
    mu[0], mu[-1] = 1.0, -1.0
    s1, s2 = _amplitudes(a, b, mu)
    p1 = np.abs(s1) ** 2
    p2 = np.abs(s2) ** 2
    s21 = s2 * s1.conj()
    m1 = 0.5 * (p2 + p1)
    # Fine trapezoid in theta of m1 * sin(theta), halved: mean over cos(theta)
    m1_mean = 0.5 * float(integrate.trapezoid(m1 * np.sin(theta), theta))
    return MieTable(
        diameter=diameter,
        x=float(x),
        theta=_readonly(theta),
        s1=_readonly(s1),
        s2=_readonly(s2),
        m1=_readonly(m1),
        m2=_readonly(0.5 * (p2 - p1)),
        m3=_readonly(np.ascontiguousarray(s21.real)),
        m4=_readonly(np.ascontiguousarray(s21.imag)),
        m1_mean=m1_mean,
    )


@dataclass(frozen=True, eq=False)
class MieTableSet:
    """One `MieTable` per log-spaced diameter bin of a PSD."""

    edges: tuple[float, ...]
    """Bin edges in metres, ``len(tables) + 1`` of them."""

    tables: tuple[MieTable, ...]
    weights: tuple[float, ...]
    """PSD probability mass of each bin."""

    def select(self, diameter: float) -> MieTable:
        """Table of the bin containing ``diameter``."""
        index = bisect.bisect_right(self.edges, diameter) - 1
        return self.tables[min(max(index, 0), len(self.tables) - 1)]


@functools.lru_cache(maxsize=16)
def table_set(
    psd: JungePSD,
    wavelength: float,
    m: ComplexIndex,
    n_medium: float = N_WATER,
    bins: int = 48,
    points: int = THETA_POINTS,
) -> MieTableSet:
    """Build (once) the Mueller tables for a particle population.

    Args:
        psd: Size distribution; sets the diameter range and bin weights.
        wavelength: Vacuum wavelength in metres.
        m: Particle index relative to the medium.
        n_medium: Real index of the medium.
        bins: Number of log-spaced diameter bins.
        points: Angles per table.
    """
    if bins < 1:
        raise ValueError(f"need at least one diameter bin, got {bins}")
    edges = np.geomspace(psd.dmin, psd.dmax, bins + 1)
    tables = []
    for lo, hi in zip(edges[:-1], edges[1:], strict=True):
        center = math.sqrt(lo * hi)
        size = SizeParameter(diameter=center, wavelength=wavelength, n_medium=n_medium)
        tables.append(build_table(size.x, m, diameter=center, points=points))
    weights = tuple(psd.cdf(float(hi)) - psd.cdf(float(lo)) for lo, hi in zip(edges[:-1], edges[1:], strict=True))
    logger.info(
        "built %d Mueller tables, x from %.3g to %.3g, %d angles each",
        bins,
        tables[0].x,
        tables[-1].x,
        points,
    )
    return MieTableSet(edges=tuple(float(e) for e in edges), tables=tuple(tables), weights=weights)


__all__ = [
    "ComplexIndex",
    "Efficiencies",
    "MieAngular",
    "MieTable",
    "MieTableSet",
    "MuellerElements",
    "SizeParameter",
    "build_table",
    "bulk_coefficients",
    "efficiencies",
    "mie_coefficients",
    "mueller_elements",
    "phase_function",
    "scattering_amplitudes",
    "table_set",
    "truncation_order",
]
