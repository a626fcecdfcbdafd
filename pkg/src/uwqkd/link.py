"""BB84 link budget: signal and error rates, QBER, security and key rate.

Signal and errors are both per-second detection rates. The signal is
the pulse rate times the mean photon number times the received fraction
(and detection efficiency); errors are the expected wrong bits of
received scattered photons plus background light leaking through the
receiver's aperture, field of view and detection gate.

Example:
    ```python
    budget = assess_link(tallies, BB84_STATES[BB84Label.H], recv, env, depth=200.0)
    budget.qber, budget.verdict
    ```
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass

from uwqkd.base.errors import UndefinedQBERError, UnreachableTargetError
from uwqkd.constants import (
    BIT_PERIOD,
    DEFAULT_WAVELENGTH,
    DETECTION_EFFICIENCY,
    GATE_TIME,
    MEAN_PHOTONS,
    PLANCK,
    QBER_INTERCEPT_RESEND,
    QBER_SOPHISTICATED,
    SPEED_OF_LIGHT,
)
from uwqkd.physics.medium import Environment, WaterType, ballistic_transmission, irradiance_at_depth
from uwqkd.physics.polarization import BB84State
from uwqkd.physics.transport import ReceiverGeometry, TransportTallies
from uwqkd.types import SecurityVerdict

logger = logging.getLogger(__name__)

THRESHOLD_TOLERANCE = 0.1
"""Bisection tolerance of the threshold searches, metres."""

DEPTH_LIMIT = 1.0e4
RANGE_LIMIT = 1.0e4


@dataclass(frozen=True, kw_only=True)
class LinkParams:
    """Source and detector parameters of the link."""

    mean_photons: float = MEAN_PHOTONS
    """Mean photon number per pulse."""

    bit_period: float = BIT_PERIOD
    """Pulse period in seconds."""

    gate: float = GATE_TIME
    """Detector gate in seconds."""

    wavelength: float = DEFAULT_WAVELENGTH
    detection_efficiency: float = DETECTION_EFFICIENCY
    planck: float = PLANCK
    speed_of_light: float = SPEED_OF_LIGHT

    def __post_init__(self) -> None:
        """Validate the parameters."""
        if self.mean_photons <= 0:
            raise ValueError(f"mean_photons must be positive, got {self.mean_photons}")
        if self.bit_period <= 0 or self.gate <= 0:
            raise ValueError("bit period and gate must be positive")
        if self.gate > self.bit_period:
            raise ValueError(f"gate {self.gate} s is longer than the bit period {self.bit_period} s")
        if not 0 < self.detection_efficiency <= 1:
            raise ValueError(f"detection_efficiency must lie in (0, 1], got {self.detection_efficiency}")
        if self.wavelength <= 0:
            raise ValueError(f"wavelength must be positive, got {self.wavelength}")

    @property
    def pulse_rate(self) -> float:
        """Pulses per second, ``1 / bit_period``."""
        return 1.0 / self.bit_period

    @property
    def detected_photon_rate(self) -> float:
        """Detections per second of a lossless channel."""
        return self.pulse_rate * self.mean_photons * self.detection_efficiency


@dataclass(frozen=True, kw_only=True)
class LinkBudget:
    """Rates and security figures of one link configuration."""

    signal_rate: float
    """Received signal photons per second."""

    scatter_error: float
    """Wrong bits per second from received scattered photons."""

    background_error: float
    """Wrong bits per second from ambient light."""

    qber: float
    attenuation: float
    """Fraction of launched photons not received."""

    kappa: float
    """Sifted key rate, bits per second."""

    verdict: SecurityVerdict

    @property
    def error_rate(self) -> float:
        """Total error rate per second."""
        return self.scatter_error + self.background_error


def background_error_rate(r_d: float, aperture: float, fov: float, p: LinkParams) -> float:
    """Background error counts per second at irradiance ``r_d`` (W/m^2).

    ``pi^2 R_d A^2 gate lambda (1 - cos fov) / (8 h c bit_period)``.
    """
    if r_d < 0 or aperture < 0 or fov < 0:
        raise ValueError("irradiance, aperture and fov must be non-negative")
    numerator = math.pi**2 * r_d * aperture**2 * p.gate * p.wavelength * (1.0 - math.cos(fov))
    return numerator / (8.0 * p.planck * p.speed_of_light * p.bit_period)


def photon_rate(count: float, launched: int, p: LinkParams) -> float:
    """Detections per second for ``count`` of ``launched`` simulated photons."""
    if launched <= 0:
        raise ValueError(f"launched must be positive, got {launched}")
    return p.detected_photon_rate * count / launched


def signal_rate(tallies: TransportTallies, p: LinkParams) -> tuple[float, float]:
    """Signal rate and attenuation from a transport run.

    Returns:
        ``(N, a)`` with ``a = 1 - received / launched``.
    """
    n = photon_rate(tallies.received, tallies.launched, p)
    return n, 1.0 - tallies.received_fraction


def expected_scatter_errors(tallies: TransportTallies, prepared: BB84State) -> float:
    """Expected wrong bits among received scattered photons.

    The wrong-bit probability is linear in the received polarization, so
    the sum over photons follows from the ensemble sums alone.
    """
    ens = tallies.scattered_ensemble
    b = prepared.bloch
    projected = b[0] * ens.sums[0] + b[1] * ens.sums[1] + b[2] * ens.sums[2]
    return max(0.5 * (ens.count - projected), 0.0)


def scatter_error_rate(tallies: TransportTallies, prepared: BB84State, p: LinkParams) -> float:
    """Wrong bits per second from received scattered photons."""
    return photon_rate(expected_scatter_errors(tallies, prepared), tallies.launched, p)


def qber(n: float, error: float) -> float:
    """Quantum bit error rate ``error / (n + 2 error)``.

    Raises:
        UndefinedQBERError: If there is neither signal nor error.
    """
    if n < 0 or error < 0:
        raise ValueError(f"rates must be non-negative, got n={n}, error={error}")
    if n == 0 and error == 0:
        raise UndefinedQBERError("QBER is undefined with zero signal and zero errors")
    return error / (n + 2.0 * error)


def security_verdict(q: float) -> SecurityVerdict:
    """Classify a QBER against the 10% and 25% security thresholds."""
    if not 0.0 <= q <= 0.5:
        raise ValueError(f"qber must lie in [0, 0.5], got {q}")
    if q <= QBER_SOPHISTICATED:
        return SecurityVerdict.SECURE_SOPHISTICATED
    if q <= QBER_INTERCEPT_RESEND:
        return SecurityVerdict.SECURE_INTERCEPT_RESEND
    return SecurityVerdict.INSECURE


def sifted_key_rate(p: LinkParams, a: float, q: float) -> float:
    """Sifted key rate ``f <N> (1 - a) (1 - qber) DE / 2`` in bits per second."""
    if not 0.0 <= a <= 1.0:
        raise ValueError(f"attenuation must lie in [0, 1], got {a}")
    if not 0.0 <= q <= 0.5:
        raise ValueError(f"qber must lie in [0, 0.5], got {q}")
    return p.detected_photon_rate * (1.0 - a) * (1.0 - q) / 2.0


def link_budget(
    n: float, a: float, scatter_error: float, background_error: float, p: LinkParams
) -> LinkBudget:
    """Compose the security figures from signal and error rates."""
    q = qber(n, scatter_error + background_error)
    return LinkBudget(
        signal_rate=n,
        scatter_error=scatter_error,
        background_error=background_error,
        qber=q,
        attenuation=a,
        kappa=sifted_key_rate(p, a, q),
        verdict=security_verdict(q),
    )


def assess_link(
    tallies: TransportTallies,
    prepared: BB84State,
    recv: ReceiverGeometry,
    env: Environment,
    depth: float,
    p: LinkParams | None = None,
) -> LinkBudget:
    """Link budget of one transport run at a receiver depth.

    Raises:
        UndefinedQBERError: If nothing was received and there is no background.
    """
    p = p or LinkParams()
    n, a = signal_rate(tallies, p)
    background = background_error_rate(irradiance_at_depth(env, depth), recv.aperture, recv.fov, p)
    return link_budget(n, a, scatter_error_rate(tallies, prepared, p), background, p)


def budget_standard_errors(
    budget: LinkBudget, received: int, launched: int, p: LinkParams
) -> tuple[float, float, float]:
    """Standard errors of ``(signal_rate, qber, kappa)``.

    The received fraction is treated as binomial and propagated to first
    order; the error rates are held fixed.
    """
    if launched <= 0:
        raise ValueError(f"launched must be positive, got {launched}")
    frac = received / launched
    se_frac = math.sqrt(frac * (1.0 - frac) / launched)
    scale = p.detected_photon_rate
    se_n = scale * se_frac
    error = budget.error_rate
    total = budget.signal_rate + 2.0 * error
    dq_dn = -error / (total * total) if total > 0 else 0.0
    se_q = abs(dq_dn) * se_n
    dk_dfrac = 0.5 * scale * ((1.0 - budget.qber) - frac * dq_dn * scale)
    return se_n, se_q, abs(dk_dfrac) * se_frac


def _bisect(
    predicate: Callable[[float], bool], lo: float, hi: float, tol: float
) -> tuple[float, float]:
    """Narrow ``[lo, hi]`` with ``predicate(lo)`` false and ``predicate(hi)`` true."""
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if predicate(mid):
            hi = mid
        else:
            lo = mid
    return lo, hi


def beer_lambert_signal(water: WaterType, distance: float, p: LinkParams) -> float:
    """Signal rate of a ballistic-only channel, ``f <N> DE exp(-mu_e L)``."""
    return p.detected_photon_rate * ballistic_transmission(water.mu_e, distance)


def depth_threshold(
    target_qber: float,
    distance: float,
    water: WaterType,
    env: Environment,
    geometry: ReceiverGeometry,
    p: LinkParams | None = None,
    *,
    signal: float | None = None,
    scatter_error: float = 0.0,
    tol: float = THRESHOLD_TOLERANCE,
    z_max: float = DEPTH_LIMIT,
) -> float:
    """Shallowest receiver depth at which the QBER meets a target.

    The signal rate is held fixed, by default at its Beer-Lambert value
    for ``distance``; background light falls off with depth, so the QBER
    is monotone and bisection applies.

    Args:
        target_qber: Largest acceptable QBER.
        distance: Link length in metres.
        water: Water type setting the default signal rate.
        env: Ambient light.
        geometry: Receiver aperture and field of view.
        p: Link parameters.
        signal: Signal rate override, e.g. from a transport run.
        scatter_error: Scattered-photon error rate added at every depth.
        tol: Depth tolerance in metres.
        z_max: Deepest depth considered.

    Raises:
        UnreachableTargetError: If even ``z_max`` does not meet the target.
    """
    p = p or LinkParams()
    n = beer_lambert_signal(water, distance, p) if signal is None else signal

    def meets(z: float) -> bool:
        background = background_error_rate(irradiance_at_depth(env, z), geometry.aperture, geometry.fov, p)
        error = scatter_error + background
        if n == 0 and error == 0:
            return True
        return qber(n, error) <= target_qber

    if meets(0.0):
        return 0.0
    if not meets(z_max):
        raise UnreachableTargetError(
            f"QBER {target_qber} is not reached at any depth down to {z_max} m "
            f"for a {distance} m link under {env.label.value}"
        )
    _, depth = _bisect(meets, 0.0, z_max, tol)
    logger.debug("depth threshold for qber %.3g at %.4g m: %.2f m", target_qber, distance, depth)
    return depth


def range_threshold(
    target_qber: float,
    water: WaterType,
    env: Environment,
    depth: float,
    geometry: ReceiverGeometry,
    p: LinkParams | None = None,
    *,
    scatter_error: float = 0.0,
    tol: float = THRESHOLD_TOLERANCE,
    l_max: float = RANGE_LIMIT,
) -> float:
    """Longest Beer-Lambert link whose QBER meets a target.

    Returns:
        The distance in metres, or ``inf`` when there are no errors at all.

    Raises:
        UnreachableTargetError: If even a zero-length link misses the target.
    """
    p = p or LinkParams()
    error = scatter_error + background_error_rate(
        irradiance_at_depth(env, depth), geometry.aperture, geometry.fov, p
    )
    if error == 0:
        return math.inf

    def fails(distance: float) -> bool:
        return qber(beer_lambert_signal(water, distance, p), error) > target_qber

    if fails(0.0):
        raise UnreachableTargetError(
            f"QBER {target_qber} is not reached even at zero range under {env.label.value} at {depth} m"
        )
    if not fails(l_max):
        return l_max
    longest, _ = _bisect(fails, 0.0, l_max, tol)
    return longest


__all__ = [
    "LinkBudget",
    "LinkParams",
    "assess_link",
    "background_error_rate",
    "beer_lambert_signal",
    "budget_standard_errors",
    "depth_threshold",
    "expected_scatter_errors",
    "link_budget",
    "photon_rate",
    "qber",
    "range_threshold",
    "scatter_error_rate",
    "security_verdict",
    "sifted_key_rate",
]
