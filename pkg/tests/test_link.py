"""Tests for the BB84 link budget."""

import math

import numpy as np
import pytest

from uwqkd.base.errors import UndefinedQBERError, UnreachableTargetError
from uwqkd.link import (
    LinkBudget,
    LinkParams,
    assess_link,
    background_error_rate,
    beer_lambert_signal,
    budget_standard_errors,
    depth_threshold,
    expected_scatter_errors,
    link_budget,
    photon_rate,
    qber,
    range_threshold,
    scatter_error_rate,
    security_verdict,
    sifted_key_rate,
)
from uwqkd.physics.medium import Environment, WaterOptics, WaterType
from uwqkd.physics.mie import MieTableSet
from uwqkd.physics.polarization import BB84_STATES, EnsemblePolarization
from uwqkd.physics.transport import ReceiverGeometry, TransportTallies, run_transport
from uwqkd.types import BB84Label, EnvironmentLabel, SecurityVerdict, WaterTypeName

H = BB84_STATES[BB84Label.H]
P = BB84_STATES[BB84Label.P]

RECEIVER = ReceiverGeometry(distance=100.0, aperture=0.1, fov=math.radians(10.0))
STARLIGHT = Environment.named(EnvironmentLabel.STARLIGHT)
CLOUDY = Environment.named(EnvironmentLabel.CLOUDY_NIGHT)
DARK = Environment.named(EnvironmentLabel.NONE)
JERLOV_I = WaterType.named(WaterTypeName.JERLOV_I)


def _ballistic_tallies(fraction: float, launched: int = 1_000_000) -> TransportTallies:
    received = round(fraction * launched)
    return TransportTallies(launched=launched, received_ballistic=received, absorbed=launched - received)


def test_default_parameters() -> None:
    """Test the default source delivers f <N> = 2.857e6 photons per second."""
    p = LinkParams()

    assert p.pulse_rate == pytest.approx(1 / 35e-9)
    assert p.detected_photon_rate == pytest.approx(2.857e6, rel=1e-3)


@pytest.mark.parametrize(
    ("changes", "match"),
    [
        ({"mean_photons": 0.0}, "mean_photons"),
        ({"gate": 50e-9}, "longer than the bit period"),
        ({"detection_efficiency": 1.5}, "detection_efficiency"),
        ({"wavelength": -1.0}, "wavelength"),
    ],
)
def test_link_params_validation(changes: dict[str, float], match: str) -> None:
    """Test non-physical link parameters are rejected."""
    with pytest.raises(ValueError, match=match):
        LinkParams(**changes)


def test_background_at_starlight_depth() -> None:
    """Test starlight at 200 m through a 10 cm, 10 degree receiver gives about 5.79e4 counts/s."""
    r_d = 1e-6 * math.exp(-0.019 * 200.0)

    assert background_error_rate(r_d, 0.1, math.radians(10.0), LinkParams()) == pytest.approx(5.79e4, rel=2e-3)


def test_background_scales_with_aperture_area() -> None:
    """Test doubling the aperture quadruples the background."""
    p = LinkParams()

    assert background_error_rate(1e-8, 0.2, 0.1, p) == pytest.approx(4 * background_error_rate(1e-8, 0.1, 0.1, p))
    assert background_error_rate(0.0, 0.1, 0.1, p) == 0.0


def test_background_rejects_negative_inputs() -> None:
    """Test negative irradiance is rejected."""
    with pytest.raises(ValueError, match="non-negative"):
        background_error_rate(-1.0, 0.1, 0.1, LinkParams())


def test_photon_rate() -> None:
    """Test counts convert to rates by the launched fraction."""
    p = LinkParams()

    assert photon_rate(500, 1000, p) == pytest.approx(0.5 * p.detected_photon_rate)
    with pytest.raises(ValueError, match="launched"):
        photon_rate(1, 0, p)


@pytest.mark.parametrize(
    ("n", "error", "expected"),
    [
        (1.0, 0.0, 0.0),
        (0.0, 1.0, 0.5),
        (4.72e5, 5.79e4, 0.0986),
    ],
)
def test_qber(n: float, error: float, expected: float) -> None:
    """Test QBER = error / (N + 2 error)."""
    assert qber(n, error) == pytest.approx(expected, abs=1e-4)


def test_qber_undefined_without_signal_or_errors() -> None:
    """Test zero signal and zero errors has no QBER."""
    with pytest.raises(UndefinedQBERError):
        qber(0.0, 0.0)


@pytest.mark.parametrize(
    ("q", "verdict"),
    [
        (0.0, SecurityVerdict.SECURE_SOPHISTICATED),
        (0.10, SecurityVerdict.SECURE_SOPHISTICATED),
        (0.1000001, SecurityVerdict.SECURE_INTERCEPT_RESEND),
        (0.25, SecurityVerdict.SECURE_INTERCEPT_RESEND),
        (0.26, SecurityVerdict.INSECURE),
        (0.5, SecurityVerdict.INSECURE),
    ],
)
def test_security_verdict_boundaries(q: float, verdict: SecurityVerdict) -> None:
    """Test both thresholds are inclusive."""
    assert security_verdict(q) is verdict


def test_security_verdict_range() -> None:
    """Test QBER values outside [0, 0.5] are rejected."""
    with pytest.raises(ValueError, match="qber"):
        security_verdict(0.6)


def test_sifted_key_rate() -> None:
    """Test kappa = f <N> DE (1 - a)(1 - qber) / 2."""
    p = LinkParams()

    assert sifted_key_rate(p, 0.0, 0.0) == pytest.approx(0.5 * p.detected_photon_rate)
    assert sifted_key_rate(p, 1.0, 0.0) == 0.0
    with pytest.raises(ValueError, match="attenuation"):
        sifted_key_rate(p, 1.5, 0.0)


def test_expected_scatter_errors_from_ensemble_sums() -> None:
    """Test the expected wrong bits equal the sum of per-photon error probabilities."""
    vectors = np.array([[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.6, 0.8, 0.0]])
    tallies = TransportTallies(
        launched=10,
        received_scattered=4,
        absorbed=6,
        scattered_ensemble=EnsemblePolarization.from_vectors(vectors),
    )

    assert expected_scatter_errors(tallies, H) == pytest.approx(0.0 + 1.0 + 0.5 + 0.2)
    assert expected_scatter_errors(tallies, P) == pytest.approx(0.5 + 0.5 + 0.0 + 0.1)
    assert scatter_error_rate(tallies, H, LinkParams()) == pytest.approx(
        0.17 * LinkParams().detected_photon_rate
    )


def test_link_budget_composition() -> None:
    """Test the budget combines its parts consistently."""
    p = LinkParams()
    budget = link_budget(4.72e5, 0.83, 1.0e3, 5.69e4, p)

    assert isinstance(budget, LinkBudget)
    assert budget.error_rate == pytest.approx(5.79e4)
    assert budget.qber == pytest.approx(qber(4.72e5, 5.79e4))
    assert budget.verdict is SecurityVerdict.SECURE_SOPHISTICATED
    assert budget.kappa == pytest.approx(sifted_key_rate(p, 0.83, budget.qber))


def test_qber_anchor_at_60_m() -> None:
    """Test a 60 m Jerlov I link under starlight at 200 m sits at the 10% threshold."""
    recv = ReceiverGeometry(distance=60.0, aperture=0.1, fov=math.radians(10.0))
    budget = assess_link(_ballistic_tallies(math.exp(-1.8)), H, recv, STARLIGHT, 200.0)

    assert budget.signal_rate == pytest.approx(4.72e5, rel=1e-3)
    assert budget.qber == pytest.approx(0.10, abs=0.01)
    assert budget.kappa == pytest.approx(2.07e5, rel=0.1)
    assert budget.verdict is SecurityVerdict.SECURE_SOPHISTICATED


def test_qber_anchor_at_107_m() -> None:
    """Test a 107 m link under the same conditions sits at the 25% threshold."""
    recv = ReceiverGeometry(distance=107.0, aperture=0.1, fov=math.radians(10.0))
    budget = assess_link(_ballistic_tallies(math.exp(-0.03 * 107.0)), H, recv, STARLIGHT, 200.0)

    assert budget.qber == pytest.approx(0.25, abs=0.02)
    assert budget.kappa == pytest.approx(4.5e4, rel=0.1)


@pytest.mark.slow
@pytest.mark.parametrize(("distance", "expected", "tolerance"), [(60.0, 0.10, 0.01), (107.0, 0.25, 0.02)])
def test_transported_link_meets_qber_anchors(
    jerlov_i: WaterOptics, coarse_tables: MieTableSet, distance: float, expected: float, tolerance: float
) -> None:
    """Test simulated photons land on the 10% and 25% QBER thresholds under starlight and stay clean in the dark."""
    recv = ReceiverGeometry(distance=distance, aperture=0.1, fov=math.radians(10.0))
    tallies = run_transport(H, jerlov_i, recv, 20_000, seed=59, tables=coarse_tables)

    lit = assess_link(tallies, H, recv, STARLIGHT, 200.0)
    dark = assess_link(tallies, H, recv, DARK, 200.0)

    assert tallies.received_ballistic > 0
    assert lit.qber == pytest.approx(expected, abs=tolerance)
    assert lit.scatter_error < 0.01 * lit.background_error
    assert dark.qber < 0.01


def test_dark_link_has_almost_no_errors() -> None:
    """Test a link without background light keeps its QBER near zero."""
    recv = ReceiverGeometry(distance=60.0, aperture=0.1, fov=math.radians(10.0))
    budget = assess_link(_ballistic_tallies(math.exp(-1.8)), H, recv, DARK, 200.0)

    assert budget.qber == 0.0
    assert budget.background_error == 0.0


def test_assess_link_without_signal_or_background() -> None:
    """Test a link that received nothing in the dark has no QBER."""
    tallies = TransportTallies(launched=100, absorbed=100)

    with pytest.raises(UndefinedQBERError):
        assess_link(tallies, H, RECEIVER, DARK, 200.0)


def test_budget_standard_errors() -> None:
    """Test the binomial signal error and its propagation to QBER and kappa."""
    p = LinkParams()
    received, launched = 1650, 10_000
    budget = link_budget(photon_rate(received, launched, p), 1 - received / launched, 0.0, 5.79e4, p)
    se_n, se_q, se_k = budget_standard_errors(budget, received, launched, p)

    frac = received / launched
    assert se_n == pytest.approx(p.detected_photon_rate * math.sqrt(frac * (1 - frac) / launched))
    assert 0 < se_q < budget.qber
    assert se_k > 0


def test_beer_lambert_signal() -> None:
    """Test the ballistic-only signal at 100 m in Jerlov I."""
    p = LinkParams()

    assert beer_lambert_signal(JERLOV_I, 100.0, p) == pytest.approx(p.detected_photon_rate * math.exp(-3.0))


@pytest.mark.parametrize(
    ("target", "env", "expected"),
    [
        (0.10, STARLIGHT, 262.0),
        (0.25, STARLIGHT, 189.0),
        (0.10, CLOUDY, 141.0),
    ],
)
def test_depth_threshold(target: float, env: Environment, expected: float) -> None:
    """Test the shallowest secure depth of a 100 m Jerlov I link."""
    depth = depth_threshold(target, 100.0, JERLOV_I, env, RECEIVER)

    assert depth == pytest.approx(expected, abs=3.0)


def test_depth_threshold_meets_target() -> None:
    """Test the returned depth satisfies the target and a metre shallower does not."""
    p = LinkParams()
    depth = depth_threshold(0.10, 100.0, JERLOV_I, STARLIGHT, RECEIVER, p)
    n = beer_lambert_signal(JERLOV_I, 100.0, p)

    def q_at(z: float) -> float:
        error = background_error_rate(1e-6 * math.exp(-0.019 * z), RECEIVER.aperture, RECEIVER.fov, p)
        return qber(n, error)

    assert q_at(depth) <= 0.10
    assert q_at(depth - 1.0) > 0.10


def test_depth_threshold_already_met_at_surface() -> None:
    """Test a dark sky needs no depth at all."""
    assert depth_threshold(0.10, 100.0, JERLOV_I, DARK, RECEIVER) == 0.0


def test_depth_threshold_unreachable() -> None:
    """Test a target below the scattered-photon floor is never met."""
    with pytest.raises(UnreachableTargetError):
        depth_threshold(0.01, 100.0, JERLOV_I, STARLIGHT, RECEIVER, signal=1.0, scatter_error=1.0)


@pytest.mark.parametrize(("target", "expected"), [(0.10, 60.6), (0.25, 106.9)])
def test_range_threshold(target: float, expected: float) -> None:
    """Test the longest secure Beer-Lambert link under starlight at 200 m."""
    distance = range_threshold(target, JERLOV_I, STARLIGHT, 200.0, RECEIVER)

    assert distance == pytest.approx(expected, abs=0.5)


def test_range_threshold_without_errors() -> None:
    """Test an error-free link is secure at any range."""
    assert range_threshold(0.10, JERLOV_I, DARK, 200.0, RECEIVER) == math.inf


def test_range_threshold_unreachable() -> None:
    """Test a receiver too close to the surface fails even at zero range."""
    with pytest.raises(UnreachableTargetError, match="zero range"):
        range_threshold(0.10, JERLOV_I, Environment.named(EnvironmentLabel.FULL_MOON), 0.0, RECEIVER)
