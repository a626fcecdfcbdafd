"""Tests for the seawater models."""

import math

import numpy as np
import pytest
from scipy import integrate, stats

from uwqkd.base.errors import CalibrationError
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
from uwqkd.physics.mie import ComplexIndex
from uwqkd.types import EnvironmentLabel, WaterTypeName


def test_named_water_types() -> None:
    """Test the embedded extinction table."""
    assert WaterType.named("jerlov-i").mu_e == 0.03
    assert WaterType.named(WaterTypeName.JERLOV_II).mu_e == 0.18
    assert WaterType.named(WaterTypeName.JERLOV_III).mu_e == 0.3


def test_unknown_water_type() -> None:
    """Test an unknown name is rejected."""
    with pytest.raises(ValueError):
        WaterType.named("jerlov-iv")


@pytest.mark.parametrize("epsilon", [2.9, 5.1])
def test_psd_slope_range(epsilon: float) -> None:
    """Test slopes outside [3, 5] are rejected."""
    with pytest.raises(ValueError, match="epsilon"):
        JungePSD(epsilon=epsilon)


def test_psd_bounds_order() -> None:
    """Test dmin must be below dmax."""
    with pytest.raises(ValueError, match="dmin"):
        JungePSD(dmin=1e-4, dmax=1e-5)


def test_psd_pdf_integrates_to_one() -> None:
    """Test the normalized density integrates to one over its support."""
    psd = JungePSD()
    total, _ = integrate.quad(psd.pdf, psd.dmin, psd.dmax, points=[2e-6, 1e-5], limit=200)

    assert total == pytest.approx(1.0, rel=1e-6)
    assert psd.pdf(0.5 * psd.dmin) == 0.0


def test_psd_number_density_power_law() -> None:
    """Test N(D) drops by 2^epsilon when D doubles."""
    psd = JungePSD(epsilon=3.5, k=2.0)

    assert psd.number_density(psd.d0) == 2.0
    assert psd.number_density(2 * psd.d0) == pytest.approx(2.0 / 2**3.5)


@pytest.mark.parametrize("u", [0.0, 0.1, 0.5, 0.9, 0.999, 1.0])
def test_sample_diameter_inverts_cdf(u: float) -> None:
    """Test the inverse CDF lands where the CDF says."""
    psd = JungePSD()
    diameter = sample_diameter(psd, u)

    assert psd.dmin <= diameter <= psd.dmax
    assert psd.cdf(diameter) == pytest.approx(u, abs=1e-12)


def test_sample_diameter_endpoints() -> None:
    """Test the extreme deviates map to the support bounds."""
    psd = JungePSD()

    assert sample_diameter(psd, 0.0) == psd.dmin
    assert sample_diameter(psd, 1.0) == psd.dmax


def test_sampled_diameters_follow_distribution() -> None:
    """Test sampled diameters pass a Kolmogorov-Smirnov test against the CDF."""
    psd = JungePSD(epsilon=3.5)
    rng = np.random.Generator(np.random.Philox(key=7))
    draws = [sample_diameter(psd, float(u)) for u in rng.random(20_000)]

    result = stats.kstest(draws, np.vectorize(psd.cdf))

    assert result.pvalue > 1e-3


def test_optics_components_must_add_up() -> None:
    """Test inconsistent coefficients are rejected."""
    with pytest.raises(ValueError, match="component sum"):
        WaterOptics(mu_m=0.01, mu_s_p=0.01, mu_a_p=0.0, mu_e=0.05)


def test_optics_rejects_negative_components() -> None:
    """Test a negative coefficient is rejected."""
    with pytest.raises(ValueError, match="non-negative"):
        WaterOptics(mu_m=-0.01, mu_s_p=0.02, mu_a_p=0.0, mu_e=0.01)


def test_calibration_reproduces_extinction(jerlov_i: WaterOptics) -> None:
    """Test the calibrated components sum to the water type's extinction."""
    assert jerlov_i.mu_e == pytest.approx(0.03, rel=1e-12)
    assert jerlov_i.mu_m == pytest.approx(0.0176)
    assert jerlov_i.mu_s_p > 0
    assert jerlov_i.mu_a_p > 0
    assert jerlov_i.mu_m + jerlov_i.mu_s_p + jerlov_i.mu_a_p == pytest.approx(jerlov_i.mu_e, abs=1e-12)
    assert 0 < jerlov_i.particle_albedo < 1
    assert jerlov_i.concentration > 0


def test_calibration_scales_concentration_linearly(jerlov_i: WaterOptics, jerlov_iii: WaterOptics) -> None:
    """Test murkier water needs proportionally more of the same particles."""
    ratio = (0.3 - 0.0176) / (0.03 - 0.0176)

    assert jerlov_iii.concentration / jerlov_i.concentration == pytest.approx(ratio, rel=1e-9)
    assert jerlov_iii.particle_albedo == pytest.approx(jerlov_i.particle_albedo, rel=1e-9)


def test_calibration_pure_water_limit(relative_index: ComplexIndex) -> None:
    """Test a water type at the pure-water limit holds no particles."""
    water = WaterType(name=WaterTypeName.JERLOV_I, mu_e=0.0176)
    optics = calibrate(water, JungePSD(), relative_index)

    assert optics.concentration == 0.0
    assert optics.mu_s_p == 0.0
    assert optics.mu_a_p == 0.0
    assert optics.mu_e == pytest.approx(0.0176)


def test_calibration_below_water_absorption(relative_index: ComplexIndex) -> None:
    """Test an extinction below pure-water absorption cannot be calibrated."""
    water = WaterType(name=WaterTypeName.JERLOV_I, mu_e=0.01)

    with pytest.raises(CalibrationError, match="below water absorption"):
        calibrate(water, JungePSD(), relative_index)


def test_environment_table() -> None:
    """Test the embedded surface irradiances."""
    assert Environment.named("full-moon").surface_irradiance == 1e-3
    assert Environment.named(EnvironmentLabel.STARLIGHT).surface_irradiance == 1e-6
    assert Environment.named(EnvironmentLabel.CLOUDY_NIGHT).surface_irradiance == 1e-7
    assert Environment.named(EnvironmentLabel.NONE).surface_irradiance == 0.0


def test_irradiance_decays_exponentially() -> None:
    """Test E(z) = E0 exp(-mu_d z)."""
    env = Environment.named(EnvironmentLabel.STARLIGHT)

    assert irradiance_at_depth(env, 0.0) == 1e-6
    assert irradiance_at_depth(env, 200.0) == pytest.approx(1e-6 * math.exp(-0.019 * 200.0))


def test_irradiance_rejects_negative_depth() -> None:
    """Test depths above the surface are rejected."""
    with pytest.raises(ValueError, match="depth"):
        irradiance_at_depth(Environment.named(EnvironmentLabel.STARLIGHT), -1.0)


def test_ballistic_transmission() -> None:
    """Test the Beer-Lambert survival fraction."""
    assert ballistic_transmission(0.03, 0.0) == 1.0
    assert ballistic_transmission(0.03, 100.0) == pytest.approx(math.exp(-3.0))

    with pytest.raises(ValueError, match="path length"):
        ballistic_transmission(0.03, -1.0)
