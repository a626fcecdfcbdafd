"""Pytest configuration and shared fixtures."""

import pytest

from uwqkd.constants import N_WATER, PARTICLE_INDEX
from uwqkd.physics.medium import JungePSD, WaterOptics, WaterType, calibrate
from uwqkd.physics.mie import ComplexIndex, MieTableSet
from uwqkd.physics.transport import tables_for
from uwqkd.types import WaterTypeName

COARSE_BINS = 12
COARSE_POINTS = 721


@pytest.fixture(scope="session")
def relative_index() -> ComplexIndex:
    """Plankton index relative to seawater."""
    return ComplexIndex.from_complex(PARTICLE_INDEX).relative_to(N_WATER)


@pytest.fixture(scope="session")
def jerlov_i(relative_index: ComplexIndex) -> WaterOptics:
    """Calibrated Jerlov type I water."""
    return calibrate(WaterType.named(WaterTypeName.JERLOV_I), JungePSD(), relative_index)


@pytest.fixture(scope="session")
def jerlov_iii(relative_index: ComplexIndex) -> WaterOptics:
    """Calibrated Jerlov type III water."""
    return calibrate(WaterType.named(WaterTypeName.JERLOV_III), JungePSD(), relative_index)


@pytest.fixture(scope="session")
def coarse_tables(jerlov_i: WaterOptics) -> MieTableSet:
    """A reduced Mueller table set for the default particle population."""
    tables = tables_for(jerlov_i, bins=COARSE_BINS, points=COARSE_POINTS)
    assert tables is not None
    return tables
