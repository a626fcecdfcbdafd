"""Tests for unit parsing."""

import math

import pytest

from uwqkd.helpers import parse_angle, parse_complex_index, parse_length, parse_time


@pytest.mark.parametrize(
    ("value", "expected"),
    [
        (60, 60.0),
        (0.1, 0.1),
        ("60", 60.0),
        ("60m", 60.0),
        ("10cm", 0.1),
        ("2 mm", 2e-3),
        ("200um", 2e-4),
        ("200µm", 2e-4),
        ("480nm", 480e-9),
        ("1e-6", 1e-6),
    ],
)
def test_parse_length(value: object, expected: float) -> None:
    """Test lengths in every supported unit."""
    assert parse_length(value) == pytest.approx(expected)


@pytest.mark.parametrize(
    ("value", "expected"),
    [
        (0.175, 0.175),
        ("175mrad", 0.175),
        ("10deg", math.radians(10.0)),
        ("10°", math.radians(10.0)),
        ("0.5rad", 0.5),
    ],
)
def test_parse_angle(value: object, expected: float) -> None:
    """Test angles in radians, milliradians and degrees."""
    assert parse_angle(value) == pytest.approx(expected)


def test_parse_time() -> None:
    """Test durations down to picoseconds."""
    assert parse_time("35ns") == pytest.approx(35e-9)
    assert parse_time("200ps") == pytest.approx(200e-12)
    assert parse_time(1) == 1.0


@pytest.mark.parametrize("value", ["ten metres", "10 parsecs", True, None, [1, 2]])
def test_parse_length_rejects(value: object) -> None:
    """Test unparseable values are rejected."""
    with pytest.raises(ValueError):
        parse_length(value)


def test_unknown_unit_lists_known_ones() -> None:
    """Test the error for an unknown unit names the accepted ones."""
    with pytest.raises(ValueError, match="known: rad, mrad, deg"):
        parse_angle("10grad")


@pytest.mark.parametrize(
    ("value", "expected"),
    [
        ("1.41-0.00672i", complex(1.41, -0.00672)),
        ("1.41 - 0.00672j", complex(1.41, -0.00672)),
        ([1.41, 0.00672], complex(1.41, 0.00672)),
        (1.33, complex(1.33, 0.0)),
    ],
)
def test_parse_complex_index(value: object, expected: complex) -> None:
    """Test string, list and real forms of a refractive index."""
    assert parse_complex_index(value) == expected


def test_parse_complex_index_rejects() -> None:
    """Test nonsense indices are rejected."""
    with pytest.raises(ValueError, match="refractive index"):
        parse_complex_index("glass")
    with pytest.raises(ValueError, match="refractive index"):
        parse_complex_index(False)
