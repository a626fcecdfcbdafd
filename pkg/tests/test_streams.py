"""Tests for the counter-based photon streams."""

import numpy as np
import pytest

from uwqkd.base.streams import photon_generator, stream_key


def test_stream_key_layout() -> None:
    """Test the family occupies the upper key word."""
    assert stream_key(5) == 5
    assert stream_key(5, 2) == 5 + 2 * 2**64


@pytest.mark.parametrize(("seed", "family"), [(-1, 0), (2**64, 0), (0, -1), (0, 2**64)])
def test_stream_key_range(seed: int, family: int) -> None:
    """Test seeds and families must fit in 64 bits."""
    with pytest.raises(ValueError):
        stream_key(seed, family)


def test_photon_stream_is_reproducible() -> None:
    """Test a photon's draws depend only on its key and index."""
    key = stream_key(20140301, 1)

    np.testing.assert_array_equal(photon_generator(key, 17).random(8), photon_generator(key, 17).random(8))


def test_photon_streams_differ() -> None:
    """Test neighbouring photons and state families get different draws."""
    key = stream_key(1)
    first = photon_generator(key, 0).random(4)

    assert not np.array_equal(first, photon_generator(key, 1).random(4))
    assert not np.array_equal(first, photon_generator(stream_key(1, 1), 0).random(4))
    assert not np.array_equal(first, photon_generator(stream_key(2), 0).random(4))
