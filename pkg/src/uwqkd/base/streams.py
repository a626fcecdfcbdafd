"""Counter-based random streams, one per photon history.

A photon's stream is a Philox generator whose key is derived from the run
seed and the prepared-state index and whose counter starts at the photon
index. The draws a photon consumes therefore depend only on
``(seed, state_index, photon_index)``, never on which worker ran it.
"""

import numpy as np

_UINT64 = 2**64


def stream_key(seed: int, family: int = 0) -> int:
    """Build the 128-bit Philox key for a stream family.

    Args:
        seed: 64-bit run seed.
        family: Stream family (prepared-state index).

    Returns:
        Integer key combining both.

    Raises:
        ValueError: If seed or family fall outside 64 bits.
    """
    if not 0 <= seed < _UINT64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    if not 0 <= family < _UINT64:
        raise ValueError(f"stream family must be a 64-bit unsigned integer, got {family}")
    return seed + family * _UINT64


def photon_generator(key: int, photon_index: int) -> np.random.Generator:
    """Return the generator owned by one photon history.

    The photon index occupies the third counter word, so each photon has
    2**128 draws to itself before streams could overlap.

    Args:
        key: Stream key from `stream_key`.
        photon_index: Zero-based photon index within the run.
    """
    bit_generator = np.random.Philox(counter=[0, 0, photon_index, 0], key=key)
    return np.random.Generator(bit_generator)
