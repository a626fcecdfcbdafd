"""Unit parsing for configuration values.

Configuration files may write physical quantities either as bare numbers
in SI units or as strings carrying a unit suffix. These helpers convert
once at the boundary; the rest of the package works in metres, radians
and seconds.

Example:
    ```python
    parse_angle("10deg")      # 0.17453292519943295
    parse_angle("175mrad")    # 0.175
    parse_length("10cm")      # 0.1
    parse_complex_index("1.41-0.00672i")
    ```
"""

import math
import re

_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([a-zA-Zµ°]*)\s*$")

LENGTH_UNITS: dict[str, float] = {
    "": 1.0,
    "m": 1.0,
    "cm": 1e-2,
    "mm": 1e-3,
    "um": 1e-6,
    "µm": 1e-6,
    "nm": 1e-9,
}

ANGLE_UNITS: dict[str, float] = {
    "": 1.0,
    "rad": 1.0,
    "mrad": 1e-3,
    "deg": math.pi / 180.0,
    "°": math.pi / 180.0,
}

TIME_UNITS: dict[str, float] = {
    "": 1.0,
    "s": 1.0,
    "ms": 1e-3,
    "us": 1e-6,
    "ns": 1e-9,
    "ps": 1e-12,
}


def _parse_quantity(value: object, units: dict[str, float], kind: str) -> float:
    if isinstance(value, bool):
        raise ValueError(f"expected a {kind}, got a boolean")
    if isinstance(value, int | float):
        return float(value)
    if not isinstance(value, str):
        raise ValueError(f"expected a {kind}, got {type(value).__name__}")
    match = _QUANTITY.match(value)
    if match is None:
        raise ValueError(f"cannot parse {value!r} as a {kind}")
    number, unit = match.groups()
    try:
        scale = units[unit]
    except KeyError:
        known = ", ".join(u for u in units if u)
        raise ValueError(f"unknown {kind} unit {unit!r} (known: {known})") from None
    return float(number) * scale


def parse_length(value: object) -> float:
    """Parse a length in metres.

    Args:
        value: Number (metres) or string such as ``"10cm"``.

    Returns:
        Length in metres.

    Raises:
        ValueError: If the value or its unit cannot be parsed.
    """
    return _parse_quantity(value, LENGTH_UNITS, "length")


def parse_angle(value: object) -> float:
    """Parse an angle in radians.

    Args:
        value: Number (radians) or string such as ``"10deg"`` or ``"175mrad"``.

    Returns:
        Angle in radians.

    Raises:
        ValueError: If the value or its unit cannot be parsed.
    """
    return _parse_quantity(value, ANGLE_UNITS, "angle")


def parse_time(value: object) -> float:
    """Parse a duration in seconds.

    Args:
        value: Number (seconds) or string such as ``"35ns"``.

    Returns:
        Duration in seconds.
    """
    return _parse_quantity(value, TIME_UNITS, "time")


def parse_complex_index(value: object) -> complex:
    """Parse a complex refractive index.

    Accepts ``"1.41-0.00672i"`` (the ``i`` or ``j`` suffix both work), a
    bare number, or a two-element ``[real, imag]`` list.

    Args:
        value: Index in one of the accepted forms.

    Returns:
        The index as a Python complex, sign of the imaginary part unchanged.

    Raises:
        ValueError: If the value cannot be parsed.
    """
    if isinstance(value, bool):
        raise ValueError("expected a refractive index, got a boolean")
    if isinstance(value, int | float):
        return complex(value)
    if isinstance(value, list | tuple) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, str):
        text = value.replace(" ", "").replace("i", "j")
        try:
            return complex(text)
        except ValueError:
            raise ValueError(f"cannot parse {value!r} as a refractive index") from None
    raise ValueError(f"expected a refractive index, got {type(value).__name__}")


__all__ = [
    "parse_angle",
    "parse_complex_index",
    "parse_length",
    "parse_time",
]
