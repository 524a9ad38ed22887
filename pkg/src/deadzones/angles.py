"""Circle arithmetic helpers: everything here works modulo 2*pi.

Angles are plain floats (radians). Reduction maps to [0, 2*pi); the signed
variant maps to [-pi, pi). Both accept numpy arrays.
"""

from __future__ import annotations

import math
import re

import numpy as np

from .errors import UsageError

TWO_PI = 2.0 * math.pi


def wrap(psi):
    """Reduce an angle (or array) to [0, 2*pi)."""
    if isinstance(psi, np.ndarray):
        out = np.mod(psi, TWO_PI)
        # mod can round up to exactly 2*pi for tiny negative inputs
        return np.where(out >= TWO_PI, out - TWO_PI, out)
    x = math.fmod(psi, TWO_PI)
    if x < 0.0:
        x += TWO_PI
    return 0.0 if x >= TWO_PI else x


def wrap_signed(psi):
    """Reduce an angle (or array) to [-pi, pi)."""
    return wrap(psi + math.pi) - math.pi


def circle_dist(a, b) -> float:
    """Shortest arc distance between two angles."""
    d = abs(wrap(a - b))
    return min(d, TWO_PI - d)


_ANGLE_RE = re.compile(
    r"^\s*(?P<sign>[+-]?)\s*(?P<coef>\d+(?:\.\d*)?)?\s*(?P<pi>pi)?\s*(?:/\s*(?P<den>\d+(?:\.\d*)?))?\s*$"
)


def parse_angle(text: str) -> float:
    """Parse an angle given in radians, with "pi" literal support.

    Accepted forms: "1.25", "pi", "-pi/3", "5pi/6", "2pi", "0.9pi".
    """
    s = str(text).strip()
    m = _ANGLE_RE.match(s)
    if not m or (m.group("coef") is None and m.group("pi") is None):
        raise UsageError(f"cannot parse angle: {text!r}")
    value = float(m.group("coef")) if m.group("coef") is not None else 1.0
    if m.group("pi"):
        value *= math.pi
    if m.group("den") is not None:
        den = float(m.group("den"))
        if den == 0:
            raise UsageError(f"zero denominator in angle: {text!r}")
        value /= den
    if m.group("sign") == "-":
        value = -value
    return value


def parse_angle_list(text: str) -> list[float]:
    """Parse a comma-separated list of angles ("0,2pi/3,4pi/3")."""
    items = [p for p in str(text).split(",") if p.strip() != ""]
    if not items:
        raise UsageError(f"empty angle list: {text!r}")
    return [parse_angle(p) for p in items]
