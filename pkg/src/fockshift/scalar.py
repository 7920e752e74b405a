"""Scalar backends: exact rationals (``fractions.Fraction``) or float64.

All numeric code in the package goes through :class:`EngineMode` so the same
operator algebra runs either bit-exactly or in double precision.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational


class UnsupportedInExactMode(ValueError):
    pass


class DomainError(ValueError):
    pass


@dataclass(frozen=True)
class EngineMode:
    exact: bool = True
    tolerance: float = 1e-9

    def __post_init__(self):
        if not self.exact and not self.tolerance > 0:
            raise ValueError("float mode needs a positive tolerance")

    @property
    def name(self) -> str:
        return "exact" if self.exact else "float"

    def coerce(self, x):
        if self.exact:
            if isinstance(x, float):
                raise UnsupportedInExactMode(f"float value {x!r} in exact mode")
            return Fraction(x)
        return float(x)

    def close(self, x, y) -> bool:
        if self.exact:
            return x == y
        return abs(x - y) <= self.tolerance

    def __str__(self):
        return "exact" if self.exact else f"float:{self.tolerance:g}"


EXACT = EngineMode()
FLOAT = EngineMode(exact=False)


def parse_mode(text: str) -> EngineMode:
    """Parse ``exact``, ``float`` or ``float:<tol>``."""
    text = text.strip().lower()
    if text == "exact":
        return EXACT
    if text == "float":
        return FLOAT
    if text.startswith("float:"):
        return EngineMode(exact=False, tolerance=float(text[6:]))
    raise ValueError(f"unknown mode {text!r}")


def parse_scalar(text: str, mode: EngineMode = EXACT):
    text = text.strip()
    if mode.exact:
        return Fraction(text)
    if "/" in text:
        return float(Fraction(text))
    return float(text)


def format_scalar(x) -> str:
    """``num/den`` for rationals (bare integer when den == 1), repr for floats."""
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, Rational):
        return str(Fraction(x))
    return str(x)


# Lanczos approximation, g = 7, n = 9.
_LANCZOS_G = 7
_LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_SQRT_2PI = math.sqrt(2 * math.pi)


def _lanczos(x: float) -> float:
    if x < 0.5:
        return math.pi / (math.sin(math.pi * x) * _lanczos(1.0 - x))
    x -= 1.0
    acc = _LANCZOS_COEFFS[0]
    for i in range(1, len(_LANCZOS_COEFFS)):
        acc += _LANCZOS_COEFFS[i] / (x + i)
    t = x + _LANCZOS_G + 0.5
    # split the power so t**(x+1/2) does not overflow near x = 170
    half = t ** ((x + 0.5) / 2)
    return _SQRT_2PI * half * (math.exp(-t) * half) * acc


def gamma_fn(x, mode: EngineMode = FLOAT) -> float:
    """Gamma function for x > 0 (float mode only)."""
    if mode.exact:
        raise UnsupportedInExactMode("gamma_fn is only available in float mode")
    x = float(x)
    if not x > 0:
        raise DomainError(f"gamma_fn needs x > 0, got {x}")
    if x.is_integer() and x <= 23:
        return float(math.factorial(int(x) - 1))
    return _lanczos(x)
