"""Exact money arithmetic.

All balances are plain Python ints denominating minor currency units
(cents).  Python integers are arbitrary precision, so addition and
subtraction are exact and overflow cannot occur.  Ratios (reserve
requirements, risk weights) are fractions.Fraction, never floats.

Scenario files and the CLI speak in whole currency units ("1000" means
$1000); internally every amount is minor units (100000).
"""

from __future__ import annotations

from fractions import Fraction

Money = int

MINOR_PER_UNIT = 100


def parse_amount(text: str) -> Money:
    """Parse a decimal currency string ("1010.50") into minor units.

    Rejects negative amounts and precision finer than one minor unit.
    """
    s = text.strip()
    if not s:
        raise ValueError("empty amount")
    negative = s.startswith("-")
    if negative:
        raise ValueError(f"negative amount not allowed: {text!r}")
    if s.count(".") > 1:
        raise ValueError(f"malformed amount: {text!r}")
    whole, _, frac = s.partition(".")
    if not whole.isdigit() or (frac and not frac.isdigit()):
        raise ValueError(f"malformed amount: {text!r}")
    if len(frac) > 2:
        raise ValueError(f"sub-cent precision not representable: {text!r}")
    cents = int(whole) * MINOR_PER_UNIT + int(frac.ljust(2, "0") or 0)
    return cents


def format_amount(amount: Money) -> str:
    """Render minor units as a decimal string, trimming whole amounts.

    100000 -> "1000", 101050 -> "1010.50".
    """
    sign = "-" if amount < 0 else ""
    a = abs(amount)
    units, cents = divmod(a, MINOR_PER_UNIT)
    if cents == 0:
        return f"{sign}{units}"
    return f"{sign}{units}.{cents:02d}"


def parse_ratio(text: str) -> Fraction:
    """Parse "1/10", "0.1" or "10%" into an exact Fraction."""
    s = text.strip()
    if s.endswith("%"):
        return Fraction(s[:-1]) / 100
    return Fraction(s)


def ceil_div(num: int, den: int) -> int:
    if den <= 0:
        raise ValueError("denominator must be positive")
    return -((-num) // den)


def ceil_frac(value: Fraction) -> int:
    return ceil_div(value.numerator, value.denominator)


def floor_frac(value: Fraction) -> int:
    return value.numerator // value.denominator


def ceil_mul(ratio: Fraction, amount: Money) -> Money:
    """ratio * amount rounded up (used where rounding must tighten)."""
    return ceil_frac(ratio * amount)


def floor_mul(ratio: Fraction, amount: Money) -> Money:
    """ratio * amount rounded down (used where rounding must tighten)."""
    return floor_frac(ratio * amount)
