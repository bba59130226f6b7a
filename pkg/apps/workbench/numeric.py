"""Exact/float number helpers shared by every module."""
import math
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Union

Number = Union[int, Fraction, float]

DEFAULT_TOLERANCE = 1e-9


def normalize(x: Number) -> Number:
    """Collapse integral fractions to int so integer instances stay on fast int arithmetic."""
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x.numerator)
    return x


def is_exact(x: Number) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


def to_number(value: Union[str, int, float, Fraction]) -> Number:
    """
    Parse a numeric literal.

    Decimal, scientific and "p/q" strings become exact rationals; Python floats
    stay floats unless they are integral.
    """
    if isinstance(value, bool):
        raise ValueError(f"not a number: {value!r}")
    if isinstance(value, (int, Fraction)):
        return normalize(Fraction(value))
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite number: {value!r}")
        return int(value) if value.is_integer() else value
    text = str(value).strip()
    if text.lower() in {"nan", "inf", "-inf", "+inf", "infinity", "-infinity"}:
        raise ValueError(f"non-finite number: {value!r}")
    return normalize(Fraction(text))


def _terminates(q: Fraction) -> bool:
    d = q.denominator
    for p in (2, 5):
        while d % p == 0:
            d //= p
    return d == 1


def format_number(x: Number) -> str:
    """Canonical text: integers plain, terminating rationals as decimals, others as p/q, floats by repr."""
    if isinstance(x, float):
        return repr(x)
    q = Fraction(x)
    if q.denominator == 1:
        return str(q.numerator)
    if not _terminates(q):
        return f"{q.numerator}/{q.denominator}"
    with localcontext() as ctx:
        ctx.prec = len(str(abs(q.numerator))) + 4 * q.denominator.bit_length() + 8
        d = Decimal(q.numerator) / Decimal(q.denominator)
    return format(d.normalize(), "f")


def format_ratio(x: Number, exact: bool) -> str:
    """Render a value for CSV: exact fractions with --exact, decimals otherwise."""
    if is_exact(x):
        q = Fraction(x)
        if q.denominator == 1:
            return str(q.numerator)
        if exact:
            return f"{q.numerator}/{q.denominator}"
    return f"{float(x):.12g}"


def leq(a: Number, b: Number, tol: float = DEFAULT_TOLERANCE) -> bool:
    """a <= b, exactly for rationals, within relative tolerance otherwise."""
    if is_exact(a) and is_exact(b):
        return a <= b
    fa, fb = float(a), float(b)
    return fa <= fb + tol * max(1.0, abs(fa), abs(fb))


def close(a: Number, b: Number, tol: float = DEFAULT_TOLERANCE) -> bool:
    return leq(a, b, tol) and leq(b, a, tol)


def competitive_bound(k: int) -> Fraction:
    """1 + 2/(k-2), the greedy guarantee under augmentation k >= 3."""
    if k < 3:
        raise ValueError(f"competitive bound needs k >= 3 (got {k})")
    return Fraction(k, k - 2)


def ratio(numerator: Number, denominator: Number) -> Number:
    if is_exact(numerator) and is_exact(denominator):
        return normalize(Fraction(numerator) / Fraction(denominator))
    return float(numerator) / float(denominator)


def exact_sum(values) -> Number:
    total: Number = 0
    for v in values:
        total = total + v
    return normalize(total) if is_exact(total) else total
