from fractions import Fraction

import pytest

from numeric import competitive_bound, format_number, format_ratio, leq, to_number


@pytest.mark.parametrize(
    "text, expected",
    [("3", 3), ("-1", -1), ("0.25", Fraction(1, 4)), ("1/3", Fraction(1, 3)), ("1e-6", Fraction(1, 10**6)), ("4/2", 2)],
)
def test_to_number_parses_exactly(text, expected):
    value = to_number(text)
    assert value == expected
    assert type(value) is type(expected)


@pytest.mark.parametrize("text", ["nan", "inf", "-Infinity"])
def test_to_number_rejects_non_finite(text):
    with pytest.raises(ValueError):
        to_number(text)


def test_floats_stay_floats_unless_integral():
    assert to_number(2.0) == 2 and isinstance(to_number(2.0), int)
    assert isinstance(to_number(0.5), float)


@pytest.mark.parametrize(
    "value, text",
    [(5, "5"), (Fraction(1, 4), "0.25"), (Fraction(-3, 8), "-0.375"), (Fraction(5, 3), "5/3"), (Fraction(1, 10**6), "0.000001"), (0.5, "0.5")],
)
def test_format_number_is_canonical(value, text):
    assert format_number(value) == text
    assert to_number(text) == value


def test_format_ratio_honours_exact_flag():
    assert format_ratio(Fraction(5, 3), exact=True) == "5/3"
    assert format_ratio(Fraction(5, 3), exact=False) == "1.66666666667"
    assert format_ratio(3, exact=False) == "3"


def test_leq_exact_and_tolerant():
    assert leq(Fraction(1, 3), Fraction(1, 3))
    assert not leq(Fraction(1, 3) + Fraction(1, 10**12), Fraction(1, 3))
    assert leq(1.0 + 1e-12, 1.0)
    assert not leq(1.0 + 1e-6, 1.0)


def test_competitive_bound():
    assert competitive_bound(3) == 3
    assert competitive_bound(4) == 2
    assert competitive_bound(5) == Fraction(5, 3)
    with pytest.raises(ValueError):
        competitive_bound(2)
