from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from duronlab.exact import I, ONE, ZERO, GaussRat, format_scalar, parse_scalar

fracs = st.builds(Fraction, st.integers(-40, 40), st.integers(1, 12))
gauss = st.builds(GaussRat, fracs, fracs)


def test_unit_arithmetic():
    assert I * I == -1
    assert (ONE + I) * (ONE - I) == 2
    assert GaussRat(1, 1) / GaussRat(1, -1) == I
    assert ZERO == 0 and not ZERO


@pytest.mark.parametrize("value, text", [
    (GaussRat(0, Fraction(1, 2)), "i/2"),
    (GaussRat(Fraction(1, 2), Fraction(-3, 2)), "(1/2-3i/2)"),
    (GaussRat(-1), "-1"),
    (GaussRat(0, -1), "-i"),
    (GaussRat(0), "0"),
])
def test_format(value, text):
    assert format_scalar(value) == text
    assert parse_scalar(text) == value


@given(gauss)
def test_format_parse_roundtrip(z):
    assert parse_scalar(format_scalar(z)) == z


@given(gauss, gauss, gauss)
def test_field_laws(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == 0
    if b:
        assert (a / b) * b == a


def test_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        ONE / ZERO


def test_mixed_types():
    assert GaussRat(2) == 2
    assert 3 * I == GaussRat(0, 3)
    assert Fraction(1, 2) + I == GaussRat(Fraction(1, 2), 1)
    assert complex(GaussRat(1, 2)) == 1 + 2j
