"""Exact Gaussian-rational scalars.

``GaussRat`` is a complex number whose real and imaginary parts are
:class:`fractions.Fraction`.  It interoperates with ``int`` and ``Fraction``
and is the default coefficient field of the symbolic engines.
"""

from __future__ import annotations

import numbers
from fractions import Fraction


class GaussRat:
    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if isinstance(re, GaussRat):
            re, im = re.re, re.im + Fraction(im)
        elif isinstance(re, complex):
            re, im = Fraction(re.real), Fraction(re.imag) + Fraction(im)
        self.re = re if type(re) is Fraction else Fraction(re)
        self.im = im if type(im) is Fraction else Fraction(im)

    @classmethod
    def _raw(cls, re: Fraction, im: Fraction) -> "GaussRat":
        obj = object.__new__(cls)
        obj.re, obj.im = re, im
        return obj

    @classmethod
    def coerce(cls, value) -> "GaussRat":
        if isinstance(value, GaussRat):
            return value
        if isinstance(value, (int, Fraction)):
            return cls(value)
        if isinstance(value, complex):
            return cls(value.real, value.imag)
        if isinstance(value, float):
            return cls(Fraction(value))
        if isinstance(value, str):
            return parse_scalar(value)
        raise TypeError(f"cannot convert {type(value).__name__} to GaussRat")

    def __repr__(self):
        return f"GaussRat({self.re}, {self.im})"

    def __str__(self):
        return format_scalar(self)

    # -- arithmetic --
    def __add__(self, other):
        if not isinstance(other, (GaussRat, int, Fraction)):
            return NotImplemented
        o = other if type(other) is GaussRat else GaussRat.coerce(other)
        return GaussRat._raw(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussRat._raw(-self.re, -self.im)

    def __sub__(self, other):
        if not isinstance(other, (GaussRat, int, Fraction)):
            return NotImplemented
        o = other if type(other) is GaussRat else GaussRat.coerce(other)
        return GaussRat._raw(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, (GaussRat, int, Fraction)):
            return NotImplemented
        o = other if type(other) is GaussRat else GaussRat.coerce(other)
        if not self.im and not o.im:
            return GaussRat._raw(self.re * o.re, self.im)
        return GaussRat._raw(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, (GaussRat, int, Fraction)):
            return NotImplemented
        o = GaussRat.coerce(other)
        den = o.re * o.re + o.im * o.im
        if den == 0:
            raise ZeroDivisionError("GaussRat division by zero")
        num = self * o.conjugate()
        return GaussRat(num.re / den, num.im / den)

    def __rtruediv__(self, other):
        return GaussRat.coerce(other) / self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return (GaussRat(1) / self) ** (-n)
        out = GaussRat(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conjugate(self) -> "GaussRat":
        return GaussRat._raw(self.re, -self.im)

    # -- comparison --
    def __eq__(self, other):
        if isinstance(other, GaussRat):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        if isinstance(other, numbers.Complex):
            return complex(self) == other
        return NotImplemented

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))


I = GaussRat(0, 1)
ZERO = GaussRat(0)
ONE = GaussRat(1)


def _fmt_frac(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_scalar(z) -> str:
    """Compact text for a scalar: ``3``, ``-1/2``, ``i``, ``-2i``, ``(1+i/2)``."""
    if not isinstance(z, GaussRat):
        if isinstance(z, complex) and z.imag == 0:
            z = z.real
        return repr(z) if not isinstance(z, complex) else f"({z.real!r}{z.imag:+.17g}i)"
    re, im = z.re, z.im
    if im == 0:
        return _fmt_frac(re)
    if im == 1:
        ims = "i"
    elif im == -1:
        ims = "-i"
    elif im.denominator == 1:
        ims = f"{im.numerator}i"
    else:
        num = {1: "", -1: "-"}.get(im.numerator, str(im.numerator))
        ims = f"{num}i/{im.denominator}"
    if re == 0:
        return ims
    sign = "" if ims.startswith("-") else "+"
    return f"({_fmt_frac(re)}{sign}{ims})"


def parse_scalar(text: str) -> GaussRat:
    """Inverse of :func:`format_scalar` for the forms it produces, plus decimals."""
    s = text.strip().replace(" ", "")
    if s.startswith("(") and s.endswith(")"):
        s = s[1:-1]
    if not s:
        raise ValueError("empty scalar")
    # split into real and imaginary parts at a sign that is not leading
    cut = None
    for k in range(len(s) - 1, 0, -1):
        if s[k] in "+-" and s[k - 1] not in "eE/":
            cut = k
            break
    parts = [s] if cut is None else [s[:cut], s[cut:]]
    total = GaussRat(0)
    for part in parts:
        if "i" in part:
            mag = part.replace("i", "", 1)
            if mag.lstrip("+-").startswith("/"):
                mag = mag.replace("/", "1/", 1)
            if mag in ("", "+"):
                val = Fraction(1)
            elif mag == "-":
                val = Fraction(-1)
            else:
                val = Fraction(mag)
            total = total + GaussRat(0, val)
        else:
            total = total + GaussRat(Fraction(part))
    return total
