"""Star products and brackets on polynomial phase-space symbols.

A :class:`PhasePoly` is a polynomial in commuting ``x``, ``p`` and the
deformation parameter ``h`` (for hbar) with Gaussian-rational coefficients.
Internally the terms are keyed by ``(a, b, k)`` for ``x^a p^b h^k``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from math import comb
from types import MappingProxyType

from duronlab.exact import GaussRat, format_scalar, parse_scalar

_HALF_I = GaussRat(0, 1) / 2


def _falling(n: int, r: int) -> int:
    out = 1
    for j in range(r):
        out *= n - j
    return out


class PhasePoly:
    __slots__ = ("_terms",)

    def __init__(self, terms=None):
        clean = {}
        for key, c in (terms or {}).items():
            a, b, k = key if len(key) == 3 else (*key, 0)
            if min(a, b, k) < 0:
                raise ValueError(f"negative degree in {key}")
            c = GaussRat.coerce(c)
            if c:
                clean[(a, b, k)] = clean.get((a, b, k), GaussRat(0)) + c
        object.__setattr__(self, "_terms", MappingProxyType({k: v for k, v in clean.items() if v}))

    def __setattr__(self, name, value):
        raise AttributeError("PhasePoly is immutable")

    @property
    def terms(self):
        return self._terms

    @classmethod
    def monomial(cls, a: int = 0, b: int = 0, k: int = 0, c=1) -> "PhasePoly":
        return cls({(a, b, k): c})

    @classmethod
    def const(cls, c) -> "PhasePoly":
        return cls({(0, 0, 0): c})

    def coefficient(self, a: int, b: int) -> dict:
        """The hbar-polynomial multiplying ``x^a p^b`` as ``{k: coefficient}``."""
        return {k: c for (i, j, k), c in self._terms.items() if (i, j) == (a, b)}

    def hbar_part(self, k: int) -> "PhasePoly":
        return PhasePoly({(a, b, 0): c for (a, b, kk), c in self._terms.items() if kk == k})

    def hbar_degrees(self) -> list[int]:
        return sorted({k for (_, _, k) in self._terms})

    def at_hbar_zero(self) -> "PhasePoly":
        return self.hbar_part(0)

    def degree(self) -> int:
        return max((a + b for a, b, _ in self._terms), default=0)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if not isinstance(other, PhasePoly):
            try:
                other = PhasePoly.const(other)
            except TypeError:
                return NotImplemented
        return dict(self._terms) == dict(other._terms)

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __add__(self, other):
        other = _lift(other)
        out = dict(self._terms)
        for key, c in other._terms.items():
            out[key] = out.get(key, GaussRat(0)) + c
        return PhasePoly(out)

    __radd__ = __add__

    def __neg__(self):
        return PhasePoly({key: -c for key, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-_lift(other))

    def __rsub__(self, other):
        return _lift(other) - self

    def __mul__(self, other):
        """Pointwise (commutative) product."""
        other = _lift(other)
        out: dict = {}
        for (a1, b1, k1), c1 in self._terms.items():
            for (a2, b2, k2), c2 in other._terms.items():
                key = (a1 + a2, b1 + b2, k1 + k2)
                out[key] = out.get(key, GaussRat(0)) + c1 * c2
        return PhasePoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = PhasePoly.const(1)
        for _ in range(n):
            out = out * self
        return out

    def deriv(self, rx: int = 0, rp: int = 0) -> "PhasePoly":
        """``d^rx/dx^rx d^rp/dp^rp``."""
        out = {}
        for (a, b, k), c in self._terms.items():
            if a >= rx and b >= rp:
                out[(a - rx, b - rp, k)] = c * _falling(a, rx) * _falling(b, rp)
        return PhasePoly(out)

    def divide_hbar(self) -> "PhasePoly":
        if any(k == 0 for (_, _, k) in self._terms):
            raise ArithmeticError("polynomial has an hbar^0 part; not divisible by hbar")
        return PhasePoly({(a, b, k - 1): c for (a, b, k), c in self._terms.items()})

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"PhasePoly({format_poly(self)!r})"

    def to_json(self) -> list:
        return [
            {"x": a, "p": b, "h": k, "re": str(c.re), "im": str(c.im)}
            for (a, b, k), c in sorted(self._terms.items(), key=_order)
        ]


def _lift(v) -> PhasePoly:
    return v if isinstance(v, PhasePoly) else PhasePoly.const(v)


X = PhasePoly.monomial(1, 0)
P = PhasePoly.monomial(0, 1)
HBAR = PhasePoly.monomial(0, 0, 1)


# -- star product, two independent routes ------------------------------------

def star(f: PhasePoly, g: PhasePoly) -> PhasePoly:
    """Groenewold product as the finite bidifferential series.

    ``f * g = sum_n (i h/2)^n / n! sum_k C(n,k) (-1)^k
    (dx^{n-k} dp^k f)(dp^{n-k} dx^k g)``.
    """
    f, g = _lift(f), _lift(g)
    nmax = min(f.degree(), g.degree())
    out = PhasePoly()
    fact = 1
    for n in range(nmax + 1):
        if n:
            fact *= n
        pref = (_HALF_I ** n) / fact
        acc = PhasePoly()
        for k in range(n + 1):
            term = f.deriv(n - k, k) * g.deriv(k, n - k)
            acc = acc + term * (comb(n, k) * (-1) ** k)
        out = out + acc * PhasePoly.monomial(0, 0, n, pref)
    return out


def _bopp_x(g: PhasePoly) -> PhasePoly:
    return X * g + PhasePoly.monomial(0, 0, 1, _HALF_I) * g.deriv(0, 1)


def _bopp_p(g: PhasePoly) -> PhasePoly:
    return P * g - PhasePoly.monomial(0, 0, 1, _HALF_I) * g.deriv(1, 0)


def star_bopp(f: PhasePoly, g: PhasePoly) -> PhasePoly:
    """Star product through Bopp shifts acting on ``g``.

    Uses the symmetric-ordering identity
    ``x^a p^b = 2^-a sum_j C(a,j) x^(a-j) * p^b * x^j`` so that each
    monomial of ``f`` becomes a word in the shifted operators
    ``x + (i h/2) d/dp`` and ``p - (i h/2) d/dx``.
    """
    f, g = _lift(f), _lift(g)
    out = PhasePoly()
    for (a, b, k), c in f.terms.items():
        acc = PhasePoly()
        for j in range(a + 1):
            w = g
            for _ in range(j):
                w = _bopp_x(w)
            for _ in range(b):
                w = _bopp_p(w)
            for _ in range(a - j):
                w = _bopp_x(w)
            acc = acc + w * comb(a, j)
        out = out + acc * PhasePoly.monomial(0, 0, k, c / (2 ** a))
    return out


def moyal_bracket(f, g) -> PhasePoly:
    """``(f*g - g*f) / (i h)``."""
    f, g = _lift(f), _lift(g)
    diff = star(f, g) - star(g, f)
    return (diff * (-GaussRat(0, 1))).divide_hbar() if diff else PhasePoly()


def baker_bracket(f, g) -> PhasePoly:
    """``(f*g + g*f) / 2``."""
    f, g = _lift(f), _lift(g)
    return (star(f, g) + star(g, f)) * (GaussRat(1) / 2)


def poisson_bracket(f, g) -> PhasePoly:
    f, g = _lift(f), _lift(g)
    return f.deriv(1, 0) * g.deriv(0, 1) - f.deriv(0, 1) * g.deriv(1, 0)


@dataclass(frozen=True)
class LimitReport:
    moyal_minus_poisson: dict
    baker_minus_product: dict
    leading_order_vanishes: bool
    first_correction_order: int | None
    passed: bool

    def to_json(self) -> dict:
        return {
            "moyal_minus_poisson": {str(k): format_poly(v) for k, v in self.moyal_minus_poisson.items()},
            "baker_minus_product": {str(k): format_poly(v) for k, v in self.baker_minus_product.items()},
            "leading_order_vanishes": self.leading_order_vanishes,
            "first_correction_order": self.first_correction_order,
            "pass": self.passed,
        }


def classical_limit_report(f, g) -> LimitReport:
    """Split ``MB - PB`` and ``Baker - fg`` by hbar order.

    Passes when both differences have no hbar^0 or hbar^1 part, i.e. the
    first quantum correction is at least second order.
    """
    f, g = _lift(f), _lift(g)
    d1 = moyal_bracket(f, g) - poisson_bracket(f, g)
    d2 = baker_bracket(f, g) - f * g
    split1 = {k: d1.hbar_part(k) for k in d1.hbar_degrees()}
    split2 = {k: d2.hbar_part(k) for k in d2.hbar_degrees()}
    orders = sorted(set(split1) | set(split2))
    low = not any(k in (0, 1) for k in orders)
    return LimitReport(split1, split2, 0 not in orders, orders[0] if orders else None, low)


# -- text form ----------------------------------------------------------------

def _order(item):
    (a, b, k), _ = item
    return (-(a + b), -a, k)


def format_poly(f: PhasePoly) -> str:
    if not f.terms:
        return "0"
    parts = []
    for (a, b, k), c in sorted(f.terms.items(), key=_order):
        mono = " ".join(
            v if e == 1 else f"{v}^{e}" for v, e in (("x", a), ("p", b), ("h", k)) if e
        )
        s = format_scalar(c)
        neg = s.startswith("-")
        mag = format_scalar(-c) if neg else s
        if mono:
            body = mono if mag == "1" else f"{mag} {mono}"
        else:
            body = mag
        if not parts:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append((" - " if neg else " + ") + body)
    return "".join(parts)


_TERM_TOKEN = re.compile(
    r"\s*(?:(?P<var>[xph])(?:\^(?P<exp>\d+))?"
    r"|(?P<num>\([^()]*\)|\d+(?:\.\d+)?(?:/\d+)?i?(?:/\d+)?|i(?:/\d+)?))\s*"
)


def _split_terms(text: str):
    """Split at top-level ``+``/``-`` (not inside parentheses or after ``/``)."""
    terms, depth, start = [], 0, 0
    s = text.strip()
    for i, ch in enumerate(s):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch in "+-" and depth == 0 and i > start:
            prev = s[start:i].rstrip()
            if prev and prev[-1] not in "^/*(":
                terms.append(s[start:i])
                start = i
    terms.append(s[start:])
    return [t.strip() for t in terms if t.strip()]


def parse_poly(text: str) -> PhasePoly:
    """Parse ``c x^a p^b h^k`` monomials joined by ``+``/``-``.

    ``hbar`` is accepted as a synonym of ``h``; ``*`` between factors is optional.
    """
    src = text.replace("hbar", "h").replace("*", " ")
    if not src.strip():
        raise ValueError("empty polynomial")
    out = PhasePoly()
    for term in _split_terms(src):
        sign = 1
        if term[0] in "+-":
            sign = -1 if term[0] == "-" else 1
            term = term[1:].strip()
        coef = GaussRat(sign)
        deg = {"x": 0, "p": 0, "h": 0}
        pos = 0
        while pos < len(term):
            m = _TERM_TOKEN.match(term, pos)
            if not m or m.end() == pos:
                raise ValueError(f"bad input {term[pos:]!r} in term {term!r}")
            if m.group("var"):
                deg[m.group("var")] += int(m.group("exp") or 1)
            elif m.group("num"):
                coef = coef * parse_scalar(m.group("num"))
            pos = m.end()
        out = out + PhasePoly.monomial(deg["x"], deg["p"], deg["h"], coef)
    return out
