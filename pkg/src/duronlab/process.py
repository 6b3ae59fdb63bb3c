"""Strength-weighted process brackets and their neighbouring products.

Three multiplications live here side by side:

* :func:`compose` -- the groupoid product ``[A,B][B,C] = [A,C]``; raises
  :class:`UndefinedComposition` when the middle labels differ.
* :func:`incidence_product` -- ``|A><B| . |C><D| = delta_BC |A><D|``; a
  mismatch gives the zero element instead of an error.
* :func:`iterant_star` -- Kauffman's componentwise product of ordered pairs
  with a swap operator ``eta``.

Strengths are exact :class:`~duronlab.exact.GaussRat` values.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from duronlab.exact import GaussRat, format_scalar


class UndefinedComposition(ArithmeticError):
    """``[A,B][C,D]`` with ``B != C`` has no value in the groupoid."""


def merge_labels(a: str, b: str) -> str:
    """Formal label sum: ``merge_labels("A", "C+B") == "A+B+C"``."""
    parts = Counter(a.split("+")) + Counter(b.split("+"))
    return "+".join(sorted(parts.elements()))


@dataclass(frozen=True)
class ProcessBracket:
    left: str
    right: str
    strength: GaussRat = field(default_factory=lambda: GaussRat(1))

    def __post_init__(self):
        object.__setattr__(self, "strength", GaussRat.coerce(self.strength))

    @classmethod
    def scaled(cls, k_left, left: str, k_right, right: str) -> "ProcessBracket":
        """``[kA, kB] -> k[A, B]``; the two strengths must agree."""
        kl, kr = GaussRat.coerce(k_left), GaussRat.coerce(k_right)
        if kl != kr:
            raise ValueError(f"[{kl}{left},{kr}{right}] has no common strength")
        return cls(left, right, kl)

    def conjugate(self) -> "ProcessBracket":
        """``(k[A,B])* = -k*[B,A]``."""
        return ProcessBracket(self.right, self.left, -self.strength.conjugate())

    def __mul__(self, other):
        if isinstance(other, ProcessBracket):
            return compose(self, other)
        return ProcessBracket(self.left, self.right, self.strength * GaussRat.coerce(other))

    def __rmul__(self, k):
        return ProcessBracket(self.left, self.right, GaussRat.coerce(k) * self.strength)

    def __str__(self):
        return ProcessElement((self,)).pretty()


def compose(b1: ProcessBracket, b2: ProcessBracket) -> ProcessBracket:
    if b1.right != b2.left:
        raise UndefinedComposition(
            f"[{b1.left},{b1.right}][{b2.left},{b2.right}] is not defined ({b1.right} != {b2.left})"
        )
    return ProcessBracket(b1.left, b2.right, b1.strength * b2.strength)


@dataclass(frozen=True)
class ProcessElement:
    """Formal sum of brackets.  Order of terms is kept; see :meth:`normalized`."""

    terms: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))

    def __add__(self, other: "ProcessElement") -> "ProcessElement":
        if isinstance(other, ProcessBracket):
            other = ProcessElement((other,))
        return ProcessElement(self.terms + other.terms)

    def __mul__(self, other):
        if isinstance(other, ProcessBracket):
            other = ProcessElement((other,))
        if isinstance(other, ProcessElement):
            return ProcessElement(tuple(compose(a, b) for a in self.terms for b in other.terms))
        k = GaussRat.coerce(other)
        return ProcessElement(tuple(b * k for b in self.terms))

    def conjugate(self) -> "ProcessElement":
        return ProcessElement(tuple(b.conjugate() for b in self.terms))

    def normalized(self) -> "ProcessElement":
        """Combine brackets with equal labels and drop zero strengths."""
        acc: dict[tuple, GaussRat] = {}
        for b in self.terms:
            key = (b.left, b.right)
            acc[key] = acc.get(key, GaussRat(0)) + b.strength
        return ProcessElement(tuple(ProcessBracket(l, r, k) for (l, r), k in acc.items() if k))

    def merged(self) -> ProcessBracket:
        """Order-of-coexistence sum ``[A,B] + [C,D] = [A+C, B+D]``.

        Every term must carry the same strength, which the merged bracket keeps.
        """
        if not self.terms:
            raise ValueError("cannot merge an empty sum")
        k = self.terms[0].strength
        if any(b.strength != k for b in self.terms):
            raise ValueError("label merge needs equal strengths")
        left, right = self.terms[0].left, self.terms[0].right
        for b in self.terms[1:]:
            left, right = merge_labels(left, b.left), merge_labels(right, b.right)
        return ProcessBracket(left, right, k)

    def __eq__(self, other):
        if isinstance(other, ProcessBracket):
            other = ProcessElement((other,))
        if not isinstance(other, ProcessElement):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)

    def pretty(self) -> str:
        if not self.terms:
            return "0"
        out = []
        for n, b in enumerate(self.terms):
            k = b.strength
            neg = format_scalar(k).startswith("-")
            mag = -k if neg else k
            coef = "" if mag == 1 else format_scalar(mag)
            text = f"{coef}[{b.left},{b.right}]"
            if n == 0:
                out.append(("-" if neg else "") + text)
            else:
                out.append((" - " if neg else " + ") + text)
        return "".join(out)

    def __str__(self):
        return self.pretty()


# -- incidence algebra ------------------------------------------------------

@dataclass(frozen=True)
class Incidence:
    """Linear combination of ``|A><B|`` units: a mapping ``(A, B) -> coefficient``."""

    terms: tuple = ()

    @classmethod
    def unit(cls, a: str, b: str, k=1) -> "Incidence":
        return cls((((a, b), GaussRat.coerce(k)),))

    def as_dict(self) -> dict:
        out: dict = {}
        for key, k in self.terms:
            out[key] = out.get(key, GaussRat(0)) + k
        return {key: k for key, k in out.items() if k}

    def __post_init__(self):
        clean = {}
        for key, k in self.terms:
            clean[key] = clean.get(key, GaussRat(0)) + GaussRat.coerce(k)
        object.__setattr__(self, "terms", tuple(sorted((kv for kv in clean.items() if kv[1]),
                                                       key=lambda kv: kv[0])))

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "Incidence") -> "Incidence":
        return Incidence(self.terms + other.terms)

    def __mul__(self, other: "Incidence") -> "Incidence":
        return incidence_product(self, other)

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(
            f"{'' if k == 1 else format_scalar(k)}|{a}><{b}|" for (a, b), k in self.terms
        )


def incidence_product(e1: Incidence, e2: Incidence) -> Incidence:
    out = []
    for (a, b), k1 in e1.terms:
        for (c, d), k2 in e2.terms:
            if b == c:
                out.append(((a, d), k1 * k2))
    return Incidence(tuple(out))


# -- iterants ---------------------------------------------------------------

@dataclass(frozen=True)
class Iterant:
    """Ordered pair ``[a, b]``, optionally followed by the swap ``eta``."""

    a: object
    b: object
    shifted: bool = False

    def __post_init__(self):
        object.__setattr__(self, "a", _num(self.a))
        object.__setattr__(self, "b", _num(self.b))

    def __mul__(self, other):
        if isinstance(other, Iterant):
            return iterant_star(self, other)
        k = _num(other)
        return Iterant(k * self.a, k * self.b, self.shifted)

    def __rmul__(self, k):
        return self * k

    def __neg__(self):
        return Iterant(-self.a, -self.b, self.shifted)

    def __str__(self):
        return f"[{format_scalar(self.a)},{format_scalar(self.b)}]" + ("eta" if self.shifted else "")


def _num(x):
    if isinstance(x, (GaussRat, int, Fraction, str)):
        return GaussRat.coerce(x)
    return complex(x)


def iterant_star(u: Iterant, v: Iterant) -> Iterant:
    """``[a,b] [c,d] = [ac, bd]`` with ``eta [c,d] = [d,c] eta`` and ``eta^2 = 1``."""
    c, d = (v.b, v.a) if u.shifted else (v.a, v.b)
    return Iterant(u.a * c, u.b * d, u.shifted != v.shifted)


SWAP = np.array([[0, 1], [1, 0]], dtype=complex)


def iterant_matrix(u: Iterant, exact: bool = False):
    """2x2 image: ``[a,b] -> diag(a,b)``, ``eta -> swap``.

    With ``exact=True`` returns a nested tuple of ``GaussRat`` entries.
    """
    if exact:
        z = GaussRat(0)
        if u.shifted:
            return ((z, u.a), (u.b, z))
        return ((u.a, z), (z, u.b))
    m = np.diag([complex(u.a), complex(u.b)])
    return m @ SWAP if u.shifted else m


def matmul2(m1, m2):
    """Exact 2x2 product for nested-tuple matrices."""
    return tuple(
        tuple(m1[i][0] * m2[0][j] + m1[i][1] * m2[1][j] for j in range(2)) for i in range(2)
    )


def quaternion_units():
    """``I = [i,-i]``, ``J = [1,-1]eta``, ``K = [i,i]eta``."""
    i = GaussRat(0, 1)
    return Iterant(i, -i), Iterant(1, -1, True), Iterant(i, i, True)


ITERANT_ONE = Iterant(1, 1)


# -- Heisenberg transitions -------------------------------------------------

@dataclass(frozen=True)
class TransitionSystem:
    frequencies: tuple
    amplitudes: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex)
        n = len(self.frequencies)
        if amp.shape != (n, n):
            raise ValueError(f"amplitudes must be {n}x{n}")
        object.__setattr__(self, "frequencies", tuple(self.frequencies))
        object.__setattr__(self, "amplitudes", amp)

    def transition_frequency(self, m: int, n: int):
        return self.frequencies[m] - self.frequencies[n]


def transition_evolve(ts: TransitionSystem, t: float | None = None) -> np.ndarray:
    """``X_mn(t) = R_mn exp[i (nu_m - nu_n) t]``."""
    t = ts.t if t is None else t
    nu = np.array([float(v) for v in ts.frequencies])
    return ts.amplitudes * np.exp(1j * np.subtract.outer(nu, nu) * t)


@dataclass(frozen=True)
class RitzReport:
    checked: int
    failures: tuple

    @property
    def passed(self) -> bool:
        return not self.failures


def ritz_check(ts: TransitionSystem) -> RitzReport:
    """Check ``nu_mj + nu_jn == nu_mn`` for all index triples (exact for rationals)."""
    n = len(ts.frequencies)
    bad = []
    for m in range(n):
        for j in range(n):
            for k in range(n):
                lhs = ts.transition_frequency(m, j) + ts.transition_frequency(j, k)
                if lhs != ts.transition_frequency(m, k):
                    bad.append((m, j, k))
    return RitzReport(n ** 3, tuple(bad))


def transition_product(ts: TransitionSystem, t: float | None = None) -> tuple[np.ndarray, float]:
    """``X(t)^2`` and its max deviation from ``exp[i(nu_m - nu_n)t] (R^2)_mn``."""
    t = ts.t if t is None else t
    x = transition_evolve(ts, t)
    sq = x @ x
    nu = np.array([float(v) for v in ts.frequencies])
    expected = np.exp(1j * np.subtract.outer(nu, nu) * t) * (ts.amplitudes @ ts.amplitudes)
    return sq, float(np.max(np.abs(sq - expected), initial=0.0))
