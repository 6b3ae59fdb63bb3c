"""Normal-ordered polynomials over generators with central commutators.

An :class:`Algebra` fixes a totally ordered list of generators, a
:class:`CommutationTable` of scalar brackets and a coefficient field.
Elements are :class:`NormalPoly` values: sums of monomials written in the
algebra's generator order.  Products are brought to normal order by the
single rewrite ``g h -> h g + [g, h]`` for out-of-order neighbours; because
every bracket is a scalar, the rewriting terminates and is confluent.

In Poisson mode the product is commutative and :func:`bracket` is the
derivation ``{f, g} = sum_ab df/da dg/db {a, b}``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType

from duronlab.exact import GaussRat, format_scalar

KINDS = ("position", "momentum", "time", "frequency-conjugate", "custom")
FIELDS = ("exact", "float")
MODES = ("commutator", "poisson")


class ContextError(ValueError):
    """Operands belong to different algebras."""


class PresetError(KeyError):
    """Unknown bracket-table preset."""


@dataclass(frozen=True, eq=False)
class Generator:
    """A named symbol.  Identity-equal: two generators with one name still differ."""

    name: str
    kind: str = "custom"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}")

    def __repr__(self):
        return f"Generator({self.name!r}, {self.kind!r})"


class CommutationTable:
    """Antisymmetric map ``(g, h) -> c`` meaning ``[g, h] = c * 1``.

    Unlisted pairs bracket to zero.  Values must be scalars; supplying both
    ``(g, h)`` and ``(h, g)`` is allowed only when they are negatives.
    """

    def __init__(self, entries=None, mode: str = "commutator", field: str = "exact"):
        if mode not in MODES:
            raise ValueError(f"bracket mode must be one of {MODES}")
        if field not in FIELDS:
            raise ValueError(f"field must be one of {FIELDS}")
        self.mode = mode
        self.field = field
        table = {}
        for (g, h), c in (entries or {}).items():
            c = _coerce(c, field)
            if not _is_scalar(c):
                raise TypeError("commutators must be central scalars")
            if g is h:
                if c:
                    raise ValueError(f"[{g.name},{g.name}] must vanish")
                continue
            for key, val in (((g, h), c), ((h, g), -c)):
                if key in table and table[key] != val:
                    raise ValueError(f"inconsistent entries for [{key[0].name},{key[1].name}]")
                table[key] = val
        self._entries = table

    def __call__(self, g: Generator, h: Generator):
        return self._entries.get((g, h), _zero(self.field))

    def items(self):
        return self._entries.items()


def _zero(field):
    return GaussRat(0) if field == "exact" else 0j


def _coerce(c, field):
    if field == "exact":
        return GaussRat.coerce(c)
    return complex(c)


def _is_scalar(c):
    return isinstance(c, (GaussRat, complex, int, float, Fraction))


class Algebra:
    """Context for :class:`NormalPoly`: ordered generators, table, field."""

    def __init__(self, generators, table: CommutationTable | dict | None = None,
                 field: str = "exact", mode: str = "commutator"):
        gens = tuple(generators)
        names = [g.name for g in gens]
        if len(set(names)) != len(names):
            raise ValueError("generator names must be unique within an algebra")
        if not isinstance(table, CommutationTable):
            table = CommutationTable(table, mode=mode, field=field)
        self.generators = gens
        self.table = table
        self.field = table.field
        self.mode = table.mode
        self._index = {g: k for k, g in enumerate(gens)}
        self._by_name = {g.name: g for g in gens}
        for (g, h), _ in table.items():
            if g not in self._index or h not in self._index:
                raise ContextError(f"table mentions generator outside the algebra: {g.name}/{h.name}")
        self._cache: dict[tuple, dict] = {}

    def __getitem__(self, name: str) -> NormalPoly:
        return self.gen(name)

    def gen(self, name_or_gen) -> NormalPoly:
        g = self._by_name[name_or_gen] if isinstance(name_or_gen, str) else name_or_gen
        exps = [0] * len(self.generators)
        exps[self._index[g]] = 1
        return NormalPoly(self, {tuple(exps): self.one_coef})

    @property
    def one_coef(self):
        return GaussRat(1) if self.field == "exact" else 1 + 0j

    def scalar(self, c) -> NormalPoly:
        c = _coerce(c, self.field)
        return NormalPoly(self, {self.unit_key: c} if c else {})

    @property
    def unit_key(self):
        return (0,) * len(self.generators)

    def zero(self) -> NormalPoly:
        return NormalPoly(self, {})

    # word-level normal ordering; words are tuples of generator indices
    def _key_to_word(self, key):
        word = []
        for k, e in enumerate(key):
            word.extend([k] * e)
        return tuple(word)

    def _word_to_key(self, word):
        exps = [0] * len(self.generators)
        for k in word:
            exps[k] += 1
        return tuple(exps)

    def normal_word(self, word: tuple) -> dict:
        """Normal-ordered expansion of a word of generator indices."""
        if self.mode == "poisson":
            return {self._word_to_key(word): self.one_coef}
        hit = self._cache.get(word)
        if hit is not None:
            return hit
        for i in range(len(word) - 1):
            if word[i] > word[i + 1]:
                g, h = word[i], word[i + 1]
                swapped = word[:i] + (h, g) + word[i + 2:]
                out = dict(self.normal_word(swapped))
                c = self.table(self.generators[g], self.generators[h])
                if c:
                    for key, coef in self.normal_word(word[:i] + word[i + 2:]).items():
                        _accumulate(out, key, c * coef)
                break
        else:
            out = {self._word_to_key(word): self.one_coef}
        self._cache[word] = out
        return out


def _accumulate(terms, key, coef):
    new = terms.get(key, 0) + coef
    if new:
        terms[key] = new
    else:
        terms.pop(key, None)


class NormalPoly:
    """Immutable normal-ordered polynomial; zero coefficients are never stored."""

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra: Algebra, terms: dict):
        clean = {}
        for key, c in terms.items():
            c = _coerce(c, algebra.field)
            if c:
                clean[tuple(key)] = c
        object.__setattr__(self, "algebra", algebra)
        object.__setattr__(self, "terms", MappingProxyType(clean))

    def __setattr__(self, name, value):
        raise AttributeError("NormalPoly is immutable")

    def _check(self, other):
        if isinstance(other, NormalPoly):
            if other.algebra is not self.algebra:
                raise ContextError("polynomials come from different algebras")
            return other
        if _is_scalar(other):
            return self.algebra.scalar(other)
        raise TypeError(f"cannot combine NormalPoly with {type(other).__name__}")

    def __add__(self, other):
        other = self._check(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            _accumulate(out, k, c)
        return NormalPoly(self.algebra, out)

    __radd__ = __add__

    def __neg__(self):
        return NormalPoly(self.algebra, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        if _is_scalar(other):
            c = _coerce(other, self.algebra.field)
            return NormalPoly(self.algebra, {k: c * v for k, v in self.terms.items()})
        return multiply(self, other)

    def __rmul__(self, other):
        if _is_scalar(other):
            return self * other
        return NotImplemented

    def __pow__(self, n: int):
        out = self.algebra.scalar(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if _is_scalar(other):
            other = self.algebra.scalar(other)
        if not isinstance(other, NormalPoly):
            return NotImplemented
        return self.algebra is other.algebra and dict(self.terms) == dict(other.terms)

    def __hash__(self):
        return hash((id(self.algebra), frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def degree(self) -> int:
        return max((sum(k) for k in self.terms), default=0)

    def is_scalar(self) -> bool:
        return all(k == self.algebra.unit_key for k in self.terms)

    def scalar_value(self):
        if not self.is_scalar():
            raise ValueError(f"{self} is not a scalar")
        return self.terms.get(self.algebra.unit_key, _zero(self.algebra.field))

    def __repr__(self):
        return f"NormalPoly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        gens = self.algebra.generators
        pieces = []
        for key in sorted(self.terms, key=lambda k: (-sum(k), tuple(-e for e in k))):
            c = self.terms[key]
            mono = " ".join(
                gens[i].name if e == 1 else f"{gens[i].name}^{e}"
                for i, e in enumerate(key) if e
            )
            cs = format_scalar(c)
            if mono:
                if cs == "1":
                    cs = ""
                elif cs == "-1":
                    cs = "-"
                pieces.append(f"{cs}{'' if cs in ('', '-') else ' '}{mono}")
            else:
                pieces.append(cs)
        text = pieces[0]
        for p in pieces[1:]:
            text += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return text


def multiply(p: NormalPoly, q: NormalPoly, table: CommutationTable | None = None) -> NormalPoly:
    """Normal-ordered product ``p q``.

    ``table``, when given, must be the table of the shared algebra; it exists
    so callers can make the dependence explicit.
    """
    q = p._check(q)
    alg = p.algebra
    if table is not None and table is not alg.table:
        raise ContextError("table does not belong to the operands' algebra")
    out: dict = {}
    for k1, c1 in p.terms.items():
        w1 = alg._key_to_word(k1)
        for k2, c2 in q.terms.items():
            for key, c in alg.normal_word(w1 + alg._key_to_word(k2)).items():
                _accumulate(out, key, c1 * c2 * c)
    return NormalPoly(alg, out)


def commutator(p: NormalPoly, q: NormalPoly, table=None) -> NormalPoly:
    return multiply(p, q, table) - multiply(q, p, table)


def anticommutator(p: NormalPoly, q: NormalPoly, table=None) -> NormalPoly:
    return multiply(p, q, table) + multiply(q, p, table)


def derivative(p: NormalPoly, gen) -> NormalPoly:
    """Partial derivative with respect to a generator (commutative reading)."""
    alg = p.algebra
    k = alg._index[alg._by_name[gen] if isinstance(gen, str) else gen]
    out: dict = {}
    for key, c in p.terms.items():
        if key[k]:
            new = list(key)
            new[k] -= 1
            _accumulate(out, tuple(new), c * key[k])
    return NormalPoly(alg, out)


def poisson_bracket(p: NormalPoly, q: NormalPoly) -> NormalPoly:
    q = p._check(q)
    alg = p.algebra
    out = alg.zero()
    for (g, h), c in alg.table.items():
        dp, dq = derivative(p, g), derivative(q, h)
        if dp and dq:
            out = out + (dp * dq) * c
    return out


def bracket(p: NormalPoly, q: NormalPoly) -> NormalPoly:
    """Commutator or Poisson bracket, according to the algebra's mode."""
    if p.algebra.mode == "poisson":
        return poisson_bracket(p, q)
    return commutator(p, q)


# -- table files -----------------------------------------------------------

def load_table(path, field: str = "exact", mode: str = "commutator") -> Algebra:
    """Read ``gen1 gen2 re im`` lines; generators are ordered by first mention."""
    with open(path, encoding="utf-8") as fh:
        return parse_table(fh.read(), field=field, mode=mode)


def parse_table(text: str, field: str = "exact", mode: str = "commutator") -> Algebra:
    gens: dict[str, Generator] = {}
    entries = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 4:
            raise ValueError(f"line {lineno}: expected 'gen1 gen2 re im', got {raw!r}")
        a, b, re, im = parts
        for name in (a, b):
            gens.setdefault(name, Generator(name))
        if field == "exact":
            val = GaussRat(Fraction(re), Fraction(im))
        else:
            val = complex(float(re), float(im))
        entries[(gens[a], gens[b])] = val
    return Algebra(gens.values(), CommutationTable(entries, mode=mode, field=field))


def dump_table(alg: Algebra) -> str:
    lines = []
    order = alg._index
    for (g, h), c in sorted(alg.table.items(), key=lambda kv: (order[kv[0][0]], order[kv[0][1]])):
        if order[g] < order[h]:
            c = GaussRat.coerce(c) if alg.field == "exact" else c
            re, im = (c.re, c.im) if isinstance(c, GaussRat) else (c.real, c.imag)
            lines.append(f"{g.name} {h.name} {re} {im}")
    return "\n".join(lines) + "\n"


# -- presets ---------------------------------------------------------------

# Commutators among the doubled mean/difference variables as they appear in
# the source text (all four doubling variables, six independent pairs).
BIALGEBRA_CLAIMED = {
    ("X", "pi"): GaussRat(0, 1),
    ("eta", "P"): GaussRat(0, 1),
    ("X", "P"): GaussRat(0),
    ("eta", "pi"): GaussRat(0),
    ("X", "eta"): GaussRat(0),
    ("P", "pi"): GaussRat(0),
}

DURON_CLAIMED = {
    ("T", "eps"): GaussRat(0, 1),
    ("tau", "E"): GaussRat(0, 1),
    ("T", "E"): GaussRat(0),
    ("tau", "eps"): GaussRat(0),
    ("T", "tau"): GaussRat(0),
    ("E", "eps"): GaussRat(0),
}

POISSON_CLAIMED = {
    ("X", "dp"): GaussRat(1),
    ("dx", "P"): GaussRat(1),
    ("X", "P"): GaussRat(0),
    ("dx", "dp"): GaussRat(0),
    ("X", "dx"): GaussRat(0),
    ("P", "dp"): GaussRat(0),
    ("T", "L"): GaussRat(1),
    ("dt", "Hsum"): GaussRat(1),
}

PRESETS = ("standard-doubling", "paper-doubling", "time-duron", "classical-poisson-doubling")


def _doubled_phase_space(second_sign: int):
    x1, x2 = Generator("x1", "position"), Generator("x2", "position")
    p1, p2 = Generator("p1", "momentum"), Generator("p2", "momentum")
    i = GaussRat(0, 1)
    alg = Algebra([x1, x2, p1, p2], {(x1, p1): i, (x2, p2): i * second_sign})
    half = Fraction(1, 2)
    derived = {
        "X": (alg["x1"] + alg["x2"]) * half,
        "eta": alg["x1"] - alg["x2"],
        "P": (alg["p1"] + alg["p2"]) * half,
        "pi": alg["p1"] - alg["p2"],
    }
    return alg, derived


def _time_duron():
    t1, t2 = Generator("t1", "time"), Generator("t2", "time")
    h1, h2 = Generator("h1", "frequency-conjugate"), Generator("h2", "frequency-conjugate")
    half_i = GaussRat(0, Fraction(1, 2))
    alg = Algebra([t1, t2, h1, h2], {(t1, h1): half_i, (t2, h2): -half_i})
    derived = {
        "T": alg["t1"] + alg["t2"],
        "tau": alg["t1"] - alg["t2"],
        "E": alg["h1"] + alg["h2"],
        "eps": alg["h1"] - alg["h2"],
    }
    return alg, derived


def _poisson_doubling():
    x1, x2 = Generator("x1", "position"), Generator("x2", "position")
    p1, p2 = Generator("p1", "momentum"), Generator("p2", "momentum")
    t1, t2 = Generator("t1", "time"), Generator("t2", "time")
    h1, h2 = Generator("h1", "frequency-conjugate"), Generator("h2", "frequency-conjugate")
    half = Fraction(1, 2)
    table = {(x1, p1): 1, (x2, p2): -1, (t1, h1): -half, (t2, h2): half}
    alg = Algebra([x1, x2, p1, p2, t1, t2, h1, h2], table, mode="poisson")
    g = alg.gen
    derived = {
        "X": (g("x1") + g("x2")) * half,
        "dx": g("x2") - g("x1"),
        "dp": g("p1") - g("p2"),
        "P": (g("p1") + g("p2")) * (-half),
        "T": g("t1") + g("t2"),
        "dt": g("t2") - g("t1"),
        "L": g("h2") - g("h1"),
        "Hsum": g("h2") + g("h1"),
    }
    return alg, derived


def preset(name: str):
    """Return ``(algebra, derived elements, claimed table, printed table)``."""
    if name == "standard-doubling":
        alg, d = _doubled_phase_space(+1)
        # expected values are the honest consequences of two standard copies
        claimed = {
            ("X", "pi"): GaussRat(0),
            ("eta", "P"): GaussRat(0),
            ("X", "P"): GaussRat(0, Fraction(1, 2)),
            ("eta", "pi"): GaussRat(0, 2),
            ("X", "eta"): GaussRat(0),
            ("P", "pi"): GaussRat(0),
        }
        return alg, d, claimed, BIALGEBRA_CLAIMED
    if name == "paper-doubling":
        alg, d = _doubled_phase_space(-1)
        return alg, d, BIALGEBRA_CLAIMED, BIALGEBRA_CLAIMED
    if name == "time-duron":
        alg, d = _time_duron()
        return alg, d, DURON_CLAIMED, DURON_CLAIMED
    if name == "classical-poisson-doubling":
        alg, d = _poisson_doubling()
        return alg, d, POISSON_CLAIMED, POISSON_CLAIMED
    raise PresetError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")


@dataclass(frozen=True)
class TableEntry:
    lhs: str
    rhs_expected: str
    rhs_computed: str
    passed: bool
    printed_rhs: str
    agrees_with_printed: bool

    def to_json(self):
        return {
            "lhs": self.lhs,
            "rhs_expected": self.rhs_expected,
            "rhs_computed": self.rhs_computed,
            "pass": self.passed,
            "printed_rhs": self.printed_rhs,
            "agrees_with_printed": self.agrees_with_printed,
        }


@dataclass(frozen=True)
class TableReport:
    preset: str
    entries: tuple

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    def entry(self, a: str, b: str) -> TableEntry:
        for e in self.entries:
            if e.lhs in (f"[{a},{b}]", f"{{{a},{b}}}"):
                return e
        raise KeyError((a, b))

    def to_json(self):
        return {"preset": self.preset, "entries": [e.to_json() for e in self.entries]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def verify_table(name: str) -> TableReport:
    """Evaluate every claimed bracket of a preset from its single-copy relations."""
    alg, derived, claimed, printed = preset(name)
    poisson = alg.mode == "poisson"
    entries = []
    for (a, b), expected in claimed.items():
        got = bracket(derived[a], derived[b])
        value = got.scalar_value() if got.is_scalar() else None
        lhs = f"{{{a},{b}}}" if poisson else f"[{a},{b}]"
        entries.append(TableEntry(
            lhs=lhs,
            rhs_expected=format_scalar(expected),
            rhs_computed=str(got),
            passed=value is not None and value == expected,
            printed_rhs=format_scalar(printed[(a, b)]),
            agrees_with_printed=value is not None and value == printed[(a, b)],
        ))
    return TableReport(name, tuple(entries))
