from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from duronlab import ccr
from duronlab.exact import I, GaussRat


def heisenberg():
    x, p = ccr.Generator("x", "position"), ccr.Generator("p", "momentum")
    return ccr.Algebra([x, p], {(x, p): I})


def test_normal_order_examples():
    alg = heisenberg()
    x, p = alg["x"], alg["p"]
    assert str(x * p) == "x p"
    assert p * x == x * p - alg.scalar(I)
    assert p * p * x == x * p * p - p * (2 * I)


def test_commutators():
    alg = heisenberg()
    x, p = alg["x"], alg["p"]
    assert ccr.commutator(x, p) == alg.scalar(I)
    assert ccr.anticommutator(x, p) == 2 * (x * p) - alg.scalar(I)


def test_mixed_contexts_rejected():
    a, b = heisenberg(), heisenberg()
    with pytest.raises(ccr.ContextError):
        a["x"] * b["p"]


# Independent oracle: x acts by multiplication and p = -i d/dx on polynomials.

def _apply(alg, poly, f: np.ndarray) -> np.ndarray:
    out = np.zeros(len(f) + 8, complex)
    for (ex, ep), c in poly.terms.items():
        g = np.array(f, complex)
        for _ in range(ep):
            g = -1j * np.polynomial.polynomial.polyder(g) if len(g) > 1 else np.zeros(1, complex)
        for _ in range(ex):
            g = np.concatenate(([0], g))
        out[: len(g)] += complex(c) * g
    return out


words = st.lists(st.sampled_from("xp"), min_size=1, max_size=5)


@given(words)
def test_normal_form_matches_differential_representation(word):
    alg = heisenberg()
    f = np.array([0.3, -1.2, 0.5, 2.0, 0.7, -0.4])
    poly = alg.scalar(1)
    for w in word:
        poly = poly * alg[w]
    # act right-to-left with the raw word
    g = np.array(f, complex)
    for w in reversed(word):
        if w == "p":
            g = -1j * np.polynomial.polynomial.polyder(g) if len(g) > 1 else np.zeros(1, complex)
        else:
            g = np.concatenate(([0], g))
    want = np.zeros(len(f) + 8, complex)
    want[: len(g)] += g
    assert np.allclose(_apply(alg, poly, f), want, atol=1e-12)


def _random_poly(alg, data):
    names = [g.name for g in alg.generators]
    out = alg.zero()
    for _ in range(data.draw(st.integers(1, 3))):
        term = alg.scalar(GaussRat(data.draw(st.integers(-3, 3)), data.draw(st.integers(-3, 3))))
        for _ in range(data.draw(st.integers(0, 2))):
            term = term * alg[data.draw(st.sampled_from(names))]
        out = out + term
    return out


@given(st.data())
def test_bracket_identities(data):
    alg, _, _, _ = ccr.preset("paper-doubling")
    a, b, c = (_random_poly(alg, data) for _ in range(3))
    com = ccr.commutator
    assert com(a, b) == -com(b, a)
    assert com(a, com(b, c)) + com(b, com(c, a)) + com(c, com(a, b)) == alg.zero()
    assert (a * b) * c == a * (b * c)


def test_poisson_bracket_antisymmetry():
    alg, d, _, _ = ccr.preset("classical-poisson-doubling")
    assert ccr.bracket(d["X"], d["dp"]) == alg.scalar(1)
    assert ccr.bracket(d["dp"], d["X"]) == alg.scalar(-1)


@pytest.mark.parametrize("name", ccr.PRESETS)
def test_presets_hold(name):
    assert ccr.verify_table(name).passed


def test_paper_doubling_entries():
    rep = ccr.verify_table("paper-doubling")
    assert rep.entry("X", "pi").rhs_computed == "i"
    assert rep.entry("eta", "P").rhs_computed == "i"
    for a, b in [("X", "P"), ("eta", "pi"), ("X", "eta"), ("P", "pi")]:
        assert rep.entry(a, b).rhs_computed == "0"
    assert all(e.agrees_with_printed for e in rep.entries)


def test_standard_doubling_contradicts_printed_table():
    rep = ccr.verify_table("standard-doubling")
    assert rep.entry("X", "pi").rhs_computed == "0"
    assert rep.entry("X", "P").rhs_computed == "i/2"
    assert not rep.entry("X", "pi").agrees_with_printed


def test_duron_table():
    rep = ccr.verify_table("time-duron")
    assert rep.entry("T", "eps").rhs_computed == "i"
    assert rep.entry("tau", "E").rhs_computed == "i"
    assert rep.passed


def test_unknown_preset():
    with pytest.raises(ccr.PresetError):
        ccr.preset("nope")


def test_table_roundtrip(tmp_path):
    text = "x p 0 1\ny q 0 -1/2\n"
    alg = ccr.parse_table(text)
    assert ccr.dump_table(alg) == text
    path = tmp_path / "t.txt"
    path.write_text(ccr.dump_table(alg))
    again = ccr.load_table(path)
    assert ccr.commutator(again["y"], again["q"]) == again.scalar(GaussRat(0, Fraction(-1, 2)))


def test_float_field():
    alg = ccr.parse_table("x p 0 1\n", field="float")
    assert ccr.commutator(alg["x"], alg["p"]) == alg.scalar(1j)


def test_derivative():
    alg = heisenberg()
    x, p = alg["x"], alg["p"]
    assert ccr.derivative(x * x * p, "x") == 2 * (x * p)
