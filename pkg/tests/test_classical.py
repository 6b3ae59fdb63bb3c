import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from duronlab import classical as cl

FREE_PT = (0.3, 0.2, 1.1, 1.0)
OSC_PT = (0.4, 0.1, -0.7, 1.2)


@pytest.mark.parametrize("system, pt, tol", [
    (cl.free_particle(), FREE_PT, 1e-6),
    (cl.harmonic_oscillator(1.0, 1.3), OSC_PT, 1e-5),
])
def test_hj_pairs(system, pt, tol):
    assert max(map(abs, cl.hj_residuals(system, pt))) <= tol
    assert max(map(abs, cl.midpoint_identities(system, pt))) <= tol


def test_free_particle_energy_conserved():
    r = cl.midpoint_identities(cl.free_particle(), FREE_PT)
    assert abs(r.rT) <= 1e-6


def test_oscillator_mean_energy():
    act = cl.harmonic_oscillator(1.0, 1.3)
    r = cl.midpoint_identities(act, OSC_PT)
    assert abs(r.rdt) <= 1e-5
    # energy from the trajectory oracle: H at the two end points agrees
    p1, p2, h1, h2 = act.endpoint_data(OSC_PT)
    assert abs(h1 - h2) < 1e-12


def test_symmetric_point_rX_zero():
    act = cl.harmonic_oscillator()
    r = cl.midpoint_identities(act, (0.5, 0.0, 0.5, 0.8))
    assert abs(r.rX) < 1e-20


@pytest.mark.parametrize("fn", [cl.hj_residuals, cl.midpoint_identities])
def test_second_order_convergence(fn):
    ratios = cl.convergence_ratios(fn, cl.harmonic_oscillator(1.0, 1.3), OSC_PT, 1e-5)
    live = [r for r in ratios.values() if r is not None]
    assert live and all(3.5 <= r <= 4.5 for r in live)


def test_float_backend_also_converges():
    r = cl.hj_residuals(cl.free_particle(), FREE_PT, 1e-3, precision=None)
    assert max(map(abs, r)) < 1e-5


def test_richardson_removes_leading_error():
    act = cl.harmonic_oscillator(1.0, 1.3)
    plain = max(map(abs, cl.hj_residuals(act, OSC_PT, 1e-3)))
    rich = max(map(abs, cl.hj_residuals(act, OSC_PT, 1e-3, richardson=True)))
    assert rich < plain / 100


@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(0.05, 2.0))
def test_convention_flip_negates(x1, x2, dt):
    act = cl.free_particle()
    pt = (x1, 0.0, x2, dt)
    a = cl.hj_residuals(act, pt)
    b = cl.hj_residuals(act.with_convention("standard"), pt)
    assert all(u == -v for u, v in zip(a, b))
    assert act.S(*pt) == -act.with_convention("standard").S(*pt)


@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2))
def test_midpoint_roundtrip(x1, t1, x2, t2):
    back = cl.from_midpoint(cl.to_midpoint((x1, t1, x2, t2)))
    assert np.allclose(back, (x1, t1, x2, t2), atol=1e-12)


def test_singularity_guards():
    with pytest.raises(cl.SingularityError):
        cl.hj_residuals(cl.free_particle(), (0.0, 1.0, 1.0, 1.0 + 1e-8))
    with pytest.raises(cl.CausticError):
        cl.hj_residuals(cl.harmonic_oscillator(), (0.0, 0.0, 1.0, math.pi + 1e-5))


def test_liouville_limits():
    g = np.linspace(-2, 2, 21)
    stationary = cl.liouville_limit_check(lambda x, p, t: p * p / 2 + 0 * x, lambda x, p: p * p / 2, g, g, [0.0])
    assert stationary.residual == 0
    K = cl.transported_density(lambda x, p: np.exp(-(x - 1) ** 2 - p ** 2))
    flow = cl.liouville_limit_check(K, lambda x, p: (x * x + p * p) / 2, g, g, np.linspace(0, 1, 5), 1e-3)
    assert flow.residual <= 1e-4


def test_coarse_step_warns():
    g = np.linspace(-1, 1, 3)
    with pytest.warns(cl.AccuracyWarning):
        cl.liouville_limit_check(lambda x, p, t: x, lambda x, p: p, g, g, [0.0], step=0.5)


def test_energy_limit():
    dsdt, e = cl.energy_limit_check(cl.harmonic_oscillator(), math.cos, 0.4, 0.01)
    assert abs(e - 0.5) < 1e-3
    assert abs(dsdt - 0.5) <= 1e-3


def test_composition_on_classical_path():
    act = cl.harmonic_oscillator(1.0, 0.7)
    assert cl.composition_defect(act, 0.2, 0.0, -0.4, 1.5, 0.6) < 1e-12


def test_limit_sign_report_conservative():
    act = cl.harmonic_oscillator(omega=1.3)
    rep = cl.limit_sign_report(act, (0.4, 0.1, -0.7, 1.2))
    assert rep["midpoint_sign_residual"] <= 1e-8
    # energy is conserved on the path, so the opposite sign is not detectable here
    assert not rep["distinguishable"]
