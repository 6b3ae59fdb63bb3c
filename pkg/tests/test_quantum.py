import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from duronlab import fock, quantum
from duronlab.suites import harmonic


def _system(seed, n=8):
    r = np.random.default_rng(seed)
    return quantum.random_hermitian(n, r), quantum.random_state(n, r)


def test_coincident_density_is_projector():
    h, psi = _system(1)
    rho = quantum.bilocal(psi, h, 0.0, 0.0)
    assert np.allclose(rho.matrix @ rho.matrix, rho.matrix, atol=1e-12)
    assert abs(rho.trace() - 1) < 1e-12


def test_unnormalised_state_rejected():
    h, _ = _system(1)
    with pytest.raises(fock.ValidationError):
        quantum.bilocal(fock.StateVector(np.ones(8)), h, 0, 0)


def test_time_coordinates():
    h, psi = _system(2)
    rho = quantum.bilocal(psi, h, 0.2, 0.6)
    assert rho.T == pytest.approx(0.4) and rho.dt == pytest.approx(0.4)


# below h ~ 1e-4 the difference quotient is dominated by roundoff of order eps / h
@pytest.mark.parametrize("step", [1e-1, 1e-2, 1e-3])
def test_eigenstate_is_stationary(step):
    h, _ = _system(3)
    v = h.eigh[1][:, 2]
    assert quantum.liouville_residual(fock.StateVector(v), h, 0.3, step) <= 1e-12


@settings(max_examples=15)
@given(st.integers(0, 10 ** 6))
def test_liouville_random_systems(seed):
    h, psi = _system(seed)
    r1 = quantum.liouville_residual(psi, h, 0.5, 1e-4)
    r2 = quantum.liouville_residual(psi, h, 0.5, 5e-5)
    assert r1 <= 1e-6
    assert 3.5 <= r1 / r2 <= 4.5


@settings(max_examples=30)
@given(st.integers(0, 10 ** 6), st.floats(0, 3))
def test_half_trace_of_anticommutator_is_energy(seed, t):
    h, psi = _system(seed)
    rep = quantum.energy_anticommutator(psi, h, t)
    assert rep.trace_defect <= 1e-12


def test_eigenstate_anticommutator():
    h, _ = _system(4)
    w, v = h.eigh
    for k in range(8):
        rep = quantum.energy_anticommutator(fock.StateVector(v[:, k]), h)
        rho = np.outer(v[:, k], v[:, k].conj())
        assert np.abs(rep.anticommutator - 2 * w[k] * rho).max() <= 1e-12


def test_dt_equation_second_order():
    h, psi = _system(5, 6)
    r1, r2 = quantum.dt_residual(psi, h, 0.3, 1e-3), quantum.dt_residual(psi, h, 0.3, 5e-4)
    assert 3.5 <= r1 / r2 <= 4.5


# -- grid and quantum Hamilton-Jacobi ---------------------------------------------

def test_grid_ground_state_energy():
    g = quantum.Grid1D(10.0, 0.02, 1.0, harmonic)
    _, e0 = g.ground_state()
    assert abs(e0 - 0.5) < 1e-4


def test_grid_apply_h_matches_eigen():
    g = quantum.Grid1D(5.0, 0.1, 1.0, harmonic)
    w, v = g.eig
    assert np.allclose(g.apply_h(v[:, 3]), w[3] * v[:, 3], atol=1e-10)


def test_coherent_state_centroid_oscillates():
    g = quantum.Grid1D(10.0, 0.02, 1.0, harmonic)
    psi0 = g.normalize(quantum.coherent_state(g.x, 1.0))
    for t in (0.5, 1.3, 2.9):
        psi = g.evolve(psi0, t)
        mean = np.sum(g.x * np.abs(psi) ** 2) * g.dx
        assert abs(mean - math.cos(t)) < 1e-3


def test_polar_roundtrip():
    x = np.linspace(-3, 3, 201)
    psi = quantum.gaussian(x, 0.3, 2.0, 0.8)
    f = quantum.polar_decompose(psi, x)
    assert np.allclose(f.reconstruct(), psi, atol=1e-14)
    assert np.all(np.abs(np.diff(f.S[f.mask])) < math.pi)


def test_qhj_ground_state():
    g = quantum.Grid1D(10.0, 0.02, 1.0, harmonic)
    phi, _ = g.ground_state()
    with pytest.warns(quantum.NodeDominationWarning):
        r = quantum.qhj_run(g, phi, 0.5, 1e-4)
    assert r.max_residual <= 1e-6


def test_node_warning_threshold():
    g = quantum.Grid1D(10.0, 0.05)
    narrow = quantum.gaussian(g.x, 0.0, 0.0, 0.3)
    with pytest.warns(quantum.NodeDominationWarning):
        quantum.qhj_run(g, narrow, 0.0, 1e-3)


def test_qhj_operator_form():
    g = quantum.Grid1D(10.0, 0.02, 1.0, harmonic)
    psi0 = quantum.coherent_state(g.x, 0.3)
    r = quantum.qhj_run(g, psi0, 0.7, 1e-4, warn=False)
    assert r.operator_defect <= 1e-6
