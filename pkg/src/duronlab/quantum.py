"""Two-time density objects and the quantum Hamilton-Jacobi projection.

``rho(t1, t2) = |psi(t1)><psi(t2)|`` with ``psi(t) = exp(-iHt) psi0``.
Along the mean time ``T`` at ``dt = t2 - t1 = 0`` it obeys

    i d rho/dT + [rho, H] = 0,

and along the difference time

    2i d rho/d(dt) = -{rho, H}.

The Schrodinger pair fixes the ordering ``H rho - rho H`` in the first
relation.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.linalg import eigh_tridiagonal

from duronlab.fock import StateVector, TruncatedOperator, ValidationError, evolve

NORM_TOL = 1e-10


class NodeDominationWarning(UserWarning):
    pass


def _state(psi) -> StateVector:
    return psi if isinstance(psi, StateVector) else StateVector(psi)


def _check_normalized(psi: StateVector):
    if abs(psi.norm - 1) > NORM_TOL:
        raise ValidationError(f"base state must be normalised (norm = {psi.norm:.12g})")


@dataclass(frozen=True, eq=False)
class BilocalDensity:
    base_state: StateVector
    hamiltonian: TruncatedOperator
    t1: float
    t2: float
    matrix: np.ndarray

    @property
    def T(self) -> float:
        return (self.t1 + self.t2) / 2

    @property
    def dt(self) -> float:
        return self.t2 - self.t1

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def purity(self) -> complex:
        return complex(np.trace(self.matrix @ self.matrix))


def bilocal(psi0, h: TruncatedOperator, t1: float, t2: float) -> BilocalDensity:
    psi0 = _state(psi0)
    _check_normalized(psi0)
    a, b = evolve(psi0, h, t1), evolve(psi0, h, t2)
    return BilocalDensity(psi0, h, t1, t2, a.outer(b))


def _rho(psi0, h, t1, t2) -> np.ndarray:
    return bilocal(psi0, h, t1, t2).matrix


def liouville_residual(psi0, h: TruncatedOperator, t: float, step: float) -> float:
    """``max |i (rho(t+h/2) - rho(t-h/2))/h + [rho(t), H]|`` along ``T`` at ``dt = 0``."""
    if step <= 0:
        raise ValueError("step must be positive")
    hm = h.toarray()
    rp = _rho(psi0, h, t + step / 2, t + step / 2)
    rm = _rho(psi0, h, t - step / 2, t - step / 2)
    r0 = _rho(psi0, h, t, t)
    res = 1j * (rp - rm) / step + (r0 @ hm - hm @ r0)
    return float(np.abs(res).max())


def dt_residual(psi0, h: TruncatedOperator, t: float, step: float) -> float:
    """``max |2i d rho/d(dt) + {rho, H}|`` at ``dt = 0`` by a central difference."""
    hm = h.toarray()
    rp = _rho(psi0, h, t - step / 2, t + step / 2)
    rm = _rho(psi0, h, t + step / 2, t - step / 2)
    r0 = _rho(psi0, h, t, t)
    res = 2j * (rp - rm) / (2 * step) + (r0 @ hm + hm @ r0)
    return float(np.abs(res).max())


@dataclass(frozen=True, eq=False)
class EnergyReport:
    anticommutator: np.ndarray
    half_trace: float
    expectation: float
    dt_residual: float

    @property
    def trace_defect(self) -> float:
        return abs(self.half_trace - self.expectation)


def energy_anticommutator(psi0, h: TruncatedOperator, t: float = 0.0, step: float = 1e-4) -> EnergyReport:
    """``{rho, H}`` at coincidence, half its trace, ``<H>``, and the ``dt`` derivative check."""
    psi0 = _state(psi0)
    hm = h.toarray()
    r = _rho(psi0, h, t, t)
    anti = r @ hm + hm @ r
    half = complex(np.trace(anti)) / 2
    psi_t = evolve(psi0, h, t)
    ex = complex(np.vdot(psi_t.amplitudes, hm @ psi_t.amplitudes))
    return EnergyReport(anti, half.real, ex.real, dt_residual(psi0, h, t, step))


def random_hermitian(n: int, rng: np.random.Generator) -> TruncatedOperator:
    """GUE-like matrix scaled so its spectrum is O(1)."""
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return TruncatedOperator((a + a.conj().T) / (2 * np.sqrt(n)), n)


def random_state(n: int, rng: np.random.Generator) -> StateVector:
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return StateVector(v).normalized()


# -- one-dimensional grid ------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Grid1D:
    """Finite-difference Hamiltonian ``-(1/2m) d^2/dx^2 + V`` on ``[-L, L]``, Dirichlet walls."""

    L: float
    dx: float
    mass: float = 1.0
    potential: object = None  # callable V(x) or None for free motion

    @cached_property
    def x(self) -> np.ndarray:
        n = int(round(2 * self.L / self.dx)) - 1
        return -self.L + self.dx * np.arange(1, n + 1)

    @cached_property
    def V(self) -> np.ndarray:
        return np.zeros_like(self.x) if self.potential is None else np.asarray(self.potential(self.x), float)

    @cached_property
    def _bands(self):
        k = 1 / (2 * self.mass * self.dx ** 2)
        d = 2 * k + self.V
        e = -k * np.ones(len(self.x) - 1)
        return d, e

    @cached_property
    def eig(self):
        d, e = self._bands
        return eigh_tridiagonal(d, e)

    def apply_h(self, psi: np.ndarray) -> np.ndarray:
        d, e = self._bands
        out = d * psi
        out[:-1] += e * psi[1:]
        out[1:] += e * psi[:-1]
        return out

    def evolve(self, psi0: np.ndarray, t: float) -> np.ndarray:
        w, v = self.eig
        return v @ (np.exp(-1j * w * t) * (v.T @ psi0))

    def normalize(self, psi: np.ndarray) -> np.ndarray:
        return psi / np.sqrt(np.sum(np.abs(psi) ** 2) * self.dx)

    def ground_state(self) -> tuple[np.ndarray, float]:
        w, v = self.eig
        return self.normalize(v[:, 0].astype(complex)), float(w[0])


def gaussian(x: np.ndarray, x0: float = 0.0, k0: float = 0.0, sigma: float = 1.0) -> np.ndarray:
    return np.exp(-((x - x0) ** 2) / (4 * sigma ** 2) + 1j * k0 * x)


def coherent_state(x: np.ndarray, x0: float, mass: float = 1.0, omega: float = 1.0) -> np.ndarray:
    """Displaced oscillator ground state (real at t = 0)."""
    return np.exp(-mass * omega * (x - x0) ** 2 / 2).astype(complex)


@dataclass(frozen=True, eq=False)
class PolarField:
    x: np.ndarray
    R: np.ndarray
    S: np.ndarray
    mask: np.ndarray  # True where R is above the floor
    mass: float = 1.0
    potential: np.ndarray | None = None

    def reconstruct(self) -> np.ndarray:
        return self.R * np.exp(1j * self.S)


def polar_decompose(psi: np.ndarray, x: np.ndarray, floor: float = 1e-6, mass: float = 1.0,
                    potential: np.ndarray | None = None) -> PolarField:
    """``psi = R exp(iS)`` with ``S`` unwrapped left to right on each unmasked segment.

    ``floor`` is relative to ``max R``.
    """
    psi = np.asarray(psi, complex)
    R = np.abs(psi)
    mask = R > floor * R.max()
    S = np.angle(psi)
    out = S.copy()
    # unwrap separately on each connected run of unmasked points
    edges = np.flatnonzero(np.diff(np.concatenate(([0], mask.astype(np.int8), [0]))))
    for a, b in zip(edges[::2], edges[1::2]):
        out[a:b] = np.unwrap(S[a:b])
    return PolarField(np.asarray(x, float), R, out, mask, mass, potential)


@dataclass(frozen=True, eq=False)
class QHJResult:
    x: np.ndarray
    residual: np.ndarray  # NaN where masked
    operator_defect: float
    masked_fraction: float

    @property
    def max_residual(self) -> float:
        r = self.residual[np.isfinite(self.residual)]
        return float(np.abs(r).max()) if r.size else float("nan")


def quantum_hj_residual(fields, dt: float, grid: Grid1D | None = None, warn: bool = True) -> QHJResult:
    """Residual of ``dS/dt + (dS/dx)^2/2m + V + Q`` with ``Q = -(1/2m) R''/R``.

    ``fields`` holds three :class:`PolarField` slices at ``t - dt``, ``t``,
    ``t + dt``.  The time derivative of ``S`` comes from the phase of
    ``psi(t+dt) conj(psi(t-dt))`` so that no unwrapping is needed in time.
    When ``grid`` is given the operator form is also checked:
    ``diag {rho, H} = -2 R^2 dS/dt``.
    """
    fm, f0, fp = fields
    x, R, S = f0.x, f0.R, f0.S
    dx = x[1] - x[0]
    m = f0.mass
    V = f0.potential if f0.potential is not None else np.zeros_like(x)
    ok = fm.mask & f0.mask & fp.mask
    ok[1:-1] &= ok[:-2] & ok[2:]
    ok[[0, -1]] = False

    st = np.angle(fp.reconstruct() * np.conj(fm.reconstruct())) / (2 * dt)
    sx = np.zeros_like(S)
    sx[1:-1] = (S[2:] - S[:-2]) / (2 * dx)
    r2 = np.zeros_like(R)
    r2[1:-1] = (R[2:] - 2 * R[1:-1] + R[:-2]) / dx ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        q = -r2 / (2 * m * R)
        res = st + sx ** 2 / (2 * m) + V + q
    res = np.where(ok, res, np.nan)

    defect = float("nan")
    if grid is not None:
        psi = f0.reconstruct()
        diag = 2 * np.real(psi * np.conj(grid.apply_h(psi)))
        target = -2 * R ** 2 * st
        scale = max(np.abs(diag[ok]).max(initial=0.0), 1e-300)
        defect = float(np.abs(diag - target)[ok].max(initial=0.0) / scale)

    frac = 1.0 - ok.mean()
    if warn and frac > 0.2:
        warnings.warn(f"{frac:.0%} of the grid is masked by the amplitude floor", NodeDominationWarning,
                      stacklevel=2)
    return QHJResult(x, res, defect, float(frac))


def qhj_run(grid: Grid1D, psi0: np.ndarray, t: float, dt: float, floor: float = 1e-6,
            warn: bool = True) -> QHJResult:
    """Evolve ``psi0`` on ``grid`` and evaluate the residual at time ``t``."""
    psi0 = grid.normalize(np.asarray(psi0, complex))
    fields = [
        polar_decompose(grid.evolve(psi0, s), grid.x, floor, grid.mass, grid.V)
        for s in (t - dt, t, t + dt)
    ]
    return quantum_hj_residual(fields, dt, grid, warn)
