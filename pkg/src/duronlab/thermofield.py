"""Doubled boson space: Bogoliubov generator, theta-vacua and co-products.

Both copies are standard bosons, ``[a, a+] = [a~, a~+] = 1``, with the
tilde mode in the second Kronecker slot.

    G = -i (a+ a~+ - a a~),   |0(theta)> = exp(i theta G) |0,0>
    a(theta) = a cosh(theta) - a~+ sinh(theta)

Truncation only corrupts the neighbourhood of the top level, so every
operator assertion is made on the interior block (occupations ``<= N/2``).
Conjugating by ``exp(i theta G)`` spreads interior states well beyond
``N/2``; those conjugations run at a larger working cutoff that is grown
until the interior block stops changing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.optimize import bisect

from duronlab import ccr
from duronlab.exact import GaussRat
from duronlab.fock import (
    DimensionError,
    NumericalError,
    StateVector,
    TruncatedOperator,
    annihilation,
    creation,
    doubled_basis,
    expm,
    expm_rows,
    identity,
    interior_indices,
    lift_left,
    lift_right,
    number,
    tensor,
)

ADEQUACY_TOL = 1e-12
SQRT2 = math.sqrt(2.0)


class CutoffError(ValueError):
    def __init__(self, theta: float, cutoff: int, required: int, tol: float):
        super().__init__(
            f"cutoff N={cutoff} is inadequate for theta={theta}: tanh^(2N)|theta| <= {tol:g} needs N >= {required}"
        )
        self.required = required


def required_cutoff(theta: float, tol: float = ADEQUACY_TOL) -> int:
    r = math.tanh(abs(theta))
    if r == 0:
        return 2
    return max(2, math.ceil(math.log(tol) / (2 * math.log(r))))


def check_cutoff(theta: float, n: int, tol: float = ADEQUACY_TOL):
    if math.tanh(abs(theta)) ** (2 * n) > tol:
        raise CutoffError(theta, n, required_cutoff(theta, tol), tol)


def _ops(n: int):
    a, ad = annihilation(n), creation(n)
    return a, ad


def bogoliubov_generator(n: int) -> TruncatedOperator:
    if n < 4:
        raise DimensionError(f"cutoff must be >= 4, got {n}")
    a, ad = _ops(n)
    return (tensor(ad, ad) - tensor(a, a)) * (-1j)


# -- theta vacuum ------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ThetaVacuum:
    theta: float
    cutoff: int
    state: StateVector
    coefficients: np.ndarray

    def pair_amplitudes(self) -> np.ndarray:
        """``<m, n | 0(theta)>`` as an ``N x N`` array."""
        return self.state.amplitudes.reshape(self.cutoff, self.cutoff)

    def offdiagonal_max(self, levels: int | None = None) -> float:
        k = self.cutoff // 2 if levels is None else levels
        m = self.pair_amplitudes()[: k + 1, : k + 1].copy()
        np.fill_diagonal(m, 0)
        return float(np.abs(m).max())

    def reduced_density(self) -> np.ndarray:
        m = self.pair_amplitudes()
        return m @ m.conj().T

    def expectation_left(self, op: TruncatedOperator) -> complex:
        v = self.state.amplitudes
        return complex(np.vdot(v, lift_left(op).matrix @ v))


def theta_vacuum(theta: float, n: int, adequacy_tol: float = ADEQUACY_TOL) -> ThetaVacuum:
    check_cutoff(theta, n, adequacy_tol)
    g = bogoliubov_generator(n)
    u = expm(g * (1j * theta))
    psi = u @ doubled_basis(n, 0, 0)
    c = np.array([psi.amplitudes[k * n + k] for k in range(n)])
    return ThetaVacuum(theta, n, psi, c)


def vacuum_coefficients_closed(theta: float, n: int) -> np.ndarray:
    """``c_k = tanh^k(theta) / cosh(theta)``."""
    return np.tanh(theta) ** np.arange(n) / np.cosh(theta)


def vacuum_coefficients_recursion(theta: float, n: int) -> np.ndarray:
    """Two-mode-squeezing recursion ``c_{k+1} = tanh(theta) c_k`` with ``sum c_k^2 = 1``."""
    c = np.empty(n)
    c[0] = 1.0
    r = math.tanh(theta)
    for k in range(1, n):
        c[k] = c[k - 1] * r
    # normalise the infinite sequence, not the truncated one
    return c * math.sqrt(1 - r * r)


# -- Gibbs correspondence ------------------------------------------------------

def theta_of_beta(beta: float, omega: float) -> float:
    """``theta*`` with ``tanh(theta*) = exp(-beta omega / 2)``, by bisection (xtol 1e-12)."""
    if beta * omega <= 0:
        raise ValueError("beta * omega must be positive")
    target = math.exp(-beta * omega / 2)
    hi = 1.0
    while math.tanh(hi) <= target:
        hi *= 2
    return bisect(lambda t: math.tanh(t) - target, 0.0, hi, xtol=1e-12)


def gibbs_distribution(beta: float, omega: float, n: int) -> np.ndarray:
    w = np.exp(-beta * omega * np.arange(n))
    return w / w.sum()


@dataclass(frozen=True)
class GibbsReport:
    theta: float
    beta: float
    omega: float
    cutoff: int
    diagonal_deviation: float
    offdiagonal_max: float
    expectations: dict  # name -> (vacuum value, Gibbs trace)
    bose_einstein: float
    label: str = "derived correspondence"

    @property
    def max_expectation_deviation(self) -> float:
        return max(abs(v - g) for v, g in self.expectations.values())

    def passed(self, tol: float = 1e-6) -> bool:
        occ = self.expectations["number"][0]
        return (
            self.diagonal_deviation <= tol
            and self.max_expectation_deviation <= tol
            and abs(occ - self.bose_einstein) <= tol
        )

    def to_json(self) -> dict:
        return {
            "theta": self.theta,
            "beta": self.beta,
            "omega": self.omega,
            "cutoff": self.cutoff,
            "diagonal_deviation": self.diagonal_deviation,
            "offdiagonal_max": self.offdiagonal_max,
            "expectations": {k: {"vacuum": v, "gibbs": g} for k, (v, g) in self.expectations.items()},
            "bose_einstein": self.bose_einstein,
            "label": self.label,
        }


def gibbs_match(theta: float | None, beta: float, omega: float, n: int,
                adequacy_tol: float = ADEQUACY_TOL) -> GibbsReport:
    """Compare the first-factor reduction of ``|0(theta)>`` with ``exp(-beta H)/Z``.

    ``theta=None`` uses :func:`theta_of_beta`.
    """
    th = theta_of_beta(beta, omega) if theta is None else theta
    vac = theta_vacuum(th, n, adequacy_tol)
    rho = vac.reduced_density()
    p = gibbs_distribution(beta, omega, n)
    diag_dev = float(np.abs(np.diag(rho).real - p).max())
    off = rho - np.diag(np.diag(rho))
    a, ad = _ops(n)
    ops = {
        "number": number(n),
        "a+a_dag": a + ad,
        "hamiltonian": number(n) * omega + identity(n) * (omega / 2),
    }
    exps = {}
    for name, op in ops.items():
        v = vac.expectation_left(op).real
        g = float(np.sum(p * np.diag(op.toarray()).real))
        exps[name] = (v, g)
    be = 1.0 / math.expm1(beta * omega)
    return GibbsReport(th, beta, omega, n, diag_dev, float(np.abs(off).max()), exps, be)


# -- co-products and A/B operators --------------------------------------------

@dataclass(frozen=True, eq=False)
class CoProductElement:
    base: str
    variant: str  # "plus", "minus" or "deformed(theta)"
    operator: TruncatedOperator


def coproducts(op: TruncatedOperator, name: str = "A") -> tuple[CoProductElement, CoProductElement]:
    if op.space_tag != "single":
        raise DimensionError("co-products take a single-space operator")
    left, right = lift_left(op), lift_right(op)
    return CoProductElement(name, "plus", left + right), CoProductElement(name, "minus", left - right)


def AB_operators(n: int) -> tuple[TruncatedOperator, TruncatedOperator]:
    """``A = (a + a~)/sqrt2`` and ``B = (a - a~)/sqrt2`` with unit-normalised ladders."""
    plus, minus = coproducts(annihilation(n), "a")
    return plus.operator / SQRT2, minus.operator / SQRT2


def doubled_phase_space(n: int) -> dict:
    """``X = (x1+x2)/2``, ``P = (p1+p2)/2``, ``eta = x1-x2``, ``pi = p1-p2``.

    Single-mode ``x = (a + a+)/sqrt2`` and ``p = -i (a - a+)/sqrt2``.
    """
    a, ad = _ops(n)
    x = (a + ad) / SQRT2
    p = (a - ad) * (-1j / SQRT2)
    x1, x2, p1, p2 = lift_left(x), lift_right(x), lift_left(p), lift_right(p)
    return {"X": (x1 + x2) / 2, "P": (p1 + p2) / 2, "eta": x1 - x2, "pi": p1 - p2}


def _maxabs(op: TruncatedOperator) -> float:
    m = op.matrix
    return float(abs(m).max()) if m.nnz else 0.0


def ab_reconstruction(n: int) -> dict:
    """Max-norm defects of the phase-space variables rebuilt from ``A``, ``B``.

    The reconstruction uses the unnormalised Bargmann map ``a = x + i p``,
    i.e. ``A_b = sqrt2 A``.  Momenta are checked with both signs of the
    ``i`` prefactor; only ``-i`` reproduces them.
    """
    A, B = AB_operators(n)
    Ab, Bb = A * SQRT2, B * SQRT2
    ref = doubled_phase_space(n)
    s8 = math.sqrt(8.0)
    built = {
        "X": (Ab + Ab.dagger()) / s8,
        "eta": (Bb + Bb.dagger()) / SQRT2,
        "P": (Ab - Ab.dagger()) * (-1j / s8),
        "pi": (Bb - Bb.dagger()) * (-1j / SQRT2),
        "P_printed_sign": (Ab - Ab.dagger()) * (1j / s8),
        "pi_printed_sign": (Bb - Bb.dagger()) * (1j / SQRT2),
    }
    return {k: _maxabs(v - ref[k.split("_")[0]]) for k, v in built.items()}


def q_number(theta: float) -> float:
    """``[2]_q`` realised as ``e^{2 theta} + e^{-2 theta}`` so that ``[2]_q = 2`` at ``theta = 0``."""
    return math.exp(2 * theta) + math.exp(-2 * theta)


def deformed_plus(theta: float, n: int) -> TruncatedOperator:
    """Unnormalised ``e^theta (a x 1) + e^-theta (1 x a)``."""
    a = annihilation(n)
    return lift_left(a) * math.exp(theta) + lift_right(a) * math.exp(-theta)


def deformed_coproduct(theta: float, n: int) -> tuple[TruncatedOperator, TruncatedOperator]:
    a = annihilation(n)
    norm = math.sqrt(q_number(theta))
    aq = (lift_left(a) * math.exp(theta) + lift_right(a) * math.exp(-theta)) / norm
    bq = (lift_left(a) * math.exp(theta) - lift_right(a) * math.exp(-theta)) / norm
    return aq, bq


def deformed_derivative_residual(theta: float, n: int, h: float) -> float:
    """``max |(D+(theta+h) - D+(theta-h))/2h - D-(theta)|`` for the unnormalised co-products."""
    a = annihilation(n)
    d = (deformed_plus(theta + h, n) - deformed_plus(theta - h, n)) / (2 * h)
    minus = lift_left(a) * math.exp(theta) - lift_right(a) * math.exp(-theta)
    return _maxabs(d - minus)


# -- Bogoliubov transformation -------------------------------------------------

def theta_transform(theta: float, n: int) -> tuple[TruncatedOperator, TruncatedOperator]:
    """Closed forms ``a(theta)`` and ``a~(theta)``."""
    a, ad = _ops(n)
    c, s = math.cosh(theta), math.sinh(theta)
    return lift_left(a) * c - lift_right(ad) * s, lift_right(a) * c - lift_left(ad) * s


def _interior_rows(working: int, levels: int) -> np.ndarray:
    return interior_indices(working, "doubled", levels)


def conjugate_interior(theta: float, n: int, op_factory, tol: float = 1e-6, levels: int | None = None,
                       max_factor: int = 6) -> tuple[np.ndarray, int]:
    """Interior block of ``e^{i theta G} O e^{-i theta G}`` and the working cutoff used.

    ``op_factory(M)`` builds ``O`` at cutoff ``M``.  The working cutoff starts
    at ``2N`` and grows by ``N/2`` until two successive blocks agree to
    ``tol / 100``.
    """
    k = n // 2 if levels is None else levels
    prev = None
    m = 2 * n
    step = max(n // 2, 2)
    while m <= max_factor * n:
        rows = _interior_rows(m, k)
        ur = expm_rows(bogoliubov_generator(m) * (1j * theta), rows)
        o = sp.csr_array(op_factory(m).matrix)
        block = (ur @ o @ ur.conj().T).toarray()
        if prev is not None and np.abs(block - prev).max() <= tol / 100:
            return block, m
        prev = block
        m += step
    raise NumericalError("padded conjugation did not settle on the interior block", float(np.abs(block - prev).max()))


@dataclass(frozen=True)
class BogoliubovReport:
    theta: float
    cutoff: int
    closed_vs_conjugation: float
    tilde_closed_vs_conjugation: float
    vacuum_annihilation: float
    tilde_vacuum_annihilation: float
    commutator_defect: float
    working_cutoff: int
    group_law: float | None = None
    theta_bar: float | None = None
    tol: float = 1e-6

    @property
    def passed(self) -> bool:
        vals = [self.closed_vs_conjugation, self.tilde_closed_vs_conjugation, self.vacuum_annihilation,
                self.tilde_vacuum_annihilation, self.commutator_defect]
        if self.group_law is not None:
            vals.append(self.group_law)
        return all(v <= self.tol for v in vals)

    def to_json(self) -> dict:
        out = {k: getattr(self, k) for k in self.__dataclass_fields__}
        out["pass"] = self.passed
        return out


def verify_bogoliubov(theta: float, n: int, tol: float = 1e-6, theta_bar: float | None = None,
                      adequacy_tol: float = ADEQUACY_TOL) -> BogoliubovReport:
    check_cutoff(theta, n, adequacy_tol)
    idx = interior_indices(n, "doubled")
    at, tt = theta_transform(theta, n)
    conj_a, m1 = conjugate_interior(theta, n, lambda m: lift_left(annihilation(m)), tol)
    conj_t, m2 = conjugate_interior(theta, n, lambda m: lift_right(annihilation(m)), tol)
    d_a = float(np.abs(conj_a - at.interior()).max())
    d_t = float(np.abs(conj_t - tt.interior()).max())

    vac = theta_vacuum(theta, n, adequacy_tol)
    ann = float(np.linalg.norm((at @ vac.state).amplitudes[idx]))
    ann_t = float(np.linalg.norm((tt @ vac.state).amplitudes[idx]))

    comm = (at @ at.dagger() - at.dagger() @ at).interior()
    comm_def = float(np.abs(comm - np.eye(len(idx))).max())

    group = None
    mw = max(m1, m2)
    if theta_bar is not None:
        block, m3 = conjugate_interior(theta_bar, n, lambda m: theta_transform(theta, m)[0], tol)
        group = float(np.abs(block - theta_transform(theta + theta_bar, n)[0].interior()).max())
        mw = max(mw, m3)
    return BogoliubovReport(theta, n, d_a, d_t, ann, ann_t, comm_def, mw, group, theta_bar, tol)


@dataclass(frozen=True)
class DerivativeReport:
    theta: float
    cutoff: int
    h: float
    residual: float
    residual_half: float
    tilde_residual: float

    @property
    def ratio(self) -> float:
        return self.residual / self.residual_half if self.residual_half else math.inf

    def to_json(self) -> dict:
        out = {k: getattr(self, k) for k in self.__dataclass_fields__}
        out["ratio"] = self.ratio
        return out


def _derivative_residual(theta: float, n: int, h: float, which: int) -> float:
    g = bogoliubov_generator(n)
    plus = theta_transform(theta + h, n)[which]
    minus = theta_transform(theta - h, n)[which]
    fd = (plus - minus) * (-1j / (2 * h))
    a = theta_transform(theta, n)[which]
    comm = g @ a - a @ g
    return float(np.abs((fd - comm).interior()).max())


def theta_derivative_check(theta: float, n: int, h: float) -> DerivativeReport:
    """``-i d a(theta)/d theta`` by central differences against ``[G, a(theta)]``."""
    if h <= 0:
        raise ValueError("h must be positive")
    return DerivativeReport(
        theta, n, h,
        _derivative_residual(theta, n, h, 0),
        _derivative_residual(theta, n, h / 2, 0),
        _derivative_residual(theta, n, h, 1),
    )


# -- exact cross-check in the symbolic kernel ---------------------------------

@dataclass(frozen=True)
class SymbolicBogoliubov:
    u: GaussRat
    aa_dag: object
    tt_dag: object
    a_t: object
    a_tdag: object
    cosh2_minus_sinh2: GaussRat
    passed: bool = field(default=False)


def symbolic_bogoliubov(u) -> SymbolicBogoliubov:
    """Exact check with rational ``u = tanh(theta/2)``.

    ``cosh = (1+u^2)/(1-u^2)`` and ``sinh = 2u/(1-u^2)`` keep every
    coefficient in the Gaussian rationals.
    """
    u = GaussRat.coerce(u)
    if u == 1 or u == -1:
        raise ValueError("u must differ from +-1")
    c = (1 + u * u) / (1 - u * u)
    s = (2 * u) / (1 - u * u)
    gens = [ccr.Generator(nm, "custom") for nm in ("a", "ad", "at", "atd")]
    a, ad, at, atd = gens
    alg = ccr.Algebra(gens, {(a, ad): 1, (at, atd): 1})
    A, AD, AT, ATD = (alg[g.name] for g in gens)
    a_th = A * c - ATD * s
    ad_th = AD * c - AT * s
    t_th = AT * c - AD * s
    td_th = ATD * c - A * s
    one = alg.scalar(1)
    zero = alg.zero()
    r1 = ccr.commutator(a_th, ad_th)
    r2 = ccr.commutator(t_th, td_th)
    r3 = ccr.commutator(a_th, t_th)
    r4 = ccr.commutator(a_th, td_th)
    ok = r1 == one and r2 == one and r3 == zero and r4 == zero and c * c - s * s == 1
    return SymbolicBogoliubov(u, r1, r2, r3, r4, c * c - s * s, ok)
