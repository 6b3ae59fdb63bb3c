"""Two-point classical actions and their Hamilton-Jacobi identities.

Sign convention
---------------
``convention="paper"`` (the default) uses ``S = -S_std`` where ``S_std`` is
Hamilton's principal function.  Then on a classical trajectory

    dS/dt1 = -H1,  dS/dt2 = +H2,  dS/dx1 = p1,  dS/dx2 = -p2

and with ``X = (x1+x2)/2``, ``T = (t1+t2)/2``, ``dx = x2-x1``, ``dt = t2-t1``

    dS/dT = H2 - H1,   dS/d(dt) = (H1+H2)/2,
    dS/dX = p1 - p2,   dS/d(dx) = -(p1+p2)/2.

``convention="standard"`` negates every one of these.

Partial derivatives are central differences.  They are evaluated in
multiprecision by default so that the O(h^2) truncation error is not
buried under cancellation at ``h = 1e-5``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import mpmath
import numpy as np

CONVENTIONS = ("paper", "standard")
SINGULAR_DT = 1e-6
CAUSTIC_GUARD = 1e-3
DEFAULT_H = 1e-5
DEFAULT_DPS = 40
# residuals below this are treated as exact in multiprecision runs
EXACT_FLOOR = 1e-25


class SingularityError(ValueError):
    pass


class CausticError(SingularityError):
    pass


class AccuracyWarning(UserWarning):
    pass


class Point(NamedTuple):
    x1: float
    t1: float
    x2: float
    t2: float


@dataclass(frozen=True)
class MidpointCoords:
    X: float
    dx: float
    T: float
    dt: float

    @classmethod
    def from_point(cls, pt) -> "MidpointCoords":
        x1, t1, x2, t2 = pt
        return cls((x1 + x2) / 2, x2 - x1, (t1 + t2) / 2, t2 - t1)

    def to_point(self) -> Point:
        return Point(self.X - self.dx / 2, self.T - self.dt / 2, self.X + self.dx / 2, self.T + self.dt / 2)


def to_midpoint(pt) -> MidpointCoords:
    return MidpointCoords.from_point(pt)


def from_midpoint(m: MidpointCoords) -> Point:
    return m.to_point()


@dataclass(frozen=True)
class TwoPointAction:
    """Closed-form action for a one-dimensional system.

    ``S_std``, ``hamiltonian``, ``momenta`` and ``trajectory`` take a math
    module (``math`` or ``mpmath.mp``) as their last argument so the same
    formulas serve float and multiprecision evaluation.
    """

    name: str
    S_std: Callable
    hamiltonian: Callable
    momenta: Callable
    trajectory: Callable
    mass: float = 1.0
    omega: float | None = None
    convention: str = "paper"
    gradient: Callable | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.convention not in CONVENTIONS:
            raise ValueError(f"convention must be one of {CONVENTIONS}")

    @property
    def sign(self) -> int:
        return 1 if self.convention == "paper" else -1

    def with_convention(self, convention: str) -> "TwoPointAction":
        return TwoPointAction(self.name, self.S_std, self.hamiltonian, self.momenta, self.trajectory,
                              self.mass, self.omega, convention, self.gradient)

    def guard(self, pt):
        dt = float(pt[3]) - float(pt[1])
        if abs(dt) < SINGULAR_DT:
            raise SingularityError(f"|t2 - t1| = {abs(dt):.3e} is below the singularity guard {SINGULAR_DT}")
        if self.omega is not None:
            phase = self.omega * dt
            k = round(phase / math.pi)
            if k != 0 and abs(phase - k * math.pi) < CAUSTIC_GUARD:
                raise CausticError(f"omega*dt = {phase:.6f} is within {CAUSTIC_GUARD} of {k}*pi")

    def S(self, x1, t1, x2, t2, lib=math):
        return -self.sign * self.S_std(x1, t1, x2, t2, lib)

    def __call__(self, x1, t1, x2, t2, lib=math):
        return self.S(x1, t1, x2, t2, lib)

    def endpoint_data(self, pt, lib=math):
        """``(p1, p2, H1, H2)`` on the trajectory through the two points."""
        x1, t1, x2, t2 = pt
        p1, p2 = self.momenta(x1, t1, x2, t2, lib)
        return p1, p2, self.hamiltonian(x1, p1), self.hamiltonian(x2, p2)

    def energy(self, pt) -> float:
        _, _, h1, h2 = self.endpoint_data(pt)
        return (h1 + h2) / 2


def free_particle(mass: float = 1.0, convention: str = "paper") -> TwoPointAction:
    m = mass

    def s_std(x1, t1, x2, t2, lib):
        return m * (x2 - x1) ** 2 / (2 * (t2 - t1))

    def momenta(x1, t1, x2, t2, lib):
        v = m * (x2 - x1) / (t2 - t1)
        return v, v

    def traj(x1, t1, x2, t2, t, lib=math):
        return x1 + (x2 - x1) * (t - t1) / (t2 - t1)

    return TwoPointAction("free", s_std, lambda x, p: p * p / (2 * m), momenta, traj, m, None, convention)


def harmonic_oscillator(mass: float = 1.0, omega: float = 1.0, convention: str = "paper") -> TwoPointAction:
    m, w = mass, omega

    def s_std(x1, t1, x2, t2, lib):
        th = w * (t2 - t1)
        return ((x1 * x1 + x2 * x2) * lib.cos(th) - 2 * x1 * x2) * m * w / (2 * lib.sin(th))

    def momenta(x1, t1, x2, t2, lib):
        th = w * (t2 - t1)
        s, c = lib.sin(th), lib.cos(th)
        return (x2 - x1 * c) * m * w / s, (x2 * c - x1) * m * w / s

    def traj(x1, t1, x2, t2, t, lib=math):
        return (x1 * lib.sin(w * (t2 - t)) + x2 * lib.sin(w * (t - t1))) / lib.sin(w * (t2 - t1))

    def ham(x, p):
        # keep the multiprecision operand leftmost so m*w*w is not rounded to a float
        return p * p / (2 * m) + x * x * m * w * w / 2

    return TwoPointAction("oscillator", s_std, ham, momenta, traj, m, w, convention)


SYSTEMS = {"free": free_particle, "oscillator": harmonic_oscillator}


# -- finite differences --------------------------------------------------------

def _partial(f: Callable, args: list, k: int, h, richardson: bool):
    def d(step):
        up, dn = list(args), list(args)
        up[k] += step
        dn[k] -= step
        return (f(*up) - f(*dn)) / (2 * step)

    if richardson:
        return (4 * d(h / 2) - d(h)) / 3
    return d(h)


class _Ctx:
    """Evaluation backend: floats or mpmath numbers at a fixed precision."""

    def __init__(self, precision: int | None):
        self.precision = precision

    def __enter__(self):
        if self.precision:
            self._ctx = mpmath.workdps(self.precision)
            self._ctx.__enter__()
            self.lib = mpmath.mp
            self.num = mpmath.mpf
        else:
            self.lib = math
            self.num = float
        return self

    def __exit__(self, *exc):
        if self.precision:
            self._ctx.__exit__(*exc)


class HJResiduals(NamedTuple):
    r1: float
    r2: float
    rp1: float
    rp2: float


class MidpointResiduals(NamedTuple):
    rT: float
    rdt: float
    rX: float
    rdx: float


def _full_grad(action, pt, h, lib, num, richardson):
    if action.gradient is not None:
        return [num(g) for g in action.gradient(*pt)]
    args = [num(v) for v in pt]
    f = lambda *a: action.S(*a, lib=lib)  # noqa: E731
    return [_partial(f, args, k, num(h), richardson) for k in range(4)]


def hj_residuals(action: TwoPointAction, pt, h: float = DEFAULT_H, precision: int | None = DEFAULT_DPS,
                 richardson: bool = False) -> HJResiduals:
    """``(dS/dt1 + s H1, dS/dt2 - s H2, dS/dx1 - s p1, dS/dx2 + s p2)`` with ``s = +1`` in paper convention."""
    action.guard(pt)
    with _Ctx(precision) as c:
        g = _full_grad(action, pt, h, c.lib, c.num, richardson)
        p1, p2, h1, h2 = action.endpoint_data([c.num(v) for v in pt], c.lib)
        s = action.sign
        out = (g[1] + s * h1, g[3] - s * h2, g[0] - s * p1, g[2] + s * p2)
        return HJResiduals(*(float(v) for v in out))


def midpoint_identities(action: TwoPointAction, pt, h: float = DEFAULT_H, precision: int | None = DEFAULT_DPS,
                        richardson: bool = False) -> MidpointResiduals:
    """Residuals of the midpoint/difference form.

    ``dp = p1 - p2`` and ``P = -(p1 + p2)/2`` are the combinations the chain
    rule produces; with those, ``dS/dX = dp`` and ``dS/d(dx) = P``.
    """
    action.guard(pt)
    with _Ctx(precision) as c:
        num = c.num
        m = MidpointCoords.from_point([num(v) for v in pt])

        def s_mid(X, dx, T, dt):
            return action.S(X - dx / 2, T - dt / 2, X + dx / 2, T + dt / 2, lib=c.lib)

        args = [m.X, m.dx, m.T, m.dt]
        g = [_partial(s_mid, args, k, num(h), richardson) for k in range(4)]
        p1, p2, h1, h2 = action.endpoint_data([num(v) for v in pt], c.lib)
        s = action.sign
        out = (g[2] - s * (h2 - h1), g[3] - s * (h1 + h2) / 2, g[0] - s * (p1 - p2), g[1] + s * (p1 + p2) / 2)
        return MidpointResiduals(*(float(v) for v in out))


def limit_sign_report(action: TwoPointAction, pt, h: float = DEFAULT_H, precision: int | None = DEFAULT_DPS) -> dict:
    """Compare ``dS/dT`` with both signs of ``H2 - H1``.

    The midpoint form has ``dS/dT = s (H2 - H1)``; the small-``dt`` limit is
    also quoted with the opposite sign.  Only the first follows from the
    endpoint pair.  For a conservative system ``H1 = H2`` on the classical
    path, so the two signs cannot be told apart numerically there.
    """
    action.guard(pt)
    with _Ctx(precision) as c:
        num = c.num
        m = MidpointCoords.from_point([num(v) for v in pt])

        def s_of_T(T):
            return action.S(m.X - m.dx / 2, T - m.dt / 2, m.X + m.dx / 2, T + m.dt / 2, lib=c.lib)

        dT = _partial(s_of_T, [m.T], 0, num(h), False)
        _, _, h1, h2 = action.endpoint_data([num(v) for v in pt], c.lib)
        diff = action.sign * (h2 - h1)
        return {
            "dS_dT": float(dT),
            "H2_minus_H1": float(h2 - h1),
            "midpoint_sign_residual": float(abs(dT - diff)),
            "limit_sign_residual": float(abs(dT + diff)),
            "distinguishable": bool(abs(float(diff)) > 1e-8),
        }


def convergence_ratios(fn: Callable, action: TwoPointAction, pt, h: float = DEFAULT_H, **kw) -> dict:
    """``|r(h)| / |r(h/2)|`` per component; ``None`` where the stencil is exact."""
    coarse, fine = fn(action, pt, h, **kw), fn(action, pt, h / 2, **kw)
    out = {}
    for name, a, b in zip(coarse._fields, coarse, fine):
        out[name] = None if max(abs(a), abs(b)) < EXACT_FLOOR else abs(a) / abs(b) if b else math.inf
    return out


def legendre_K(action: TwoPointAction, pt) -> float:
    """``K = P dx + E dt - S`` with ``P = -(p1+p2)/2`` and ``E = (H1+H2)/2`` (paper convention)."""
    p1, p2, h1, h2 = action.endpoint_data(pt)
    m = MidpointCoords.from_point(pt)
    s = action.sign
    return s * (-(p1 + p2) / 2) * m.dx + s * (h1 + h2) / 2 * m.dt - action.S(*pt)


@dataclass(frozen=True)
class LiouvilleLimit:
    residual: float
    step: float
    grid_points: int


def liouville_limit_check(K: Callable, H: Callable, X, P, T, step: float = 1e-3) -> LiouvilleLimit:
    """``max |dK/dT + {K, H}|`` over a grid, all partials by central differences.

    ``K(X, P, T)`` and ``H(X, P)`` must accept numpy arrays.
    """
    if step > 0.1:
        warnings.warn(f"finite-difference step {step} > 0.1; residuals will be inaccurate", AccuracyWarning,
                      stacklevel=2)
    Xg, Pg, Tg = np.meshgrid(np.asarray(X, float), np.asarray(P, float), np.asarray(T, float), indexing="ij")
    e = step
    kt = (K(Xg, Pg, Tg + e) - K(Xg, Pg, Tg - e)) / (2 * e)
    kx = (K(Xg + e, Pg, Tg) - K(Xg - e, Pg, Tg)) / (2 * e)
    kp = (K(Xg, Pg + e, Tg) - K(Xg, Pg - e, Tg)) / (2 * e)
    hx = (H(Xg + e, Pg) - H(Xg - e, Pg)) / (2 * e)
    hp = (H(Xg, Pg + e) - H(Xg, Pg - e)) / (2 * e)
    res = np.abs(kt + kx * hp - kp * hx)
    return LiouvilleLimit(float(res.max()), step, int(res.size))


def transported_density(K0: Callable, omega: float = 1.0, mass: float = 1.0) -> Callable:
    """``K(X, P, T) = K0`` pulled back along the oscillator flow (characteristics)."""
    w, m = omega, mass

    def K(X, P, T):
        c, s = np.cos(w * T), np.sin(w * T)
        return K0(X * c - P * s / (m * w), X * s * m * w + P * c)

    return K


def energy_limit_check(action: TwoPointAction, x_of_t: Callable, T: float, dt: float,
                       h: float = DEFAULT_H, precision: int | None = DEFAULT_DPS) -> tuple[float, float]:
    """``(dS/d(dt), E)`` at midpoint time ``T`` along the trajectory ``x_of_t``."""
    pt = Point(x_of_t(T - dt / 2), T - dt / 2, x_of_t(T + dt / 2), T + dt / 2)
    r = midpoint_identities(action, pt, h, precision)
    e = action.energy(pt)
    return float(r.rdt + action.sign * e), float(e)


def composition_defect(action: TwoPointAction, x1: float, t1: float, x3: float, t3: float, t2: float) -> float:
    """``|S(1,2) + S(2,3) - S(1,3)|`` with point 2 on the classical path."""
    x2 = action.trajectory(x1, t1, x3, t3, t2)
    return abs(action.S(x1, t1, x2, t2) + action.S(x2, t2, x3, t3) - action.S(x1, t1, x3, t3))
