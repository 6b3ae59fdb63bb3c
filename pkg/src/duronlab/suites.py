"""Check suites shared by the CLI and the acceptance tests.

Each suite is ``fn(params, rng) -> list[Check]``.  Randomness comes from
:func:`suite_rng`: numpy's PCG64 seeded with
``SeedSequence(seed, spawn_key=(crc32(suite_name),))``, so every suite draws
an independent, reproducible stream regardless of which other suites run.
"""

from __future__ import annotations

import math
import warnings
import zlib
from fractions import Fraction

import numpy as np

from duronlab import ccr, classical, fock, moyal, process, quantum, superops, thermofield
from duronlab import process_parser as pp
from duronlab.exact import GaussRat, format_scalar
from duronlab.report import PLUMBING, Check, anchor_coverage, check_in, check_le, check_true

DEFAULTS = {
    "n": 60,
    "seed": 0,
    "theta": 0.8,
    "betas": "0.5,1,2,3",
    "omega": 1.0,
    "h": 1e-5,
    "hq": 1e-4,
    "dx": 0.01,
    "dt": 1e-4,
    "expressions": 1000,
    "ritz_tables": 100,
    "random_states": 100,
    "liouville_systems": 5,
    "levels": 8,
    "max_n": 8,
}


def suite_rng(seed: int, name: str) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=(zlib.crc32(name.encode()),))
    return np.random.Generator(np.random.PCG64(ss))


def _p(params: dict, key: str):
    return params.get(key, DEFAULTS[key])


def _rand_gauss(rng, lo=-4, hi=4, den=3) -> GaussRat:
    a, b, c, d = rng.integers((lo, 1, lo, 1), (hi + 1, den + 1, hi + 1, den + 1)).tolist()
    return GaussRat(Fraction(a, b), Fraction(c, d))


def _nonzero_gauss(rng) -> GaussRat:
    while True:
        k = _rand_gauss(rng)
        if k:
            return k


# -- process algebra ---------------------------------------------------------------

_LABELS = ("A", "B", "C", "D", "E")


def _random_chain(rng, length: int):
    """Brackets whose middle labels match with probability ~0.8 at each joint."""
    labels = [str(rng.choice(_LABELS))]
    brackets = []
    for _ in range(length):
        left = labels[-1] if rng.random() < 0.8 else str(rng.choice(_LABELS))
        right = str(rng.choice(_LABELS))
        brackets.append(process.ProcessBracket(left, right, _nonzero_gauss(rng)))
        labels.append(right)
    return brackets


def groupoid_failures(count: int, rng) -> dict:
    """Run rules (1)-(5) on ``count`` random bracket expressions; return failure counts."""
    fails = {"strength": 0, "involution": 0, "succession": 0, "associativity": 0, "coexistence": 0,
             "roundtrip": 0}
    undefined = 0
    for _ in range(count):
        chain = _random_chain(rng, int(rng.integers(1, 5)))
        # (1) [kA,kB] == k[A,B]
        b = chain[0]
        k = b.strength
        ks = format_scalar(k)
        ks = ks if ks.startswith("(") else f"({ks})"
        text = f"[{ks}{b.left},{ks}{b.right}]"
        got = pp.evaluate(text)
        if got != process.ProcessElement((b,)):
            fails["strength"] += 1
        # (2) involution, and the observed product/conjugate rule
        if b.conjugate().conjugate() != b:
            fails["involution"] += 1
        # (3) succession: error exactly when some joint mismatches
        mismatch = any(x.right != y.left for x, y in zip(chain, chain[1:]))
        try:
            out = chain[0]
            for nxt in chain[1:]:
                out = process.compose(out, nxt)
            expected_k = GaussRat(1)
            for x in chain:
                expected_k = expected_k * x.strength
            ok = (not mismatch) and out == process.ProcessBracket(chain[0].left, chain[-1].right, expected_k)
        except process.UndefinedComposition:
            undefined += 1
            ok = mismatch
        if not ok:
            fails["succession"] += 1
        # (4) associativity on the first triple, when both sides are defined
        if len(chain) >= 3:
            x, y, z = chain[:3]
            try:
                lhs = process.compose(process.compose(x, y), z)
                rhs = process.compose(x, process.compose(y, z))
                if lhs != rhs:
                    fails["associativity"] += 1
            except process.UndefinedComposition:
                pass
        # (5) label merge of two equal-strength brackets is commutative and labelwise
        c = process.ProcessBracket(chain[-1].left, chain[-1].right, k)
        m1 = process.ProcessElement((b, c)).merged()
        m2 = process.ProcessElement((c, b)).merged()
        if m1 != m2 or m1.left != process.merge_labels(b.left, c.left) or m1.strength != k:
            fails["coexistence"] += 1
        # parse . print . parse
        expr = pp.Expr((pp.Term(k, tuple(process.ProcessBracket(x.left, x.right) for x in chain)),))
        once = pp.parse(pp.pretty(expr))
        if pp.parse(pp.pretty(once)) != once:
            fails["roundtrip"] += 1
    fails["undefined_seen"] = undefined
    return fails


def quaternion_relations() -> dict:
    """Exact truth values of the quaternion relations, abstractly and via 2x2 matrices."""
    I, J, K = process.quaternion_units()
    minus_one = -process.ITERANT_ONE
    rel = {
        "I^2=-1": I * I == minus_one,
        "J^2=-1": J * J == minus_one,
        "K^2=-1": K * K == minus_one,
        "IJK=-1": I * J * K == minus_one,
        "IJ=K": I * J == K,
        "JI=-K": J * I == -K,
    }
    mat = process.iterant_matrix
    m = {u: mat(v, exact=True) for u, v in zip("IJK", (I, J, K))}
    neg1 = mat(minus_one, exact=True)
    mm = process.matmul2
    rel["matrix IJ=K"] = mm(m["I"], m["J"]) == m["K"]
    rel["matrix I^2=-1"] = mm(m["I"], m["I"]) == neg1
    rel["matrix IJK=-1"] = mm(mm(m["I"], m["J"]), m["K"]) == neg1
    return rel


def iterant_faithful(count: int, rng) -> int:
    bad = 0
    for _ in range(count):
        u = process.Iterant(_rand_gauss(rng), _rand_gauss(rng), bool(rng.random() < 0.5))
        v = process.Iterant(_rand_gauss(rng), _rand_gauss(rng), bool(rng.random() < 0.5))
        lhs = process.iterant_matrix(u * v, exact=True)
        rhs = process.matmul2(process.iterant_matrix(u, exact=True), process.iterant_matrix(v, exact=True))
        bad += lhs != rhs
    return bad


def incidence_failures(count: int, rng) -> int:
    bad = 0
    for _ in range(count):
        es = [process.Incidence.unit(str(rng.choice(_LABELS[:3])), str(rng.choice(_LABELS[:3])),
                                     _nonzero_gauss(rng)) for _ in range(3)]
        e1, e2, e3 = es
        if (e1 * e2) * e3 != e1 * (e2 * e3):
            bad += 1
        (a, b), _ = e1.terms[0]
        (c, d), _ = e2.terms[0]
        if (b != c) != (e1 * e2).is_zero:
            bad += 1
    return bad


def ritz_suite(count: int, rng) -> tuple[int, float]:
    failures, worst = 0, 0.0
    for _ in range(count):
        n = int(rng.integers(2, 7))
        nu = tuple(Fraction(int(rng.integers(-20, 21)), int(rng.integers(1, 7))) for _ in range(n))
        amp = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        ts = process.TransitionSystem(nu, amp, float(rng.uniform(-3, 3)))
        if not process.ritz_check(ts).passed:
            failures += 1
        _, dev = process.transition_product(ts)
        worst = max(worst, dev)
    return failures, worst


def algebra_suite(params: dict, rng) -> list[Check]:
    out = []
    fails = groupoid_failures(int(_p(params, "expressions")), rng)
    total = sum(v for k, v in fails.items() if k != "undefined_seen")
    out.append(Check("groupoid.rules", "process-rules", total, 0, total == 0, fails))
    out.append(check_true("groupoid.undefined_is_error", "process-rules",
                          _undefined_vs_zero(), detail_note="compose raises, incidence gives zero"))
    rel = quaternion_relations()
    out.append(check_true("iterant.quaternions", "kauffman-product", all(rel.values()),
                          relations={k: bool(v) for k, v in rel.items()}))
    bad = iterant_faithful(200, rng)
    out.append(Check("iterant.matrix_faithful", "kauffman-product", bad, 0, bad == 0))
    bad = incidence_failures(300, rng)
    out.append(Check("incidence.associative_delta", "incidence-product", bad, 0, bad == 0))
    fails, worst = ritz_suite(int(_p(params, "ritz_tables")), rng)
    out.append(Check("ritz.combination_rule", "ritz-rule", fails, 0, fails == 0))
    out.append(check_le("ritz.transition_phase", "ritz-rule", worst, 1e-12))
    return out


def _undefined_vs_zero() -> bool:
    try:
        process.compose(process.ProcessBracket("A", "B"), process.ProcessBracket("C", "D"))
        return False
    except process.UndefinedComposition:
        pass
    z = process.incidence_product(process.Incidence.unit("A", "B"), process.Incidence.unit("C", "D"))
    return z.is_zero


# -- ccr kernel ------------------------------------------------------------------

def ccr_suite(params: dict, rng) -> list[Check]:
    out = []
    printed = ccr.verify_table("paper-doubling")
    out.append(check_true("ccr.paper_doubling_table", "bialgebra-commutators",
                          printed.passed and all(e.agrees_with_printed for e in printed.entries)))
    std = ccr.verify_table("standard-doubling")
    x_pi, x_p = std.entry("X", "pi").rhs_computed, std.entry("X", "P").rhs_computed
    out.append(check_true("ccr.standard_doubling_X_pi", "bialgebra-commutators", x_pi == "0", value=x_pi))
    out.append(check_true("ccr.standard_doubling_X_P", "bialgebra-commutators", x_p == "i/2", value=x_p))
    out.append(check_true("ccr.standard_doubling_disagrees", "bialgebra-commutators",
                          not all(e.agrees_with_printed for e in std.entries)))
    duron = ccr.verify_table("time-duron")
    out.append(check_true("ccr.duron_table", "duron-table", duron.passed))
    pois = ccr.verify_table("classical-poisson-doubling")
    out.append(check_true("ccr.poisson_doubling", "generalised-poisson", pois.passed))
    jac = _jacobi_failures(rng, 40)
    out.append(Check("ccr.jacobi_degree2", PLUMBING, jac, 0, jac == 0))
    return out


def _random_normal_poly(alg, rng, degree=2):
    names = [g.name for g in alg.generators]
    poly = alg.zero()
    for _ in range(3):
        term = alg.scalar(_rand_gauss(rng))
        for _ in range(int(rng.integers(0, degree + 1))):
            term = term * alg[str(rng.choice(names))]
        poly = poly + term
    return poly


def _jacobi_failures(rng, count: int) -> int:
    alg, _, _, _ = ccr.preset("standard-doubling")
    bad = 0
    for _ in range(count):
        p, q, r = (_random_normal_poly(alg, rng) for _ in range(3))
        c = ccr.commutator
        if c(p, c(q, r)) + c(q, c(r, p)) + c(r, c(p, q)):
            bad += 1
    return bad


# -- classical -------------------------------------------------------------------

CLASSICAL_POINTS = {
    "free": ((), (0.3, 0.2, 1.1, 1.0)),
    "oscillator": ((1.0, 1.3), (0.4, 0.1, -0.7, 1.2)),
}


def classical_system(name: str):
    args, pt = CLASSICAL_POINTS[name]
    return classical.SYSTEMS[name](*args), pt


def classical_suite(params: dict, rng) -> list[Check]:
    h = float(_p(params, "h"))
    out = []
    for name in ("free", "oscillator"):
        act, pt = classical_system(name)
        hj = classical.hj_residuals(act, pt, h)
        mid = classical.midpoint_identities(act, pt, h)
        out.append(check_le(f"classical.{name}.hj_pair", "two-point-hj", max(map(abs, hj)), 1e-5,
                            residuals=list(hj)))
        out.append(check_le(f"classical.{name}.midpoint", "midpoint-hj", max(map(abs, mid)), 1e-5,
                            residuals=list(mid)))
        ratios = {**classical.convergence_ratios(classical.hj_residuals, act, pt, h),
                  **classical.convergence_ratios(classical.midpoint_identities, act, pt, h)}
        live = [r for r in ratios.values() if r is not None]
        lo, hi = (min(live), max(live)) if live else (4.0, 4.0)
        out.append(Check(f"classical.{name}.convergence", "two-point-hj", [lo, hi], [3.5, 4.5],
                         3.5 <= lo and hi <= 4.5, {"ratios": ratios}))
        flipped = classical.hj_residuals(act.with_convention("standard"), pt, h)
        out.append(check_true(f"classical.{name}.convention_flip", "two-point-hj",
                              all(a == -b for a, b in zip(hj, flipped))))
        comp = classical.composition_defect(act, pt[0], pt[1], pt[2], pt[3] + 0.3, pt[3])
        out.append(check_le(f"classical.{name}.composition", "two-point-hj", comp, 1e-6))
    act, pt = classical_system("oscillator")
    sign = classical.limit_sign_report(act, pt, h)
    out.append(check_le("classical.midpoint_T_sign", "legendre-limit", sign["midpoint_sign_residual"], 1e-5,
                        **sign))
    ho = classical.harmonic_oscillator()
    dsdt, e = classical.energy_limit_check(ho, math.cos, 0.4, 0.01)
    out.append(check_le("classical.energy_limit", "legendre-limit", abs(dsdt - 0.5), 1e-3, energy=e))
    g = np.linspace(-2, 2, 21)
    K = classical.transported_density(lambda x, p: np.exp(-(x - 1) ** 2 - p ** 2))
    lim = classical.liouville_limit_check(K, lambda x, p: (x * x + p * p) / 2, g, g, np.linspace(0, 1, 5))
    out.append(check_le("classical.liouville_limit", "legendre-limit", lim.residual, 1e-4))
    free = classical.liouville_limit_check(lambda x, p, t: p * p / 2 + 0 * x, lambda x, p: p * p / 2, g, g, [0.0])
    out.append(check_le("classical.liouville_stationary", "legendre-limit", free.residual, 1e-12))
    act, pt = classical_system("free")
    k = classical.legendre_K(act, pt)
    out.append(check_true("classical.legendre_K_finite", "legendre-limit", math.isfinite(k), value=k))
    return out


# -- quantum -----------------------------------------------------------------------

def harmonic(x):
    return 0.5 * x ** 2


COHERENT_X0 = math.sqrt(2) / 4  # alpha = 1/4


def qhj_ground(dx: float = 0.02, L: float = 10.0) -> float:
    g = quantum.Grid1D(L, dx, 1.0, harmonic)
    phi, _ = g.ground_state()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", quantum.NodeDominationWarning)
        return quantum.qhj_run(g, phi, 0.5, 1e-4).max_residual


def qhj_coherent(dx: float = 0.01, dt: float = 1e-4, x0: float = COHERENT_X0, samples: int = 24,
                 L: float = 10.0) -> tuple[float, float]:
    """Worst residual over one period and the worst operator-form defect."""
    g = quantum.Grid1D(L, dx, 1.0, harmonic)
    psi0 = quantum.coherent_state(g.x, x0)
    worst, op = 0.0, 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", quantum.NodeDominationWarning)
        for t in np.linspace(0, 2 * np.pi, samples + 1)[1:]:
            r = quantum.qhj_run(g, psi0, float(t), dt)
            worst = max(worst, r.max_residual)
            op = max(op, r.operator_defect)
    return worst, op


QHJ_CONVERGENCE_FLOOR = 1e-3


def qhj_free_convergence(steps=((0.04, 4e-4), (0.02, 2e-4), (0.01, 1e-4)), L: float = 10.0) -> list[float]:
    res = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", quantum.NodeDominationWarning)
        for dx, dt in steps:
            g = quantum.Grid1D(L, dx)
            psi0 = quantum.gaussian(g.x, 0.0, 1.0, 1.0)
            res.append(quantum.qhj_run(g, psi0, 0.5, dt, floor=QHJ_CONVERGENCE_FLOOR).max_residual)
    return res


def liouville_random(rng, systems: int, n: int = 8, h: float = 1e-4) -> tuple[float, list]:
    worst, ratios = 0.0, []
    for _ in range(systems):
        H = quantum.random_hermitian(n, rng)
        psi = quantum.random_state(n, rng)
        t = float(rng.uniform(0, 2))
        r1 = quantum.liouville_residual(psi, H, t, h)
        r2 = quantum.liouville_residual(psi, H, t, h / 2)
        worst = max(worst, r1)
        ratios.append(r1 / r2)
    return worst, ratios


def energy_checks(rng, states: int, n: int = 8) -> tuple[float, float]:
    H = quantum.random_hermitian(n, rng)
    w, v = H.eigh
    eig_worst = 0.0
    for k in range(n):
        rep = quantum.energy_anticommutator(fock.StateVector(v[:, k]), H)
        rho = np.outer(v[:, k], v[:, k].conj())
        eig_worst = max(eig_worst, float(np.abs(rep.anticommutator - 2 * w[k] * rho).max()))
    tr_worst = 0.0
    for _ in range(states):
        rep = quantum.energy_anticommutator(quantum.random_state(n, rng), H, float(rng.uniform(0, 2)))
        tr_worst = max(tr_worst, rep.trace_defect)
    return eig_worst, tr_worst


def quantum_suite(params: dict, rng) -> list[Check]:
    out = []
    hq = float(_p(params, "hq"))
    levels = int(_p(params, "levels"))
    worst, ratios = liouville_random(rng, int(_p(params, "liouville_systems")), levels, hq)
    out.append(check_le("quantum.liouville_residual", "quantum-liouville", worst, 1e-6))
    out.append(Check("quantum.liouville_convergence", "quantum-liouville", [min(ratios), max(ratios)],
                     [3.5, 4.5], all(3.5 <= r <= 4.5 for r in ratios)))
    eig, tr = energy_checks(rng, int(_p(params, "random_states")), levels)
    out.append(check_le("quantum.anticommutator_eigenstates", "energy-anticommutator", eig, 1e-12))
    out.append(check_le("quantum.anticommutator_trace", "energy-anticommutator", tr, 1e-12))
    H = quantum.random_hermitian(6, rng)
    psi = quantum.random_state(6, rng)
    d1, d2 = quantum.dt_residual(psi, H, 0.3, 1e-3), quantum.dt_residual(psi, H, 0.3, 5e-4)
    out.append(check_in("quantum.dt_derivative_convergence", "energy-anticommutator", d1 / d2, 3.5, 4.5,
                        residual=d1))
    rho = quantum.bilocal(psi, H, 0.4, 0.4)
    out.append(check_le("quantum.trace_purity", "bilocal-density",
                        max(abs(rho.trace() - 1), abs(rho.purity() - 1)), 1e-10))
    hm = H.toarray()
    split = rho.matrix @ hm - 0.5 * ((rho.matrix @ hm - hm @ rho.matrix) + (rho.matrix @ hm + hm @ rho.matrix))
    out.append(check_le("quantum.comm_anticomm_split", "bilocal-density", float(np.abs(split).max()), 1e-14))
    dx, dt = float(_p(params, "dx")), float(_p(params, "dt"))
    out.append(check_le("quantum.qhj_ground_state", "quantum-hj", qhj_ground(), 1e-6, dx=0.02))
    coh, op = qhj_coherent(dx, dt)
    out.append(check_le("quantum.qhj_coherent_state", "quantum-hj", coh, 1e-4, dx=dx, dt=dt, x0=COHERENT_X0))
    out.append(check_le("quantum.qhj_operator_form", "quantum-hj", op, 1e-6))
    res = qhj_free_convergence()
    r = [res[0] / res[1], res[1] / res[2]]
    out.append(Check("quantum.qhj_free_convergence", "quantum-hj", r, [3.5, 4.5],
                     all(3.5 <= v <= 4.5 for v in r), {"residuals": res, "floor": QHJ_CONVERGENCE_FLOOR}))
    return out


# -- moyal -----------------------------------------------------------------------

def random_phase_poly(rng, degree: int, terms: int = 4) -> moyal.PhasePoly:
    out = {}
    for _ in range(terms):
        a = int(rng.integers(0, degree + 1))
        b = int(rng.integers(0, degree - a + 1))
        out[(a, b, 0)] = _rand_gauss(rng)
    return moyal.PhasePoly(out)


def quadratic_basis():
    return [moyal.PhasePoly.monomial(a, b) for a in range(3) for b in range(3 - a)]


def moyal_suite(params: dict, rng) -> list[Check]:
    out = []
    X, P, H = moyal.X, moyal.P, moyal.HBAR
    half_i = GaussRat(0, Fraction(1, 2))
    out.append(check_true("moyal.x_star_p", "moyal-baker", moyal.star(X, P) == X * P + H * half_i,
                          value=str(moyal.star(X, P))))
    basis = quadratic_basis()
    bad = sum(moyal.moyal_bracket(f, g) != moyal.poisson_bracket(f, g) for f in basis for g in basis)
    out.append(Check("moyal.mb_equals_pb_quadratic", "moyal-baker", bad, 0, bad == 0))
    bad_sym = bad_h0 = bad_assoc = bad_bopp = 0
    for _ in range(20):
        f, g, k = (random_phase_poly(rng, 4) for _ in range(3))
        bad_sym += moyal.baker_bracket(f, g) != moyal.baker_bracket(g, f)
        bad_h0 += moyal.star(f, g).at_hbar_zero() != f * g
        bad_assoc += moyal.star(moyal.star(f, g), k) != moyal.star(f, moyal.star(g, k))
        bad_bopp += moyal.star(f, g) != moyal.star_bopp(f, g)
    out.append(Check("moyal.baker_symmetric", "moyal-baker", bad_sym, 0, bad_sym == 0))
    out.append(Check("moyal.hbar_zero_limit", "moyal-baker", bad_h0, 0, bad_h0 == 0))
    out.append(Check("moyal.star_associative", "moyal-baker", bad_assoc, 0, bad_assoc == 0))
    out.append(Check("moyal.series_equals_bopp", "moyal-baker", bad_bopp, 0, bad_bopp == 0))
    rep = moyal.classical_limit_report(X ** 3, P ** 3)
    out.append(check_true("moyal.cubic_limit", "moyal-baker",
                          rep.passed and rep.first_correction_order == 2, detail=rep.to_json()))
    return out


# -- superops ----------------------------------------------------------------------

def superops_suite(params: dict, rng) -> list[Check]:
    out = []
    spec_worst = evo_worst = comm_worst = 0.0
    for n in range(2, int(_p(params, "max_n")) + 1):
        H = quantum.random_hermitian(n, rng)
        L, E = superops.liouvillian(H), superops.energy_superop(H)
        pl, pe = superops.predicted_spectra(H)
        spec_worst = max(spec_worst, float(np.abs(superops.spectrum(L) - pl).max()),
                         float(np.abs(superops.spectrum(E) - pe).max()))
        psi = quantum.random_state(n, rng)
        rho = np.outer(psi.amplitudes, psi.amplitudes.conj())
        t = float(rng.uniform(0, 3))
        u = H.eigh[1] @ np.diag(np.exp(-1j * H.eigh[0] * t)) @ H.eigh[1].conj().T
        two_sided = u @ rho @ u.conj().T
        v = superops.vec_evolve_dense(H, superops.vectorize(rho), t)
        evo_worst = max(evo_worst, float(np.abs(superops.devectorize(v) - two_sided).max()))
        r = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        hm = H.toarray()
        lv = superops.devectorize(superops.apply(L, superops.vectorize(r)))
        comm_worst = max(comm_worst, float(np.abs(lv - (hm @ r - r @ hm)).max()))
    out.append(check_le("superops.spectra", "liouville-superop", spec_worst, 1e-9))
    out.append(check_le("superops.vec_evolution", "liouville-superop", evo_worst, 1e-9))
    out.append(check_le("superops.commutator_oracle", "liouville-superop", comm_worst, 1e-12))
    H = quantum.random_hermitian(5, rng)
    E = superops.energy_superop(H)
    w, v = H.eigh
    worst = 0.0
    for k in range(5):
        vec = superops.vectorize(np.outer(v[:, k], v[:, k].conj()))
        worst = max(worst, float(np.abs(superops.apply(E, vec).vector - 2 * w[k] * vec.vector).max()))
    out.append(check_le("superops.energy_eigenprojectors", "energy-superop", worst, 1e-12))
    age = superops.age_duron_symbolic()
    out.append(check_true("superops.age_duron_table", "duron-table", age.passed,
                          obstruction=age.trace_obstruction))
    return out


# -- thermofield ---------------------------------------------------------------------

# the occupation tail at theta = 1.2 needs more than the 1e-8 adequacy cutoff (51)
VACUUM_CUTOFF = 60


def vacuum_checks(theta: float, n: int, levels: int = 20, adequacy_tol: float = 1e-8) -> tuple[float, float, float]:
    """(max |c_n cosh - tanh^n| for n <= levels, |<N x 1> - sinh^2|, |norm - 1|)."""
    vac = thermofield.theta_vacuum(theta, n, adequacy_tol)
    k = np.arange(levels + 1)
    c = vac.coefficients[: levels + 1]
    cdev = float(np.abs(c * math.cosh(theta) - math.tanh(theta) ** k).max())
    occ = abs(vac.expectation_left(fock.number(n)).real - math.sinh(theta) ** 2)
    return cdev, occ, abs(vac.state.norm - 1)


def thermofield_suite(params: dict, rng) -> list[Check]:
    out = []
    n = int(_p(params, "n"))
    theta = float(_p(params, "theta"))
    for th in sorted({theta, 0.4, 1.2}):
        ne = max(n, VACUUM_CUTOFF, thermofield.required_cutoff(th, 1e-8))
        cdev, occ, nrm = vacuum_checks(th, ne)
        out.append(check_le(f"thermofield.vacuum_coefficients[theta={th:g}]", "bogoliubov-generator", cdev, 1e-8,
                            cutoff=ne))
        out.append(check_le(f"thermofield.mean_occupation[theta={th:g}]", "bogoliubov-generator", occ, 1e-8,
                            cutoff=ne))
        out.append(check_le(f"thermofield.norm[theta={th:g}]", "bogoliubov-generator", nrm, 1e-8, cutoff=ne))
    g = thermofield.bogoliubov_generator(n)
    out.append(check_le("thermofield.generator_hermitian", "bogoliubov-generator", g.hermiticity_defect(), 1e-12))
    omega = float(_p(params, "omega"))
    for bw in [float(b) for b in str(_p(params, "betas")).split(",")]:
        beta = bw / omega
        th = thermofield.theta_of_beta(beta, omega)
        ne = max(n, thermofield.required_cutoff(th))
        rep = thermofield.gibbs_match(th, beta, omega, ne)
        out.append(Check(f"thermofield.gibbs[beta_omega={bw:g}]", "thermal-wavefunction",
                         max(rep.diagonal_deviation, rep.max_expectation_deviation), 1e-6, rep.passed(1e-6),
                         {"theta_star": th, "cutoff": ne, "label": rep.label}))
    A, B = thermofield.AB_operators(n)
    cAA = (A @ A.dagger() - A.dagger() @ A).interior()
    cAB = (A @ B.dagger() - B.dagger() @ A).interior()
    out.append(check_le("thermofield.A_commutator", "coproducts", float(np.abs(cAA - np.eye(len(cAA))).max()), 1e-12))
    out.append(check_le("thermofield.A_B_commute", "coproducts", float(np.abs(cAB).max()), 1e-12))
    rec = thermofield.ab_reconstruction(n)
    out.append(check_le("thermofield.AB_reconstruction", "coproducts",
                        max(rec["X"], rec["P"], rec["eta"], rec["pi"]), 1e-12,
                        printed_sign_defects={"P": rec["P_printed_sign"], "pi": rec["pi_printed_sign"]}))
    a = fock.annihilation(n)
    plus, minus = thermofield.coproducts(a)
    sum_def = (plus.operator + minus.operator - fock.lift_left(a) * 2).matrix
    out.append(check_le("thermofield.coproduct_sum", "coproducts", float(abs(sum_def).max()), 0.0))
    aq, bq = thermofield.deformed_coproduct(0.0, n)
    A0 = float(abs((aq - A).matrix).max()) + float(abs((bq - B).matrix).max())
    out.append(check_le("thermofield.deformed_limit", "deformed-coproduct", A0, 1e-15,
                        q_number_at_zero=thermofield.q_number(0.0)))
    r1 = thermofield.deformed_derivative_residual(0.0, n, 1e-3)
    r2 = thermofield.deformed_derivative_residual(0.0, n, 5e-4)
    out.append(check_in("thermofield.deformed_derivative", "deformed-coproduct", r1 / r2, 3.5, 4.5, residual=r1))
    bog = thermofield.verify_bogoliubov(0.6, 50, 1e-6, theta_bar=None)
    out.append(check_le("thermofield.bogoliubov_conjugation", "bogoliubov-transform",
                        max(bog.closed_vs_conjugation, bog.tilde_closed_vs_conjugation), 1e-6,
                        working_cutoff=bog.working_cutoff))
    out.append(check_le("thermofield.vacuum_annihilation", "bogoliubov-transform",
                        max(bog.vacuum_annihilation, bog.tilde_vacuum_annihilation), 1e-6))
    out.append(check_le("thermofield.bogoliubov_commutator", "bogoliubov-transform", bog.commutator_defect, 1e-6))
    grp = thermofield.verify_bogoliubov(0.3, n, 1e-6, theta_bar=0.4)
    out.append(check_le("thermofield.group_law", "bogoliubov-transform", grp.group_law, 1e-6,
                        working_cutoff=grp.working_cutoff))
    d = thermofield.theta_derivative_check(0.4, n, 1e-3)
    out.append(check_in("thermofield.theta_derivative", "bogoliubov-transform", d.ratio, 3.5, 4.5,
                        residual=d.residual, tilde_residual=d.tilde_residual))
    sym = [thermofield.symbolic_bogoliubov(u).passed for u in ("1/3", "2/7", "-3/5")]
    out.append(check_true("thermofield.symbolic_ccr", "bogoliubov-transform", all(sym)))
    return out


# -- single-purpose runs used by the CLI -----------------------------------------

def thermofield_point(theta: float, n: int, beta: float | None = None, omega: float = 1.0,
                      adequacy_tol: float = thermofield.ADEQUACY_TOL) -> list[Check]:
    thermofield.check_cutoff(theta, n, adequacy_tol)
    vac = thermofield.theta_vacuum(theta, n, adequacy_tol)
    out = [check_le("thermofield.c0_cosh", "bogoliubov-generator",
                    abs(vac.coefficients[0] * math.cosh(theta) - 1), 1e-8, theta=theta, cutoff=n)]
    cdev, occ, nrm = vacuum_checks(theta, n, min(20, n - 1), adequacy_tol)
    out.append(check_le("thermofield.vacuum_coefficients", "bogoliubov-generator", cdev, 1e-8))
    out.append(check_le("thermofield.mean_occupation", "bogoliubov-generator", occ, 1e-8))
    out.append(check_le("thermofield.norm", "bogoliubov-generator", nrm, 1e-8))
    out.append(check_le("thermofield.vacuum_annihilation", "bogoliubov-transform", vacuum_annihilation(vac), 1e-6))
    if beta is not None:
        th = thermofield.theta_of_beta(beta, omega)
        rep = thermofield.gibbs_match(th, beta, omega, max(n, thermofield.required_cutoff(th, adequacy_tol)),
                                      adequacy_tol)
        out.append(Check("thermofield.gibbs", "thermal-wavefunction",
                         max(rep.diagonal_deviation, rep.max_expectation_deviation), 1e-6, rep.passed(1e-6),
                         rep.to_json()))
    return out


def vacuum_annihilation(vac) -> float:
    """``|| a(theta) |0(theta)> ||`` on the interior block."""
    at, _ = thermofield.theta_transform(vac.theta, vac.cutoff)
    idx = fock.interior_indices(vac.cutoff, "doubled")
    return float(np.linalg.norm((at @ vac.state).amplitudes[idx]))


SWEEP_LEVELS = 11


def thermofield_sweep(a: float, b: float, steps: int, n: int,
                      adequacy_tol: float = thermofield.ADEQUACY_TOL) -> list[dict]:
    """Rows of plot-ready data: coefficients, occupation, Gibbs deviation and annihilation residual.

    The Gibbs deviation compares the reduced diagonal with the truncated
    thermal weights ``r^(2k) / sum`` for ``r = tanh(theta)``.
    """
    rows = []
    for theta in np.linspace(a, b, steps):
        theta = float(theta)
        vac = thermofield.theta_vacuum(theta, n, adequacy_tol)
        w = math.tanh(theta) ** (2 * np.arange(n))
        diag = np.diag(vac.reduced_density()).real
        row = {"theta": theta}
        row.update({f"c{k}": float(vac.coefficients[k].real) for k in range(min(SWEEP_LEVELS, n))})
        row["mean_occupation"] = vac.expectation_left(fock.number(n)).real
        row["gibbs_deviation"] = float(np.abs(diag - w / w.sum()).max())
        row["bogoliubov_residual"] = vacuum_annihilation(vac)
        rows.append(row)
    return rows


def classical_grid(system: str, a: float, b: float, steps: int, dt: float | None = None,
                   h: float = classical.DEFAULT_H) -> list[dict]:
    """Residuals along a sweep of the second end point ``x2`` in ``[a, b]``."""
    act, pt = classical_system(system)
    x1, t1, _, t2 = pt
    if dt is not None:
        t2 = t1 + dt
    rows = []
    for x2 in np.linspace(a, b, steps):
        p = (x1, t1, float(x2), t2)
        hj = classical.hj_residuals(act, p, h)
        mid = classical.midpoint_identities(act, p, h)
        row = {"x2": float(x2)}
        row.update({k: float(v) for k, v in hj._asdict().items()})
        row.update({k: float(v) for k, v in mid._asdict().items()})
        rows.append(row)
    return rows


def qhj_profile(system: str, dx: float, dt: float, t: float = 0.5, L: float = 10.0) -> tuple[list[dict], float]:
    """Per-point residual on the grid for the oscillator coherent state or the free Gaussian."""
    if system == "free":
        g = quantum.Grid1D(L, dx)
        psi0 = quantum.gaussian(g.x, 0.0, 1.0, 1.0)
        floor = QHJ_CONVERGENCE_FLOOR
    else:
        g = quantum.Grid1D(L, dx, 1.0, harmonic)
        psi0 = quantum.coherent_state(g.x, COHERENT_X0)
        floor = 1e-6
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", quantum.NodeDominationWarning)
        r = quantum.qhj_run(g, psi0, t, dt, floor)
    rows = [{"x": float(x), "residual": float(v)} for x, v in zip(r.x, r.residual)]
    return rows, r.max_residual


def oscillator_levels(n: int, rng, h: float = 1e-4) -> list[Check]:
    """Liouville and energy checks with the truncated oscillator Hamiltonian."""
    H = fock.oscillator_hamiltonian(n)
    psi = quantum.random_state(n, rng)
    r1 = quantum.liouville_residual(psi, H, 0.7, h)
    r2 = quantum.liouville_residual(psi, H, 0.7, h / 2)
    out = [check_le("quantum.oscillator.liouville_residual", "quantum-liouville", r1, 1e-6),
           check_in("quantum.oscillator.liouville_convergence", "quantum-liouville", r1 / r2, 3.5, 4.5)]
    rep = quantum.energy_anticommutator(psi, H, 0.7)
    out.append(check_le("quantum.oscillator.anticommutator_trace", "energy-anticommutator", rep.trace_defect, 1e-12))
    return out


SUITES = {
    "algebra": algebra_suite,
    "ccr": ccr_suite,
    "bilocal-classical": classical_suite,
    "bilocal-quantum": quantum_suite,
    "moyal": moyal_suite,
    "superops": superops_suite,
    "thermofield": thermofield_suite,
}


def run_suite(name: str, params: dict) -> list[Check]:
    return SUITES[name](params, suite_rng(int(_p(params, "seed")), name))
