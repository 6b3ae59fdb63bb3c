"""Acceptance criteria, one test each.  Every test prints a PASS/FAIL line.

Tolerances and runtime budgets are written out here rather than read from the
suites, so a change to a suite default cannot loosen a criterion.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from duronlab import ccr, fock, moyal, quantum, suites, superops, thermofield
from duronlab.cli import main
from duronlab.exact import GaussRat


@pytest.fixture
def verdict(capsys):
    def record(number: int, title: str, ok: bool, summary: str):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number:2d} {title}: {summary}")
        assert ok, summary
    return record


def _timed(fn, *args, **kwargs):
    t = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, time.perf_counter() - t


def test_01_groupoid(verdict):
    rng = suites.suite_rng(0, "acceptance-groupoid")
    fails, secs = _timed(suites.groupoid_failures, 1000, rng)
    undefined = fails.pop("undefined_seen")
    ok = all(v == 0 for v in fails.values()) and undefined > 0 and secs < 1.0
    verdict(1, "groupoid rules", ok, f"failures={fails} undefined={undefined} runtime={secs:.3f}s (<1s)")


def test_02_quaternions(verdict):
    rel, secs = _timed(suites.quaternion_relations)
    ok = all(rel.values()) and secs < 0.1
    bad = [k for k, v in rel.items() if not v]
    verdict(2, "quaternions from iterants", ok, f"failing={bad} runtime={secs * 1e3:.1f}ms (<100ms)")


def test_03_ritz(verdict):
    rng = suites.suite_rng(0, "acceptance-ritz")
    failures, dev = suites.ritz_suite(100, rng)
    ok = failures == 0 and dev <= 1e-12
    verdict(3, "Ritz combination", ok, f"rule failures={failures} phase deviation={dev:.2e} (<=1e-12)")


def test_04_ccr_presets(verdict):
    doubled = ccr.verify_table("paper-doubling")
    duron = ccr.verify_table("time-duron")
    i_half = GaussRat(0, Fraction(1, 2))
    _, std, _, _ = ccr.preset("standard-doubling")
    x_pi = ccr.bracket(std["X"], std["pi"])
    x_p = ccr.bracket(std["X"], std["P"])
    ok = (doubled.passed and all(e.agrees_with_printed for e in doubled.entries)
          and x_pi.is_scalar() and x_pi.scalar_value() == 0 and x_p.is_scalar() and x_p.scalar_value() == i_half
          and duron.passed)
    verdict(4, "CCR presets", ok,
            f"doubling table={doubled.passed} standard [X,pi]={x_pi} [X,P]={x_p} duron table={duron.passed}")


def test_05_classical(verdict):
    checks, secs = _timed(suites.classical_suite, dict(suites.DEFAULTS), None)
    by = {c.name: c for c in checks}
    worst = max(by[f"classical.{s}.{k}"].value for s in ("free", "oscillator") for k in ("hj_pair", "midpoint"))
    ratios = by["classical.free.convergence"].value + by["classical.oscillator.convergence"].value
    ok = worst <= 1e-5 and all(3.5 <= r <= 4.5 for r in ratios) and secs < 2.0
    verdict(5, "classical bi-local", ok,
            f"max residual={worst:.2e} (<=1e-5) ratios={[round(r, 3) for r in ratios]} runtime={secs:.2f}s (<2s)")


def test_06_liouville(verdict):
    rng = suites.suite_rng(0, "acceptance-liouville")
    worst, ratios = suites.liouville_random(rng, 5, n=8, h=1e-4)
    ok = worst <= 1e-6 and all(3.5 <= r <= 4.5 for r in ratios)
    verdict(6, "quantum Liouville", ok, f"residual={worst:.2e} (<=1e-6) ratios={[round(r, 3) for r in ratios]}")


def test_07_energy(verdict):
    rng = suites.suite_rng(0, "acceptance-energy")
    eig, tr = suites.energy_checks(rng, 100)
    # independent oracle: <H> from the state directly
    H = quantum.random_hermitian(8, rng)
    psi = quantum.random_state(8, rng)
    rho = np.outer(psi.amplitudes, psi.amplitudes.conj())
    hm = H.toarray()
    direct = abs(np.trace(rho @ hm + hm @ rho).real / 2 - (psi.amplitudes.conj() @ hm @ psi.amplitudes).real)
    ok = eig <= 1e-12 and tr <= 1e-12 and direct <= 1e-12
    verdict(7, "energy anticommutator", ok, f"eigenstates={eig:.2e} random states={tr:.2e} (<=1e-12)")


def test_08_quantum_hj(verdict):
    t0 = time.perf_counter()
    ground = suites.qhj_ground()
    coherent, _ = suites.qhj_coherent(dx=0.01, dt=1e-4)
    res = suites.qhj_free_convergence()
    secs = time.perf_counter() - t0
    ratios = [a / b for a, b in zip(res, res[1:])]
    ok = ground <= 1e-6 and coherent <= 1e-4 and all(3.5 <= r <= 4.5 for r in ratios) and secs < 30
    verdict(8, "quantum Hamilton-Jacobi", ok,
            f"ground={ground:.2e} (<=1e-6) coherent={coherent:.2e} (<=1e-4) "
            f"refinement ratios={[round(r, 3) for r in ratios]} runtime={secs:.1f}s (<30s)")


def test_09_moyal(verdict):
    X, P, H = moyal.X, moyal.P, moyal.HBAR
    xp = moyal.star(X, P) == X * P + H * GaussRat(0, Fraction(1, 2))
    checks = suites.moyal_suite(dict(suites.DEFAULTS), suites.suite_rng(0, "acceptance-moyal"))
    bad = [c.name for c in checks if not c.passed]
    ok = xp and not bad
    verdict(9, "Moyal algebra", ok, f"x*p exact={xp} failing={bad}")


def test_10_superops(verdict):
    rng = suites.suite_rng(0, "acceptance-superops")
    spec = evo = 0.0
    for n in range(1, 9):
        H = quantum.random_hermitian(n, rng)
        E = np.linalg.eigvalsh(H.toarray())
        for op, pred in ((superops.liouvillian(H), np.subtract.outer(E, E)),
                         (superops.energy_superop(H), np.add.outer(E, E))):
            got = np.sort(np.linalg.eigvals(op.toarray()).real)
            spec = max(spec, float(np.abs(got - np.sort(pred.ravel())).max()))
        psi = quantum.random_state(n, rng)
        rho = np.outer(psi.amplitudes, psi.amplitudes.conj())
        t = float(rng.uniform(0, 3))
        u = H.eigh[1] @ np.diag(np.exp(-1j * E * t)) @ H.eigh[1].conj().T
        v = superops.devectorize(superops.vec_evolve_dense(H, superops.vectorize(rho), t))
        evo = max(evo, float(np.abs(v - u @ rho @ u.conj().T).max()))
    ok = spec <= 1e-9 and evo <= 1e-9
    verdict(10, "super-operators", ok, f"spectra={spec:.2e} vec evolution={evo:.2e} (<=1e-9)")


def test_11_theta_vacuum(verdict):
    t0 = time.perf_counter()
    cdev = occ = 0.0
    for theta in (0.2, 0.6, 1.0, 1.2):
        c, o, _ = suites.vacuum_checks(theta, 60, levels=20)
        cdev, occ = max(cdev, c), max(occ, o)
    secs = time.perf_counter() - t0
    ok = cdev <= 1e-8 and occ <= 1e-8 and secs < 10
    verdict(11, "theta-vacuum", ok, f"c_n error={cdev:.2e} occupation error={occ:.2e} (<=1e-8) "
            f"runtime={secs:.2f}s (<10s)")


def test_12_gibbs(verdict):
    worst = 0.0
    for bw in (0.5, 1.0, 2.0, 3.0):
        th = math.atanh(math.exp(-bw / 2))
        rep = thermofield.gibbs_match(th, bw, 1.0, max(60, thermofield.required_cutoff(th)))
        vac = thermofield.theta_vacuum(th, rep.cutoff)
        diag = np.abs(vac.coefficients) ** 2
        k = np.arange(len(diag))
        gibbs = (1 - math.exp(-bw)) * np.exp(-bw * k)
        nbar = 1 / math.expm1(bw)
        oracle = {"N": nbar, "H": nbar + 0.5}
        n = rep.cutoff
        a = fock.annihilation(n)
        obs = {"N": fock.number(n), "x": a + a.dagger(), "H": fock.number(n) + fock.identity(n) * 0.5}
        vals = {key: vac.expectation_left(op).real for key, op in obs.items()}
        worst = max(worst, float(np.abs(diag - gibbs).max()), rep.diagonal_deviation, rep.max_expectation_deviation,
                    abs(vals["N"] - oracle["N"]), abs(vals["H"] - oracle["H"]), abs(vals["x"]))
    ok = worst <= 1e-6
    verdict(12, "Gibbs correspondence", ok, f"worst deviation={worst:.2e} (<=1e-6)")


def test_13_bogoliubov(verdict):
    bog = thermofield.verify_bogoliubov(0.6, 50, 1e-6, theta_bar=None)
    grp = thermofield.verify_bogoliubov(0.3, 60, 1e-6, theta_bar=0.4)
    d = thermofield.theta_derivative_check(0.4, 60, 1e-3)
    conj = max(bog.closed_vs_conjugation, bog.tilde_closed_vs_conjugation)
    ann = max(bog.vacuum_annihilation, bog.tilde_vacuum_annihilation)
    ok = conj <= 1e-6 and ann <= 1e-6 and grp.group_law <= 1e-6 and 3.5 <= d.ratio <= 4.5
    verdict(13, "Bogoliubov transformation", ok,
            f"conjugation={conj:.2e} annihilation={ann:.2e} group law={grp.group_law:.2e} (<=1e-6) "
            f"derivative ratio={d.ratio:.3f}")


def test_14_determinism(verdict, tmp_path, capsys):
    outs = [tmp_path / "a.json", tmp_path / "b.json"]
    codes = [main(["verify-all", "--seed", "7", "--out", str(p)]) for p in outs]
    same = outs[0].read_bytes() == outs[1].read_bytes()
    ok = same and codes == [0, 0]
    verdict(14, "determinism", ok, f"exit codes={codes} byte-identical={same}")
