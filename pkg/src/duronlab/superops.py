"""Super-operators acting on vectorised density matrices.

The default vectorisation stacks rows: ``rho[i, j]`` lands at index
``i * N + j``, the same slot as ``|i> (x) |j>`` in the doubled Fock space.
With that convention

    L = H (x) 1 - 1 (x) H^T,      E = H (x) 1 + 1 (x) H^T

satisfy ``L vec(rho) = vec([H, rho])`` and ``E vec(rho) = vec({H, rho})``
for every ``rho``.  Column stacking is available with ``order="column"``,
where the Kronecker slots swap: ``L = 1 (x) H - H^T (x) 1``.  For real
symmetric ``H`` the transpose is invisible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from duronlab import ccr
from duronlab.fock import TruncatedOperator, ValidationError

ORDERS = ("row", "column")
_NP_ORDER = {"row": "C", "column": "F"}


@dataclass(frozen=True, eq=False)
class VecDensity:
    vector: np.ndarray
    n: int
    order: str = "row"

    def __post_init__(self):
        if self.order not in ORDERS:
            raise ValueError(f"order must be one of {ORDERS}")
        v = np.array(self.vector, dtype=complex).ravel()
        if v.shape[0] != self.n * self.n:
            raise ValueError(f"vector of length {v.shape[0]} does not match N={self.n}")
        v.setflags(write=False)
        object.__setattr__(self, "vector", v)

    def swap_conjugate(self) -> np.ndarray:
        """``v[(i,j)] -> conj(v[(j,i)])``; a fixed point iff the matrix is Hermitian."""
        m = self.vector.reshape(self.n, self.n)
        return m.T.conj().ravel()


def vectorize(rho, order: str = "row") -> VecDensity:
    m = np.asarray(rho.toarray() if isinstance(rho, TruncatedOperator) else rho, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("density must be a square matrix")
    return VecDensity(m.flatten(order=_NP_ORDER[order]), m.shape[0], order)


def devectorize(v: VecDensity) -> np.ndarray:
    return v.vector.reshape((v.n, v.n), order=_NP_ORDER[v.order])


def _super(h: TruncatedOperator, sign: int, order: str) -> TruncatedOperator:
    if h.space_tag != "single":
        raise ValueError("super-operators are built from single-space Hamiltonians")
    if not h.is_hermitian():
        raise ValidationError(f"Hamiltonian is not Hermitian (defect {h.hermiticity_defect():.3e})")
    hm = sp.csr_array(h.toarray())
    one = sp.identity(h.cutoff, format="csr", dtype=complex)
    if order == "row":
        m = sp.kron(hm, one) + sign * sp.kron(one, hm.T)
    elif order == "column":
        m = sp.kron(one, hm) + sign * sp.kron(hm.T, one)
    else:
        raise ValueError(f"order must be one of {ORDERS}")
    return TruncatedOperator(sp.csr_array(m), h.cutoff, "doubled")


def liouvillian(h: TruncatedOperator, order: str = "row") -> TruncatedOperator:
    """``L`` with ``L vec(rho) = vec(H rho - rho H)``."""
    return _super(h, -1, order)


def energy_superop(h: TruncatedOperator, order: str = "row") -> TruncatedOperator:
    """``E`` with ``E vec(rho) = vec(H rho + rho H)``."""
    return _super(h, +1, order)


def apply(op: TruncatedOperator, v: VecDensity) -> VecDensity:
    return VecDensity(op.matrix @ v.vector, v.n, v.order)


def vec_evolve(h: TruncatedOperator, v: VecDensity, t: float) -> VecDensity:
    """``exp(-i L t) vec(rho)``, diagonalised through ``H`` itself.

    The eigenvectors of ``L`` are ``vec(|i><j|)`` with eigenvalue
    ``E_i - E_j``, so this never diagonalises an ``N^2`` matrix.
    """
    w, u = h.eigh
    rho = devectorize(v)
    tilde = u.conj().T @ rho @ u
    tilde = tilde * np.exp(-1j * np.subtract.outer(w, w) * t)
    return vectorize(u @ tilde @ u.conj().T, v.order)


def vec_evolve_dense(h: TruncatedOperator, v: VecDensity, t: float, order: str | None = None) -> VecDensity:
    """Same flow by diagonalising the ``N^2 x N^2`` Liouvillian directly."""
    lv = liouvillian(h, order or v.order).toarray()
    w, u = np.linalg.eigh(lv)
    out = u @ (np.exp(-1j * w * t) * (u.conj().T @ v.vector))
    return VecDensity(out, v.n, v.order)


def spectrum(op: TruncatedOperator) -> np.ndarray:
    return np.sort(np.linalg.eigvalsh(op.toarray()))


def predicted_spectra(h: TruncatedOperator) -> tuple[np.ndarray, np.ndarray]:
    """Sorted multisets ``{E_i - E_j}`` and ``{E_i + E_j}``."""
    w = h.eigh[0]
    return np.sort(np.subtract.outer(w, w).ravel()), np.sort(np.add.outer(w, w).ravel())


@dataclass(frozen=True)
class AgeDuronReport:
    table: ccr.TableReport
    coproduct_consistent: bool
    trace_obstruction: str

    @property
    def passed(self) -> bool:
        return self.table.passed and self.coproduct_consistent

    def to_json(self) -> dict:
        return {
            "table": self.table.to_json(),
            "coproduct_consistent": self.coproduct_consistent,
            "trace_obstruction": self.trace_obstruction,
            "pass": self.passed,
        }


def age_duron_symbolic() -> AgeDuronReport:
    """Time/energy doubling table, checked symbolically only.

    ``T = t1 + t2`` and ``tau = t1 - t2`` are the plus/minus co-products of a
    single time generator whose second copy carries the reversed bracket.
    """
    table = ccr.verify_table("time-duron")
    alg, d, _, _ = ccr.preset("time-duron")
    t1, t2 = alg["t1"], alg["t2"]
    h1, h2 = alg["h1"], alg["h2"]
    consistent = (
        d["T"] + d["tau"] == t1 * 2
        and d["T"] - d["tau"] == t2 * 2
        and d["E"] + d["eps"] == h1 * 2
        and ccr.commutator(t1, h1) == -ccr.commutator(t2, h2)
    )
    note = (
        "no finite matrices satisfy [T, L] = i*1: tr[T, L] = 0 while tr(i*1) = i*N; "
        "the age operator is kept symbolic"
    )
    return AgeDuronReport(table, bool(consistent), note)


def trace_of_commutator(n: int, rng: np.random.Generator) -> complex:
    """``tr [A, B]`` for random ``n x n`` complex matrices (always ~0)."""
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    b = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return complex(np.trace(a @ b - b @ a))
