"""Truncated Fock-space linear algebra.

Single-mode operators are dense ``N x N`` arrays.  Doubled-space operators
(``N^2 x N^2``) are kept in CSR form because the thermofield checks run at
``N = 60`` where a dense doubled matrix costs ~200 MB; :meth:`toarray`
gives the dense view whenever one is needed.

Kronecker index convention: the doubled basis state ``|i> (x) |j>`` sits at
row ``i * N + j``.  Every module relies on this.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

SPACES = ("single", "doubled")
HERMITIAN_TOL = 1e-10


class DimensionError(ValueError):
    pass


class ValidationError(ValueError):
    pass


class NumericalError(ArithmeticError):
    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (achieved residual {residual:.3e})")
        self.residual = residual


def _dense(m):
    return m.toarray() if sp.issparse(m) else np.asarray(m)


@dataclass(frozen=True, eq=False)
class TruncatedOperator:
    matrix: object
    cutoff: int
    space_tag: str = "single"

    def __post_init__(self):
        if self.space_tag not in SPACES:
            raise ValueError(f"space_tag must be one of {SPACES}")
        m = self.matrix
        m = sp.csr_array(m, dtype=complex) if sp.issparse(m) else np.asarray(m, dtype=complex)
        dim = self.cutoff if self.space_tag == "single" else self.cutoff ** 2
        if m.shape != (dim, dim):
            raise DimensionError(f"{self.space_tag} operator at cutoff {self.cutoff} must be {dim}x{dim}, got {m.shape}")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.matrix)

    def toarray(self) -> np.ndarray:
        return _dense(self.matrix)

    def _same(self, other: "TruncatedOperator"):
        if not isinstance(other, TruncatedOperator):
            raise TypeError(f"expected TruncatedOperator, got {type(other).__name__}")
        if other.cutoff != self.cutoff or other.space_tag != self.space_tag:
            raise DimensionError(
                f"operator mismatch: cutoff {self.cutoff}/{other.cutoff}, space {self.space_tag}/{other.space_tag}"
            )

    def _wrap(self, m) -> "TruncatedOperator":
        return TruncatedOperator(m, self.cutoff, self.space_tag)

    def __add__(self, other):
        self._same(other)
        return self._wrap(self.matrix + other.matrix)

    def __sub__(self, other):
        self._same(other)
        return self._wrap(self.matrix - other.matrix)

    def __neg__(self):
        return self._wrap(-self.matrix)

    def __mul__(self, k):
        if isinstance(k, TruncatedOperator):
            return NotImplemented
        return self._wrap(self.matrix * complex(k))

    __rmul__ = __mul__

    def __truediv__(self, k):
        return self._wrap(self.matrix / complex(k))

    def __matmul__(self, other):
        if isinstance(other, StateVector):
            if other.dim != self.dim:
                raise DimensionError(f"state of length {other.dim} vs operator of dim {self.dim}")
            return StateVector(self.matrix @ other.amplitudes)
        self._same(other)
        return self._wrap(self.matrix @ other.matrix)

    def dagger(self) -> "TruncatedOperator":
        return self._wrap(self.matrix.conj().T)

    def hermiticity_defect(self) -> float:
        d = self.matrix - self.matrix.conj().T
        return float(abs(d).max()) if d.size else 0.0

    def is_hermitian(self, tol: float = HERMITIAN_TOL) -> bool:
        return self.hermiticity_defect() <= tol

    def interior(self, levels: int | None = None) -> np.ndarray:
        """Dense block on occupation numbers ``<= levels`` (default ``N // 2``)."""
        idx = interior_indices(self.cutoff, self.space_tag, levels)
        m = self.matrix[idx][:, idx]
        return _dense(m)

    @cached_property
    def eigh(self):
        """Eigen-decomposition of a Hermitian operator (cached; values are immutable)."""
        if not self.is_hermitian():
            raise ValidationError(f"operator is not Hermitian (defect {self.hermiticity_defect():.3e})")
        h = self.toarray()
        return np.linalg.eigh((h + h.conj().T) / 2)

    def __repr__(self):
        return f"TruncatedOperator(cutoff={self.cutoff}, space={self.space_tag}, sparse={self.is_sparse})"


def commutator(a: TruncatedOperator, b: TruncatedOperator) -> TruncatedOperator:
    return a @ b - b @ a


def anticommutator(a: TruncatedOperator, b: TruncatedOperator) -> TruncatedOperator:
    return a @ b + b @ a


def interior_indices(cutoff: int, space_tag: str = "single", levels: int | None = None) -> np.ndarray:
    k = cutoff // 2 if levels is None else levels
    n = np.arange(cutoff)
    if space_tag == "single":
        return n[n <= k]
    n1, n2 = np.divmod(np.arange(cutoff * cutoff), cutoff)
    return np.flatnonzero((n1 <= k) & (n2 <= k))


@dataclass(frozen=True, eq=False)
class StateVector:
    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.array(self.amplitudes, dtype=complex).ravel()
        amp.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)

    @cached_property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def normalized(self) -> "StateVector":
        if self.norm == 0:
            raise ValueError("cannot normalise the zero vector")
        return StateVector(self.amplitudes / self.norm)

    def inner(self, other: "StateVector") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def __add__(self, other):
        return StateVector(self.amplitudes + other.amplitudes)

    def __sub__(self, other):
        return StateVector(self.amplitudes - other.amplitudes)

    def __mul__(self, k):
        return StateVector(self.amplitudes * complex(k))

    __rmul__ = __mul__

    def outer(self, other: "StateVector") -> np.ndarray:
        """``|self><other|``."""
        return np.outer(self.amplitudes, other.amplitudes.conj())

    def __repr__(self):
        return f"StateVector(dim={self.dim}, norm={self.norm:.12g})"


# -- constructors -----------------------------------------------------------

def _check_cutoff(n: int):
    if n < 2:
        raise DimensionError(f"cutoff must be >= 2, got {n}")


def annihilation(n: int) -> TruncatedOperator:
    _check_cutoff(n)
    return TruncatedOperator(np.diag(np.sqrt(np.arange(1, n, dtype=float)), 1), n)


def creation(n: int) -> TruncatedOperator:
    return annihilation(n).dagger()


def number(n: int) -> TruncatedOperator:
    _check_cutoff(n)
    return TruncatedOperator(np.diag(np.arange(n, dtype=float)), n)


def identity(n: int, space_tag: str = "single") -> TruncatedOperator:
    dim = n if space_tag == "single" else n * n
    m = np.eye(dim) if space_tag == "single" else sp.identity(dim, format="csr", dtype=complex)
    return TruncatedOperator(m, n, space_tag)


def oscillator_hamiltonian(n: int, omega: float = 1.0) -> TruncatedOperator:
    if omega <= 0:
        raise ValueError("omega must be positive")
    _check_cutoff(n)
    return TruncatedOperator(np.diag(omega * (np.arange(n) + 0.5)), n)


def basis(n: int, k: int) -> StateVector:
    v = np.zeros(n, dtype=complex)
    v[k] = 1
    return StateVector(v)


def doubled_basis(n: int, k1: int, k2: int) -> StateVector:
    v = np.zeros(n * n, dtype=complex)
    v[k1 * n + k2] = 1
    return StateVector(v)


def tensor(a: TruncatedOperator, b: TruncatedOperator) -> TruncatedOperator:
    if a.space_tag != "single" or b.space_tag != "single":
        raise DimensionError("tensor takes two single-space operators")
    if a.cutoff != b.cutoff:
        raise DimensionError(f"cutoff mismatch {a.cutoff} vs {b.cutoff}")
    m = sp.kron(sp.csr_array(a.matrix), sp.csr_array(b.matrix), format="csr")
    return TruncatedOperator(m, a.cutoff, "doubled")


def lift_left(a: TruncatedOperator) -> TruncatedOperator:
    return tensor(a, identity(a.cutoff))


def lift_right(a: TruncatedOperator) -> TruncatedOperator:
    return tensor(identity(a.cutoff), a)


# -- exponentials and evolution ---------------------------------------------

def _blocks(m) -> list[np.ndarray]:
    """Index sets of the connected components of the sparsity pattern."""
    pattern = sp.csr_array(abs(sp.csr_array(m)) > 0)
    ncomp, labels = connected_components(pattern, directed=False)
    if ncomp == 1:
        return [np.arange(m.shape[0])]
    order = np.argsort(labels, kind="stable")
    splits = np.flatnonzero(np.diff(labels[order])) + 1
    return np.split(order, splits)


def _block_exp(block: np.ndarray, sign: int):
    """exp(sign * block) for one dense block, plus its residual against exp(-sign*block)."""
    herm = np.abs(block - block.conj().T).max(initial=0.0)
    anti = np.abs(block + block.conj().T).max(initial=0.0)
    scale = max(np.abs(block).max(initial=0.0), 1.0)
    if herm <= 1e-13 * scale:
        w, v = np.linalg.eigh((block + block.conj().T) / 2)
        fwd = (v * np.exp(sign * w)) @ v.conj().T
        bwd = (v * np.exp(-sign * w)) @ v.conj().T
    elif anti <= 1e-13 * scale:
        h = -1j * block
        w, v = np.linalg.eigh((h + h.conj().T) / 2)
        fwd = (v * np.exp(sign * 1j * w)) @ v.conj().T
        bwd = (v * np.exp(-sign * 1j * w)) @ v.conj().T
    else:
        fwd = _taylor_expm(sign * block)
        bwd = _taylor_expm(-sign * block)
    resid = np.abs(fwd @ bwd - np.eye(block.shape[0])).max(initial=0.0)
    return fwd, resid


def _taylor_expm(a: np.ndarray) -> np.ndarray:
    """Scaling-and-squaring Taylor series for general square matrices."""
    norm = np.abs(a).sum(axis=1).max(initial=0.0)
    squarings = max(0, int(math.ceil(math.log2(norm))) + 1) if norm > 0.5 else 0
    x = a / (2 ** squarings)
    out = np.eye(a.shape[0], dtype=complex)
    term = np.eye(a.shape[0], dtype=complex)
    for k in range(1, 40):
        term = term @ x / k
        out = out + term
        if np.abs(term).max(initial=0.0) < 1e-18:
            break
    for _ in range(squarings):
        out = out @ out
    return out


def expm(a: TruncatedOperator, tol: float = 1e-10) -> TruncatedOperator:
    """Matrix exponential with ``||expm(A) expm(-A) - I||_max <= tol``.

    Hermitian and anti-Hermitian inputs go through eigendecomposition, block
    by block when the sparsity pattern splits into components; anything else
    uses a Taylor series.  Raises :class:`NumericalError` when the achieved
    residual exceeds ``tol``.
    """
    m = a.matrix
    blocks = _blocks(m)
    worst = 0.0
    if len(blocks) == 1:
        out, worst = _block_exp(_dense(m), +1)
        result = sp.csr_array(out) if a.is_sparse else out
    else:
        csr = sp.csr_array(m)
        rows, cols, vals = [], [], []
        for idx in blocks:
            sub = csr[idx][:, idx].toarray()
            out, resid = _block_exp(sub, +1)
            worst = max(worst, resid)
            r, c = np.meshgrid(idx, idx, indexing="ij")
            rows.append(r.ravel())
            cols.append(c.ravel())
            vals.append(out.ravel())
        result = sp.csr_array(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=m.shape
        )
        if not a.is_sparse:
            result = result.toarray()
    if worst > tol:
        raise NumericalError("matrix exponential did not reach the requested tolerance", worst)
    return TruncatedOperator(result, a.cutoff, a.space_tag)


def expm_rows(a: TruncatedOperator, rows, tol: float = 1e-10) -> sp.csr_array:
    """Selected rows of ``expm(A)`` as a sparse ``len(rows) x dim`` matrix.

    Only the sparsity components that contain a requested row are
    exponentiated, which keeps padded-cutoff conjugations cheap.
    """
    rows = np.asarray(rows)
    where = {int(r): k for k, r in enumerate(rows)}
    csr = sp.csr_array(a.matrix)
    out_r, out_c, out_v = [], [], []
    worst = 0.0
    for idx in _blocks(csr):
        hit = [i for i, g in enumerate(idx) if int(g) in where]
        if not hit:
            continue
        block, resid = _block_exp(csr[idx][:, idx].toarray(), +1)
        worst = max(worst, resid)
        for i in hit:
            out_r.append(np.full(len(idx), where[int(idx[i])]))
            out_c.append(idx)
            out_v.append(block[i])
    if worst > tol:
        raise NumericalError("matrix exponential did not reach the requested tolerance", worst)
    if not out_r:
        return sp.csr_array((len(rows), a.dim), dtype=complex)
    return sp.csr_array(
        (np.concatenate(out_v), (np.concatenate(out_r), np.concatenate(out_c))), shape=(len(rows), a.dim)
    )


def evolve(psi0: StateVector, h: TruncatedOperator, t: float) -> StateVector:
    """``exp(-i H t) psi0`` through the eigenbasis of ``H``."""
    w, v = h.eigh
    if psi0.dim != v.shape[0]:
        raise DimensionError(f"state of length {psi0.dim} vs Hamiltonian of dim {v.shape[0]}")
    return StateVector(v @ (np.exp(-1j * w * t) * (v.conj().T @ psi0.amplitudes)))


def expectation(psi: StateVector, a: TruncatedOperator) -> complex:
    return complex(np.vdot(psi.amplitudes, a.matrix @ psi.amplitudes))


# -- serialisation ----------------------------------------------------------

def _pairs(arr: np.ndarray):
    if arr.ndim == 1:
        return [[float(z.real), float(z.imag)] for z in arr]
    return [_pairs(row) for row in arr]


def to_json(obj) -> str:
    """Nested ``[re, im]`` arrays plus shape metadata."""
    if isinstance(obj, TruncatedOperator):
        arr = obj.toarray()
        meta = {"kind": "operator", "cutoff": obj.cutoff, "space_tag": obj.space_tag}
    elif isinstance(obj, StateVector):
        arr = obj.amplitudes
        meta = {"kind": "state"}
    else:
        arr = np.asarray(obj, dtype=complex)
        meta = {"kind": "array"}
    meta["shape"] = list(arr.shape)
    meta["data"] = _pairs(arr)
    return json.dumps(meta)


def from_json(text: str):
    obj = json.loads(text)
    data = np.asarray(obj["data"], dtype=float)
    arr = (data[..., 0] + 1j * data[..., 1]).reshape(obj["shape"])
    if obj["kind"] == "operator":
        return TruncatedOperator(arr, obj["cutoff"], obj["space_tag"])
    if obj["kind"] == "state":
        return StateVector(arr)
    return arr


def to_csv(obj) -> str:
    """Flattened row-major ``index,re,im`` rows under a ``# shape=...`` header."""
    arr = obj.toarray() if isinstance(obj, TruncatedOperator) else (
        obj.amplitudes if isinstance(obj, StateVector) else np.asarray(obj, dtype=complex))
    buf = io.StringIO()
    buf.write(f"# shape={'x'.join(str(s) for s in arr.shape)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", "re", "im"])
    for k, z in enumerate(arr.ravel()):
        w.writerow([k, repr(float(z.real)), repr(float(z.imag))])
    return buf.getvalue()


def from_csv(text: str) -> np.ndarray:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("# shape="):
        raise ValueError("missing '# shape=' header")
    shape = tuple(int(s) for s in lines[0][len("# shape="):].split("x"))
    rows = list(csv.DictReader(lines[1:]))
    flat = np.array([float(r["re"]) + 1j * float(r["im"]) for r in rows])
    return flat.reshape(shape)
