"""Check rows, reports and a deterministic JSON writer."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

PLUMBING = "plumbing"

# Tags for every piece of the source theory the suites cover.  A verify-all
# report must mention each of them at least once.
ANCHORS = {
    "process-rules": "strength, direction, succession, associativity and coexistence rules",
    "kauffman-product": "iterant product and quaternions",
    "incidence-product": "incidence-algebra product of projectors",
    "ritz-rule": "Heisenberg transition algebra and the Ritz combination rule",
    "two-point-hj": "Hamilton-Jacobi pair for both end points",
    "midpoint-hj": "mean/difference form of the Hamilton-Jacobi pair",
    "legendre-limit": "Legendre transform, Liouville and energy limits",
    "bilocal-density": "two-time density operator",
    "quantum-liouville": "quantum Liouville equation",
    "energy-anticommutator": "anti-commutator energy equation",
    "quantum-hj": "polar form and quantum potential",
    "moyal-baker": "star product, Moyal and Baker brackets",
    "generalised-poisson": "doubled Poisson brackets",
    "bialgebra-commutators": "doubled phase-space commutators",
    "liouville-superop": "Liouville super-operator",
    "energy-superop": "energy super-operator",
    "duron-table": "age/duron bracket table",
    "coproducts": "plus/minus co-products and A, B operators",
    "bogoliubov-generator": "Bogoliubov generator and theta-vacuum",
    "thermal-wavefunction": "thermal wave function and Gibbs correspondence",
    "deformed-coproduct": "q-deformed co-products",
    "bogoliubov-transform": "Bogoliubov transformation and theta-translation",
}


@dataclass
class Check:
    name: str
    paper_anchor: str
    value: object
    tolerance: object
    passed: bool
    detail: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.paper_anchor != PLUMBING and self.paper_anchor not in ANCHORS:
            raise ValueError(f"unknown anchor {self.paper_anchor!r}")
        self.passed = bool(self.passed)

    def to_json(self) -> dict:
        out = {
            "name": self.name,
            "paper_anchor": self.paper_anchor,
            "value": self.value,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }
        if self.detail:
            out["detail"] = self.detail
        return out


def check_le(name: str, anchor: str, value: float, tol: float, **detail) -> Check:
    ok = value is not None and math.isfinite(value) and value <= tol
    return Check(name, anchor, value, tol, ok, detail)


def check_in(name: str, anchor: str, value: float, lo: float, hi: float, **detail) -> Check:
    ok = value is not None and lo <= value <= hi
    return Check(name, anchor, value, [lo, hi], ok, detail)


def check_true(name: str, anchor: str, ok: bool, value=None, **detail) -> Check:
    return Check(name, anchor, ok if value is None else value, None, ok, detail)


def _matches(name: str, key: str) -> bool:
    return name == key or name.startswith(key + ".") or name.startswith(key + "[")


def apply_tolerances(checks, overrides: dict) -> list[str]:
    """Re-judge checks against overridden tolerances; return keys that matched nothing.

    A key selects a check by exact name or by dotted/indexed prefix.  Scalar
    tolerances mean ``value <= tol``; ``[lo, hi]`` means ``lo <= value <= hi``.
    Checks without a numeric tolerance (exact ones) cannot be overridden.
    """
    unused = []
    for key, tol in overrides.items():
        hit = False
        for c in checks:
            if not _matches(c.name, key) or c.tolerance is None:
                continue
            hit = True
            c.tolerance = tol
            if isinstance(tol, list):
                vals = c.value if isinstance(c.value, list) else [c.value]
                c.passed = all(v is not None and tol[0] <= v <= tol[1] for v in vals)
            else:
                v = c.value
                c.passed = v is not None and not isinstance(v, list) and math.isfinite(v) and v <= tol
        if not hit:
            unused.append(key)
    return unused


def anchor_coverage(checks) -> list[str]:
    """Anchors never mentioned by any check."""
    seen = {c.paper_anchor for c in checks}
    return sorted(set(ANCHORS) - seen)


def build_report(config: dict, checks: list, runtime_ms=None) -> dict:
    failed = [c for c in checks if not c.passed]
    return {
        "config": config,
        "checks": [c.to_json() for c in checks],
        "summary": {
            "passed": len(checks) - len(failed),
            "failed": len(failed),
            "failing": [c.name for c in failed],
            "runtime_ms": runtime_ms,
        },
    }


# -- deterministic JSON ----------------------------------------------------------

def _fmt_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return "null"
    if x == 0:
        return "0.0"
    return format(x, ".17g")


def _scalar(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return _fmt_float(v)
    if isinstance(v, complex):
        return "[" + _fmt_float(v.real) + ", " + _fmt_float(v.imag) + "]"
    if hasattr(v, "item"):  # numpy scalar
        return _scalar(v.item())
    return json.dumps(str(v))


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with every float printed to 17 significant digits.

    Key order is preserved, so equal inputs give byte-identical output.
    """
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(_scalar(v) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _level + 1) for v in obj) + "\n" + end + "]"
    if hasattr(obj, "tolist"):
        return dumps(obj.tolist(), indent, _level)
    return _scalar(obj)
