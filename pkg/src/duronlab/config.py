"""Flat ``key = value`` run configuration with schema checks."""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from pathlib import Path

SUITE_NAMES = ("algebra", "ccr", "bilocal-classical", "bilocal-quantum", "moyal", "superops", "thermofield")
FORMATS = ("json", "csv")
SEED_MAX = 2 ** 64 - 1


class ConfigError(ValueError):
    """Schema violation; ``path`` names the offending field, e.g. ``config.n``."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def _positive(path, v):
    if not v > 0:
        raise ConfigError(path, f"must be positive, got {v}")


def parse_sweep(text: str, path: str) -> tuple[float, float, int]:
    """``a:b:steps`` -> ``(a, b, steps)``."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(path, f"expected a:b:steps, got {text!r}")
    try:
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ConfigError(path, f"expected a:b:steps, got {text!r}") from None
    if n < 1:
        raise ConfigError(path, "steps must be >= 1")
    return a, b, n


def parse_tolerance(text: str, path: str):
    """``1e-6`` or ``lo:hi``."""
    try:
        if ":" in text:
            lo, hi = (float(v) for v in text.split(":"))
            if lo > hi:
                raise ConfigError(path, "range must have lo <= hi")
            return [lo, hi]
        v = float(text)
    except ValueError:
        raise ConfigError(path, f"not a tolerance: {text!r}") from None
    if v < 0:
        raise ConfigError(path, "tolerance must be non-negative")
    return v


@dataclass
class RunConfig:
    suites: tuple = SUITE_NAMES
    seed: int = 0
    n: int | None = None
    theta: float | None = None
    theta_sweep: str | None = None
    beta: float | None = None
    omega: float = 1.0
    h: float | None = None
    dx: float | None = None
    dt: float | None = None
    grid: str | None = None
    system: str | None = None
    tol: dict = field(default_factory=dict)
    format: str = "json"
    out: str | None = None
    timing: bool = False
    jobs: int = 1

    # not part of the report: they do not change any number
    _RUNTIME_ONLY = ("out", "timing", "jobs", "format")

    def validate(self) -> "RunConfig":
        for s in self.suites:
            if s not in SUITE_NAMES:
                raise ConfigError("config.suites", f"unknown suite {s!r}; choose from {', '.join(SUITE_NAMES)}")
        if not 0 <= self.seed <= SEED_MAX:
            raise ConfigError("config.seed", "must be a 64-bit unsigned integer")
        if self.n is not None and self.n < 4:
            raise ConfigError("config.n", f"cutoff must be >= 4, got {self.n}")
        for name in ("beta", "omega", "h", "dx", "dt"):
            v = getattr(self, name)
            if v is not None:
                _positive(f"config.{name}", v)
        if self.theta_sweep is not None:
            parse_sweep(self.theta_sweep, "config.theta_sweep")
        if self.grid is not None:
            parse_sweep(self.grid, "config.grid")
        if self.format not in FORMATS:
            raise ConfigError("config.format", f"must be one of {', '.join(FORMATS)}")
        if self.jobs < 1:
            raise ConfigError("config.jobs", "must be >= 1")
        return self

    def report_dict(self) -> dict:
        """Settings that affect results, in a fixed order."""
        out = {}
        for f in fields(self):
            if f.name in self._RUNTIME_ONLY:
                continue
            v = getattr(self, f.name)
            if f.name == "suites":
                v = list(v)
            if f.name == "tol":
                v = {k: self.tol[k] for k in sorted(self.tol)}
            out[f.name] = v
        return out


_CASTS = {
    "seed": int, "n": int, "jobs": int,
    "theta": float, "beta": float, "omega": float, "h": float, "dx": float, "dt": float,
    "theta_sweep": str, "grid": str, "system": str, "format": str, "out": str,
}


def _bool(text: str, path: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(path, f"not a boolean: {text!r}")


def coerce(key: str, text: str, path: str | None = None):
    path = path or f"config.{key}"
    if key == "suites":
        return tuple(s.strip() for s in text.split(",") if s.strip())
    if key == "timing":
        return _bool(text, path)
    if key.startswith("tol."):
        return parse_tolerance(text, path)
    cast = _CASTS.get(key)
    if cast is None:
        raise ConfigError(path, "unknown key")
    try:
        return cast(text.strip())
    except ValueError:
        raise ConfigError(path, f"expected {cast.__name__}, got {text!r}") from None


def parse_config_text(text: str) -> dict:
    """Lines of ``key = value``; ``#`` starts a comment.  Tolerances use ``tol.<check> = value``."""
    out: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config:{lineno}", f"expected key = value, got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key] = coerce(key, value)
    return out


def load_config(path) -> dict:
    return parse_config_text(Path(path).read_text())


def build_config(file_values: dict, overrides: dict) -> RunConfig:
    """Merge file values with overrides (overrides win) and validate."""
    merged = dict(file_values)
    merged.update({k: v for k, v in overrides.items() if v is not None})
    tol = {}
    kwargs = {}
    for key, v in merged.items():
        if key.startswith("tol."):
            tol[key[4:]] = v
        elif key == "tol":
            tol.update(v)
        else:
            kwargs[key] = v
    cfg = RunConfig(**kwargs, tol=tol)
    return cfg.validate()
