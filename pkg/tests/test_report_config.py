import json

import numpy as np
import pytest

from duronlab import report, suites
from duronlab.config import ConfigError, build_config, parse_config_text, parse_sweep


def test_unknown_anchor_rejected():
    with pytest.raises(ValueError):
        report.Check("x", "no-such-anchor", 1, 1, True)


def test_check_helpers():
    assert report.check_le("a", "plumbing", 1e-7, 1e-6).passed
    assert not report.check_le("a", "plumbing", float("nan"), 1e-6).passed
    assert report.check_in("a", "plumbing", 4.0, 3.5, 4.5).tolerance == [3.5, 4.5]


def test_dumps_is_deterministic_and_valid_json():
    obj = {"b": 0.1, "a": [1, 2.5, np.float64(1 / 3)], "c": {"d": None, "e": True, "f": 1 + 2j},
           "g": np.array([0.5, 0.25])}
    text = report.dumps(obj)
    assert text == report.dumps(obj)
    back = json.loads(text)
    assert back["b"] == 0.1 and back["a"][2] == 1 / 3 and back["c"]["f"] == [1, 2]
    assert list(back) == ["b", "a", "c", "g"]
    assert "0.10000000000000001" in text


def test_tolerance_override():
    checks = [report.check_le("s.a", "plumbing", 1e-7, 1e-6), report.check_in("s.r", "plumbing", 4.2, 3.5, 4.5),
              report.check_true("s.t", "plumbing", True)]
    unused = report.apply_tolerances(checks, {"s.a": 1e-8, "s.r": [3.9, 4.1], "s.t": 1.0, "zzz": 1.0})
    assert unused == ["s.t", "zzz"]
    assert not checks[0].passed and not checks[1].passed and checks[2].passed


def test_build_report_summary():
    checks = [report.check_le("ok", "plumbing", 0, 1), report.check_le("bad", "plumbing", 2, 1)]
    rep = report.build_report({"seed": 1}, checks)
    assert rep["summary"] == {"passed": 1, "failed": 1, "failing": ["bad"], "runtime_ms": None}


def test_anchor_coverage():
    missing = report.anchor_coverage([report.check_true("x", "ritz-rule", True)])
    assert "ritz-rule" not in missing and "moyal-baker" in missing


def test_config_text_and_overrides():
    vals = parse_config_text("# comment\nn = 40\nseed=7\ntol.superops.spectra = 1e-8\ntiming = yes\n")
    cfg = build_config(vals, {"n": 50, "seed": None})
    assert cfg.n == 50 and cfg.seed == 7 and cfg.timing
    assert cfg.tol == {"superops.spectra": 1e-8}
    assert "out" not in cfg.report_dict()


@pytest.mark.parametrize("text, path", [
    ("n = 2", "config.n"),
    ("n = four", "config.n"),
    ("beta = 0", "config.beta"),
    ("format = xml", "config.format"),
    ("whatever = 1", "config.whatever"),
    ("seed = -1", "config.seed"),
    ("theta_sweep = 1:2", "config.theta_sweep"),
    ("suites = algebra,nope", "config.suites"),
    ("tol.x = -1", "config.tol.x"),
    ("just words", "config:1"),
])
def test_schema_errors_name_the_field(text, path):
    with pytest.raises(ConfigError) as err:
        build_config(parse_config_text(text), {})
    assert err.value.path == path


def test_parse_sweep():
    assert parse_sweep("0:1.2:7", "p") == (0.0, 1.2, 7)


def test_suite_streams_are_independent():
    a = suites.suite_rng(7, "algebra").random(3)
    b = suites.suite_rng(7, "moyal").random(3)
    assert not np.allclose(a, b)
    assert np.array_equal(a, suites.suite_rng(7, "algebra").random(3))
