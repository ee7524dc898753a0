import json
import math

import numpy as np
import pytest

from lagfrac.errors import ConfigError
from lagfrac.harness import RegionError, build_config, read_config_file, run
from lagfrac.harness.config import ExperimentConfig, parse_number
from lagfrac.harness.output import csv_text, fmt, svg_lines
from lagfrac.harness.report import VerificationReport
from lagfrac.harness.runners import dilation_exponent


def test_thm11_solves_q():
    cfg = build_config("thm11", dict(alpha=0.0, p=4 / 3, sigma=0.5))
    assert cfg.q == pytest.approx(4.0)
    assert cfg.solved == "q"


def test_thm22_solves_q():
    cfg = build_config("thm22", dict(alpha=1.0, p=2.0, sigma=0.8))
    assert cfg.q == pytest.approx(10.0)


def test_solves_sigma_and_checks_consistency():
    cfg = build_config("thm11", dict(alpha=1.0, p=2.0, q=4.0, sigma=None))
    assert cfg.solved == "sigma" and cfg.sigma == pytest.approx(0.5)
    with pytest.raises(RegionError, match="1/q = 1/p"):
        build_config("thm11", dict(alpha=1.0, p=2.0, q=4.0, sigma=0.7))


@pytest.mark.parametrize("theorem, values, constraint", [
    ("thm11", dict(alpha=0.0, p=2.0, sigma=0.5, a=0.5), "a < (alpha+1)/p'"),
    ("thm11", dict(alpha=0.0, p=2.0, sigma=0.6, a=0.1, b=0.5), "b < (alpha+1)/q"),
    ("thm11", dict(alpha=1.0, p=2.0, sigma=0.2, a=0.3, b=-0.5), "a+b >= 0"),
    ("thm11", dict(alpha=1.0, p=2.0, sigma=-0.2), "0 < sigma < alpha+1"),
    ("thm11", dict(alpha=1.0, p=2.0, sigma=2.5, a=1.0, b=1.0), "0 < sigma < alpha+1"),
    ("thm11", dict(alpha=-0.2, p=2.0, sigma=0.5), "alpha >= 0"),
    ("thm11", dict(alpha=1.0, p=1.0, sigma=0.5), "1 < p"),
    ("thm11", dict(alpha=0.0, p=2.0, sigma=0.6), "q < inf"),
    ("thm11", dict(alpha=1.0, p=2.0, q=1.5, sigma=None), "1 < p <= q < inf"),
    ("thm22", dict(alpha=-0.6, p=2.0, sigma=0.2), "alpha > -1/2"),
    ("thm22", dict(alpha=1.0, p=2.0, sigma=0.8, a=0.1), "a = b = 0"),
    ("thm31", dict(alpha=1.0, p=2.0, sigma=0.2, a=0.3, b=-0.5), "a+b >= 0"),
    ("thm31", dict(alpha=1.0, p=2.0, sigma=1.5, a=0.5, b=1.0), "b < (alpha+1)/q"),
    ("lemma21", dict(alpha=1.0, sigma=2.5), "0 < sigma < alpha+1"),
])
def test_region_rejections_name_the_constraint(theorem, values, constraint):
    with pytest.raises(RegionError) as info:
        build_config(theorem, values)
    assert info.value.constraint == constraint
    assert constraint in str(info.value)


def test_exploratory_flag():
    cfg = build_config("thm31", dict(alpha=-0.25, p=2.0, sigma=0.3, a=0.0, b=0.0))
    assert cfg.exploratory
    assert not build_config("thm31", {}).exploratory


def test_misc_config_errors():
    with pytest.raises(ConfigError):
        ExperimentConfig("nope").validated()
    with pytest.raises(ConfigError):
        build_config("thm11", dict(samples=0))
    with pytest.raises(ConfigError):
        build_config("corollary12", dict(sequence="odd"))
    with pytest.raises(ConfigError):
        parse_number("x/2")
    assert parse_number("4/3") == pytest.approx(4 / 3)


def test_config_file(tmp_path):
    path = tmp_path / "cfg.txt"
    path.write_text("# comment\nalpha = 1\np=4/3  # inline\n\nsigma=0.5\n")
    assert read_config_file(path) == {"alpha": "1", "p": "4/3", "sigma": "0.5"}
    path.write_text("nonsense\n")
    with pytest.raises(ConfigError, match="key=value"):
        read_config_file(path)
    path.write_text("colour=red\n")
    with pytest.raises(ConfigError, match="unknown key"):
        read_config_file(path)
    with pytest.raises(ConfigError):
        read_config_file(tmp_path / "missing.txt")


def test_fmt_and_csv():
    assert fmt(0.1) == "0.10000000000000001"
    assert fmt(3) == "3" and fmt(True) == "1" and fmt("a") == "a"
    text = csv_text(["x", "y"], [[1.0, 2.0], [3, 4]])
    assert text == "x,y\n1,3\n2,4\n"
    with pytest.raises(ValueError):
        csv_text(["x", "y"], [[1.0], [1.0, 2.0]])


def test_svg_is_plain_text():
    x = np.geomspace(1e-3, 10, 20)
    svg = svg_lines({"a<b": (x, x**0.5), "empty": (x[:0], x[:0])}, title="t & u")
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")
    assert "a&lt;b" in svg and "t &amp; u" in svg
    assert svg == svg_lines({"a<b": (x, x**0.5), "empty": (x[:0], x[:0])}, title="t & u")


def test_report_json_is_clean():
    r = VerificationReport("e", {"p": 2.0}, [1.0], math.inf, {"i": np.int64(3)}, np.float64(1.5),
                           {"arr": np.array([1.0, np.nan])}, np.bool_(True))
    d = r.to_json()
    assert d["sup_ratio"] == "inf" and d["attaining"] == {"i": 3} and d["stability"]["arr"] == [1.0, "nan"]
    assert d["pass"] is True
    assert set(d) >= {"config", "sup_ratio", "attaining", "stability", "pass", "seconds"}
    json.dumps(d, allow_nan=False)


def test_dilation_exponent_sign():
    # at the exact exponent the law is flat
    alpha, p, sigma = 1.0, 2.0, 0.8
    q = 1 / (1 / p - sigma / (alpha + 1))
    assert dilation_exponent(alpha, p, q, sigma) == pytest.approx(0.0, abs=1e-14)


def test_run_thm11_small_is_deterministic():
    cfg = build_config("thm11", dict(samples=20))
    a, b = run(cfg), run(cfg)
    assert a.passed and a.ratios == b.ratios
    assert "quadrature_doubling" in a.stability
    assert set(a.stability["degree_sweep_max"]) == {"4", "8", "16", "32"}


def test_run_thm11_single_mode():
    # R(l_k) = (k+1)^{-sigma} ||l_k||_q / ||l_k||_p with a = b = 0
    from lagfrac.expansion import LaguerreSeries
    from lagfrac.harness.runners import _thm11_ratio
    from lagfrac.quadrature import weighted_norm
    from lagfrac.special import laguerre_fn_l

    cfg = build_config("thm11", dict(alpha=1.0, p=2.0, sigma=0.5))
    k = 3
    got = _thm11_ratio(LaguerreSeries(1.0, np.eye(k + 1)[k]), cfg, 200)
    lk = lambda x: laguerre_fn_l(k, 1.0, x)
    ref = (k + 1) ** -0.5 * weighted_norm(lk, cfg.q, 1.0) / weighted_norm(lk, 2.0, 1.0)
    assert got == pytest.approx(ref, rel=1e-12)


def test_run_corollary_and_remark():
    r = run(build_config("corollary12", {}))
    assert r.passed and "nmax_doubling" in r.stability
    alt = run(build_config("corollary12", dict(sequence="alternating")))
    # (k+1)^{s+sigma} Delta^2 of an alternating sequence grows like k^s: the block sums diverge
    assert not alt.passed and alt.stability["nmax_doubling"]["change"] > 1
    r = run(build_config("remark3", {}))
    assert r.passed and math.isfinite(r.sup_ratio)


def test_run_bridge():
    r = run(build_config("bridge", {}))
    assert r.passed and r.sup_ratio <= 1e-5
    assert r.stability["theta_doubling_max_change"] <= 1e-8
