"""Acceptance suite: one test per numbered criterion.

The conftest hook prints a PASS/FAIL line per criterion at the end of the
run.  Run alone with ``pytest tests/test_acceptance.py``.
"""

import math

import numpy as np
import pytest

from lagfrac import convolution as C
from lagfrac import kernels as K
from lagfrac.expansion import (
    ALTERNATING,
    POWER,
    EClassFunction,
    MultiplierSequence,
    apply_L,
    corollary_rhs,
    eigenvalue,
    fractional_difference,
    fractional_difference_seq,
)
from lagfrac.harness import build_config
from lagfrac.harness.config import RegionError
from lagfrac.harness.runners import random_bump, run_bridge, run_lemma21, run_thm11, run_thm22_dilation, run_thm31
from lagfrac.quadrature import gauss_laguerre
from lagfrac.special import laguerre_table, psi_table


def acceptance(number, title):
    return pytest.mark.acceptance(number, title)


@acceptance(1, "orthonormality of l_k, k <= 64")
def test_orthonormality(record_property):
    worst = 0.0
    for alpha in (0.0, 0.5, 1.0, 2.5):
        rule = gauss_laguerre(80, alpha)
        x = rule.nodes
        # l_j l_k x^alpha = (poly) x^alpha e^{-x}; rule is exact up to degree 159
        vals = laguerre_table(64, alpha, x) * np.exp(0.5 * x)
        gram = (vals * rule.weights) @ vals.T
        worst = max(worst, float(np.max(np.abs(gram - np.eye(65)))))
    record_property("detail", f"max |G - I| = {worst:.2e}")
    assert worst <= 1e-10


@acceptance(2, "eigenrelation L l_k = (k+(alpha+1)/2) l_k")
def test_eigenrelation(record_property):
    worst = 0.0
    for alpha in (0.0, 1.0, 2.5):
        for k in range(21):
            f = EClassFunction.laguerre(k, alpha)
            target = eigenvalue(k, alpha) * f.poly_coeffs
            got = apply_L(f, alpha).poly_coeffs
            assert got.size == target.size
            worst = max(worst, float(np.max(np.abs(got - target) / np.abs(target))))
    record_property("detail", f"max coefficient relative residual = {worst:.2e}")
    assert worst <= 1e-12


@acceptance(3, "kernel bound |g_sigma(x)| x^(alpha+1-sigma), 9 pairs")
def test_kernel_bound(record_property):
    report = run_lemma21(build_config("lemma21", {}))
    worst_trunc = max(v["truncation_doubling"]["change"] for v in report.stability.values())
    worst_grid = max(v["grid_refinement_change"] for v in report.stability.values())
    worst_agree = max(v["abel_cesaro_deviation"] for v in report.stability.values())
    record_property("detail", f"sup ratio {report.sup_ratio:.4g}, truncation {worst_trunc:.1e}, "
                              f"grid {worst_grid:.1e}, Abel/Cesaro {worst_agree:.1e}")
    assert len(report.stability) == 9
    assert all(math.isfinite(r) for r in report.ratios)
    assert worst_trunc < 0.01 and worst_grid < 0.02 and worst_agree < 0.01
    assert report.passed


def _psi_coefficients(H, alpha, kmax, n=12):
    """Coefficients of H against psi_k, exact when H(sqrt u) e^{u/2} is a polynomial of degree < 2n - kmax."""
    rule = gauss_laguerre(n, alpha)
    t = np.sqrt(rule.nodes)
    vals = np.array([H(float(v)) for v in t])
    # int H psi_k t^{2alpha+1} dt = (1/2) int H psi_k u^alpha du with u = t^2
    return 0.5 * psi_table(kmax, alpha, t) @ (np.exp(rule.log_weights + rule.nodes) * vals)


@acceptance(4, "transform property of the twisted convolution")
def test_transform_property(record_property):
    worst = 0.0
    for alpha in (0.0, 1.0):
        rng = np.random.default_rng([4, int(alpha)])
        for _ in range(10):
            c, d = rng.uniform(-1, 1, 9), rng.uniform(-1, 1, 9)
            F = C.RadialFunction.psi_series(c, alpha)
            G = C.RadialFunction.laguerre_kernel_series(d, alpha)
            got = _psi_coefficients(lambda x: C.conv_twisted(F, G, x, alpha), alpha, 8)
            worst = max(worst, float(np.max(np.abs(got - c * d))))
    record_property("detail", f"max coefficient error {worst:.2e}")
    assert worst <= 1e-6


@acceptance(5, "bridge identity I_sigma f(x^2) = F x G_sigma(x)")
def test_bridge_identity(record_property):
    report = run_bridge(build_config("bridge", {"alpha": 0.0, "sigma": 0.5}))
    devs = report.stability["max_abs_deviation"]
    assert set(devs) == {"l_0", "l_2", "random_deg6"}
    record_property("detail", f"max deviation {report.sup_ratio:.2e}")
    assert report.sup_ratio <= 1e-5
    assert report.passed


@acceptance(6, "domination |F x G| <= |F| * |G|")
def test_domination(record_property):
    worst = -math.inf
    for alpha in (0.0, 1.0):
        rng = np.random.default_rng([6, int(alpha)])
        for _ in range(10):
            F = C.RadialFunction.bump(rng.uniform(0, 1, 3), rng.uniform(0.5, 2.0))
            G = C.RadialFunction.bump(rng.uniform(0, 1, 2), rng.uniform(0.5, 2.0))
            x = np.linspace(0.02, F.support + G.support, 50)
            tw = np.abs(C.conv_profile(F, G, x, alpha, twisted=True))
            eu = C.conv_profile(F.abs(), G.abs(), x, alpha)
            worst = max(worst, float(np.max(tw - eu)))
    record_property("detail", f"max(|FxG| - |F|*|G|) = {worst:.2e}")
    assert worst <= 1e-8


@acceptance(7, "dilation law of the power-kernel convolution")
def test_dilation_law(record_property):
    details = []
    for alpha, p, sigma in ((1.0, 2.0, 0.8), (0.0, 4 / 3, 0.5)):
        report = run_thm22_dilation(build_config("thm22", {"alpha": alpha, "p": p, "sigma": sigma}))
        st = report.stability
        details.append(f"({alpha:g},{p:.4g},{sigma:g}): spread {st['exact_exponent_spread']:.1e}, "
                       f"law {st['perturbed_law_max_deviation']:.1e}")
        assert st["exact_exponent_spread"] <= 1e-4
        assert st["perturbed_law_max_deviation"] <= 0.01
        assert report.passed
    record_property("detail", "; ".join(details))


@acceptance(8, "Hardy-type operator V_delta")
def test_hardy_operator(record_property):
    x = np.array([0.3, 1.0, 2.7])
    for alpha in (0.0, 1.0):
        for delta in (0.0, 0.3):
            for m in range(4):
                got = C.hardy_V(lambda y: y**m, x, delta, alpha)
                np.testing.assert_allclose(got, x**m / (m - 2 * delta + 2 * alpha + 2), rtol=1e-10)
    rng = np.random.default_rng(8)
    worst = 0.0
    grid = C.log_grid(1e-6, 1e4, 16)
    for i in range(50):
        alpha, delta, p = (0.0, 1.0)[i % 2], (0.0, 0.3)[(i // 2) % 2], (2.0, 3.0)[(i // 4) % 2]
        coeffs = rng.uniform(-1, 1, 3)
        coeffs[0] += 1.5
        f = C.RadialFunction.bump(coeffs, rng.uniform(0.5, 2.0))
        gamma = 2 * alpha + 1
        v = C.hardy_V(f, grid, delta, alpha)
        lhs = C.power_tail_norm(v, grid, p, gamma, tail_exponent=2 * (delta - alpha - 1))
        rhs = C.hardy_bound(alpha, delta, p) * C.compact_norm(f, p, gamma)
        worst = max(worst, lhs / rhs)
    record_property("detail", f"max ||V f|| / (bound ||f||) = {worst:.4f}")
    assert worst <= 1.0


@acceptance(9, "maximal function")
def test_maximal_function(record_property):
    one = C.RadialFunction.constant(1.0)
    dyadic = 2.0 ** np.arange(-6, 7)
    for alpha in (0.0, 1.0):
        for x in dyadic:
            assert C.maximal_fn(one, float(x), alpha).value == pytest.approx(1 / (2 * alpha + 2), rel=1e-12)
    rng = np.random.default_rng(9)
    grid = C.log_grid(1e-3, 1e3, 8)
    ratios = []
    for i in range(50):
        alpha = (0.0, 1.0)[i % 2]
        F = random_bump(rng)
        star = np.array([C.maximal_fn(F, float(v), alpha).value for v in grid])
        num = C.power_tail_norm(star, grid, 2.0, 2 * alpha + 1, tail_exponent=-(2 * alpha + 2))
        # Lebesgue points: F* >= |F|/(2alpha+2)
        ratios.append(num / C.compact_norm(F, 2.0, 2 * alpha + 1) * (2 * alpha + 2))
    ratios = np.array(ratios)
    record_property("detail", f"(2alpha+2) ||F*||_2/||F||_2 in [{ratios.min():.3f}, {ratios.max():.3f}]")
    assert np.all(np.isfinite(ratios))
    assert ratios.min() >= 0.99


THM11_TUPLES = (
    dict(alpha=0.0, p=4 / 3, sigma=0.5),
    dict(alpha=1.0, p=2.0, sigma=0.8, a=0.2, b=0.3),
    dict(alpha=2.5, p=3.0, sigma=0.7),
)
THM31_TUPLES = (
    dict(alpha=1.0, p=2.0, sigma=0.5, a=0.25, b=0.25),
    dict(alpha=0.0, p=2.0, sigma=0.4, a=0.1, b=0.1),
    dict(alpha=2.0, p=1.5, sigma=1.0, a=0.5, b=0.3),
)
VIOLATIONS = (
    (dict(alpha=1.0, p=2.0, sigma=1.2, a=1.0, b=0.2), "a < (alpha+1)/p'"),
    (dict(alpha=1.0, p=2.0, q=4.0, a=0.0, b=0.5), "b < (alpha+1)/q"),
    (dict(alpha=1.0, p=2.0, sigma=0.2, a=0.3, b=-0.5), "a+b >= 0"),
    (dict(alpha=1.0, p=2.0, sigma=-0.2), "0 < sigma < alpha+1"),
    (dict(alpha=1.0, p=2.0, sigma=2.5, a=1.0, b=1.0), "0 < sigma < alpha+1"),
)


@acceptance(10, "weighted fractional integral and power-kernel stability")
def test_weighted_stability(record_property):
    drifts = []
    for theorem, tuples, runner in (("thm11", THM11_TUPLES, run_thm11), ("thm31", THM31_TUPLES, run_thm31)):
        for values in tuples:
            report = runner(build_config(theorem, dict(values, samples=20)))
            assert math.isfinite(report.sup_ratio)
            assert report.passed, (theorem, values, report.stability)
            drifts.append(report)
        for values, constraint in VIOLATIONS:
            with pytest.raises(RegionError) as info:
                build_config(theorem, values)
            assert info.value.constraint == constraint
    record_property("detail", f"{len(drifts)} tuples PASS, {2 * len(VIOLATIONS)} violations rejected by name")


@acceptance(11, "Schur test integral")
def test_schur(record_property):
    inside = K.schur_integral(2.0, 1.0, 0.5, 0.25, 0.25)
    assert inside.finite and math.isfinite(inside.value) and inside.value > 0
    near = K.schur_integral(2.0, 1.0, 1.0, 0.99, 0.01)
    assert near.finite
    # a = (alpha+1)/p' and b = (alpha+1)/p for alpha = 1, p = q = 2
    assert K.schur_integral(2.0, 1.0, 1.0, 1.0, 0.0).divergent == ("near_zero",)
    assert K.schur_integral(2.0, 1.0, 1.0, 0.0, 1.0).divergent == ("near_infinity",)
    assert set(K.schur_integral(2.0, 1.0, 1.9, 1.0, 0.9).divergent) == {"near_zero"}
    record_property("detail", f"value {inside.value:.6g} at (1, 2, 0.5, 0.25, 0.25); both boundaries flagged")


def _iterated(vals, n):
    for _ in range(n):
        vals = vals[:-1] - vals[1:]
    return vals


@acceptance(12, "fractional differences and the multiplier condition")
def test_fractional_differences(record_property):
    for m in (MultiplierSequence(POWER, 0.5), MultiplierSequence(ALTERNATING, 0.7)):
        for n in range(1, 6):
            direct, _ = fractional_difference_seq(m, n, 40)
            np.testing.assert_allclose(direct, _iterated(m.values(np.arange(41 + n)), n), rtol=0, atol=1e-12)
    half = fractional_difference(MultiplierSequence(POWER, 0.0), 0, 0.5, J_max=10**6)
    assert abs(half.value) <= half.tail_bound
    m = MultiplierSequence(POWER, 0.5)
    a = corollary_rhs(m, 2, 0.5, 2**10)
    b = corollary_rhs(m, 2, 0.5, 2**11)
    change = abs(b.value - a.value) / a.value
    record_property("detail", f"constant-sequence residual {abs(half.value):.1e} <= {half.tail_bound:.1e}; "
                              f"rhs {b.value:.6g}, N_max doubling change {change:.1e}")
    assert math.isfinite(b.value) and change < 0.01
