import math

import numpy as np
import pytest
import scipy.special as sp
from hypothesis import given
from hypothesis import strategies as st

from lagfrac.errors import DomainError, IntegrationError
from lagfrac.quadrature import (
    composite,
    gauss_laguerre,
    geometric_breaks,
    half_line_split_rule,
    jacobi_panel,
    legendre_panel,
    mu_norm,
    nu_constant,
    theta_mass,
    theta_rule,
    weighted_integral,
    weighted_norm,
)
from lagfrac.special import laguerre_fn_l, psi_fn


def test_gauss_laguerre_examples():
    r = gauss_laguerre(20, 0.0)
    assert r.integrate(np.ones(20)) == pytest.approx(1.0, abs=1e-14)
    assert math.factorial(39) == pytest.approx(r.integrate(r.nodes**39), rel=1e-12)
    r = gauss_laguerre(20, 2.5)
    assert r.integrate(np.ones(20)) == pytest.approx(math.gamma(3.5), rel=1e-14)


@pytest.mark.parametrize("n, alpha", [(5, 0.0), (40, 1.5), (150, -0.5)])
def test_gauss_laguerre_matches_scipy(n, alpha):
    x, w = sp.roots_genlaguerre(n, alpha)
    r = gauss_laguerre(n, alpha)
    np.testing.assert_allclose(r.nodes, x, rtol=1e-12)
    big = w > 1e-200
    np.testing.assert_allclose(r.weights[big], w[big], rtol=1e-9)


def test_gauss_laguerre_large_n_weights_stay_finite():
    r = gauss_laguerre(400, 0.5)
    assert np.all(np.isfinite(r.log_weights))
    assert r.integrate(np.ones(400)) == pytest.approx(math.gamma(1.5), rel=1e-12)


@given(st.integers(0, 39), st.sampled_from([0.0, 0.5, 2.5]))
def test_gauss_laguerre_exactness(m, alpha):
    r = gauss_laguerre(20, alpha)
    ref = sp.gammaln(m + alpha + 1)
    val = r.integrate(r.nodes**m)
    assert math.log(val) == pytest.approx(ref, abs=1e-11)


@pytest.mark.parametrize("alpha", [0.0, 0.5, 1.0, 3.7])
def test_theta_mass_normalizes(alpha):
    r = theta_rule(12, alpha)
    assert nu_constant(alpha) * r.weights.sum() == pytest.approx(1.0, abs=1e-14)
    assert theta_mass(alpha) == pytest.approx(math.sqrt(math.pi) * math.gamma(alpha + 0.5) / math.gamma(alpha + 1))


def test_theta_rule_examples():
    r = theta_rule(10, 0.0)
    assert r.integrate(np.cos(r.nodes)) == pytest.approx(0.0, abs=1e-14)
    r = theta_rule(10, 1.0)
    assert r.weights.sum() == pytest.approx(math.pi / 2, rel=1e-14)


@given(st.integers(0, 19))
def test_theta_rule_exact_for_cosine_powers(m):
    alpha = 0.75
    r = theta_rule(10, alpha)
    # int cos^m sin^{2a}: zero for odd m, a Beta integral for even m
    ref = 0.0 if m % 2 else math.exp(sp.betaln((m + 1) / 2, alpha + 0.5))
    assert r.integrate(np.cos(r.nodes) ** m) == pytest.approx(ref, abs=1e-13)


def test_panels():
    x, w = legendre_panel(1.0, 3.0, 8)
    assert w @ x**5 == pytest.approx((3**6 - 1) / 6)
    x, w = jacobi_panel(0.0, 2.0, -0.5, 8)
    assert w @ x**3 == pytest.approx(2**3.5 / 3.5)
    b = geometric_breaks(0.0, 1.0, 0.5)
    assert b[0] == 0.0 and b[-1] == 1.0 and np.all(np.diff(b) > 0)
    r = composite(b, 8, left_power=-0.5)
    assert r.integrate(r.nodes**-0.5) == pytest.approx(2.0, rel=1e-12)


def test_half_line_split_rule():
    r = half_line_split_rule(-0.5)
    assert weighted_integral(lambda x: np.exp(-x), -0.5, r) == pytest.approx(math.sqrt(math.pi), rel=1e-10)


def test_weighted_norm_examples():
    for k in (0, 7, 64):
        assert weighted_norm(lambda x: laguerre_fn_l(k, 1.0, x), 2, 1.0) == pytest.approx(1.0, abs=1e-10)
    assert weighted_norm(lambda x: 0 * x, 3, 0.0) == 0.0
    assert weighted_norm(lambda x: np.exp(-x / 2), 1, 0.0) == pytest.approx(2.0, rel=1e-14)


def test_weighted_norm_scale_invariance():
    f = lambda x: (1 + x**2) * np.exp(-x / 2)
    a = weighted_norm(f, 3.0, 0.5)
    b = weighted_norm(f, 3.0, 0.5, scale=1.0, n=300)
    assert a == pytest.approx(b, rel=1e-10)


def test_mu_norm_examples():
    assert mu_norm(lambda t: psi_fn(3, 1.0, t), 2, 1.0) == pytest.approx(1.0, abs=1e-10)
    assert mu_norm(lambda t: np.ones_like(t), 1, 0.0, support=1.0) == pytest.approx(0.5)
    assert mu_norm(lambda t: np.exp(-t**2 / 2), 2, 0.0) == pytest.approx(1 / math.sqrt(2), rel=1e-12)


def test_errors():
    with pytest.raises(DomainError):
        gauss_laguerre(0)
    with pytest.raises(DomainError):
        theta_rule(4, -0.6)
    with pytest.raises(DomainError):
        weighted_norm(np.exp, 0.5, 0.0)
    with pytest.raises(DomainError):
        weighted_norm(np.exp, 2, -1.0)
    with pytest.raises(IntegrationError):
        weighted_integral(lambda x: np.full_like(x, np.nan), 0.0)
