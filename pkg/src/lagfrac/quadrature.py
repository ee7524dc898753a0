"""Quadrature rules on the half line and on (0, pi), plus weighted norms.

Two rule families carry a weight:

* ``half_line_gamma_weight``: nodes/weights for int_0^inf g(x) x^alpha e^{-x} dx
* ``theta_jacobi_weight``: nodes/weights for int_0^pi g(theta) sin^{2alpha}(theta) dtheta

A third, ``plain``, integrates against dx on whatever domain its nodes
cover; composite and graded rules are returned in that form.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import special as sp
from scipy.linalg import eigh_tridiagonal

from .errors import ConstructionError, DomainError, IntegrationError
from .special import _normalized_table

HALF_LINE = "half_line_gamma_weight"
THETA = "theta_jacobi_weight"
PLAIN = "plain"


@dataclass(frozen=True)
class QuadratureRule:
    kind: str
    alpha: float
    nodes: np.ndarray
    weights: np.ndarray
    exactness_degree: int
    log_weights: np.ndarray | None = field(default=None, repr=False)

    def __len__(self):
        return self.nodes.size

    def integrate(self, values):
        """Sum of weights * values (values sampled at the nodes)."""
        return float(np.dot(self.weights, values))

    def to_csv(self):
        buf = io.StringIO()
        buf.write("node,weight\n")
        for x, w in zip(self.nodes, self.weights):
            buf.write(f"{x:.17g},{w:.17g}\n")
        return buf.getvalue()


def _laguerre_newton(nodes, n, alpha, iterations=3):
    for _ in range(iterations):
        tab = _normalized_table(n, alpha, nodes)
        pn, pm = tab[n], tab[n - 1]
        denom = n * pn - math.sqrt(n * (n + alpha)) * pm
        step = nodes * pn / denom
        nodes = nodes - step
    return nodes


@lru_cache(maxsize=64)
def _gauss_laguerre_cached(n, alpha):
    k = np.arange(n, dtype=float)
    diag = 2 * k + alpha + 1
    off = np.sqrt(k[1:] * (k[1:] + alpha))
    try:
        nodes = eigh_tridiagonal(diag, off, eigvals_only=True)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise ConstructionError(f"Jacobi eigensolve failed for n={n}, alpha={alpha}: {exc}") from exc
    nodes = _laguerre_newton(np.sort(nodes), n, alpha)
    if np.any(~np.isfinite(nodes)) or np.any(nodes <= 0) or np.any(np.diff(nodes) <= 0):
        raise ConstructionError(f"Newton refinement diverged for n={n}, alpha={alpha}")
    # Christoffel numbers: w_i = 1 / sum_k p_k(x_i)^2 with p_k orthonormal
    # for x^alpha e^{-x}; l_k = p_k e^{-x/2}.
    tab = _normalized_table(n - 1, alpha, nodes)
    log_w = -nodes - np.log(np.sum(tab * tab, axis=0))
    return nodes, log_w


def gauss_laguerre(n, alpha=0.0):
    """n-point Gauss rule for the weight x^alpha e^{-x} on (0, inf).

    Golub-Welsch eigenvalues polished by Newton steps on the normalised
    recurrence; weights from the Christoffel function, kept in log form.
    """
    if int(n) != n or n < 1:
        raise DomainError(f"node count must be a positive integer, got {n}")
    if not alpha > -1:
        raise DomainError(f"alpha must exceed -1, got {alpha}")
    n = int(n)
    if n == 1:
        nodes = np.array([alpha + 1.0])
        log_w = np.array([sp.gammaln(alpha + 1.0)])
    else:
        nodes, log_w = _gauss_laguerre_cached(n, float(alpha))
    with np.errstate(under="ignore"):
        weights = np.exp(log_w)
    return QuadratureRule(HALF_LINE, float(alpha), nodes.copy(), weights, 2 * n - 1, log_w.copy())


def theta_mass(alpha):
    """int_0^pi sin^{2alpha} theta d theta."""
    return math.exp(0.5 * math.log(math.pi) + sp.gammaln(alpha + 0.5) - sp.gammaln(alpha + 1.0))


def nu_constant(alpha):
    """Normaliser making sin^{2alpha} theta d theta a probability measure."""
    return 1.0 / theta_mass(alpha)


@lru_cache(maxsize=256)
def _theta_cached(n, alpha):
    u, w = sp.roots_jacobi(n, alpha - 0.5, alpha - 0.5)
    theta = np.arccos(u)[::-1]
    return theta, w[::-1]


def theta_rule(n, alpha=0.0):
    """Gauss rule on (0, pi) for the weight sin^{2alpha} theta.

    Built from u = cos(theta) and the Gauss-Jacobi rule for
    (1-u^2)^{alpha-1/2}; exact for polynomials in cos(theta) of degree
    2n-1.
    """
    if int(n) != n or n < 1:
        raise DomainError(f"node count must be a positive integer, got {n}")
    if not alpha > -0.5:
        raise DomainError(f"theta weight needs alpha > -1/2, got {alpha}")
    theta, w = _theta_cached(int(n), float(alpha))
    return QuadratureRule(THETA, float(alpha), theta.copy(), w.copy(), 2 * int(n) - 1)


@lru_cache(maxsize=64)
def _legendre(n):
    return sp.roots_legendre(n)


@lru_cache(maxsize=128)
def _jacobi_left(n, power):
    # weight (1+u)^power on (-1, 1)
    return sp.roots_jacobi(n, 0.0, power)


def legendre_panel(a, b, n=16):
    """Gauss-Legendre nodes/weights on [a, b] for dx."""
    u, w = _legendre(n)
    half = 0.5 * (b - a)
    return a + half * (u + 1.0), half * w


def jacobi_panel(a, b, power, n=16):
    """Nodes/weights on [a, b] for the weight (x - a)^power dx."""
    if power == 0:
        return legendre_panel(a, b, n)
    u, w = _jacobi_left(n, float(power))
    half = 0.5 * (b - a)
    return a + half * (u + 1.0), w * half ** (power + 1.0)


def geometric_breaks(lo, hi, ratio=0.5, min_width=None):
    """Breakpoints lo < ... < hi graded geometrically toward lo."""
    width = hi - lo
    min_width = width * 1e-14 if min_width is None else min_width
    pts = [hi]
    d = width
    while d * ratio > min_width:
        d *= ratio
        pts.append(lo + d)
    pts.append(lo)
    return np.array(pts[::-1])


def composite(breaks, n=16, left_power=0.0):
    """Plain rule over consecutive breakpoints; the first panel may carry
    a (x - breaks[0])^left_power weight which is folded back in."""
    xs, ws = [], []
    for i, (a, b) in enumerate(zip(breaks[:-1], breaks[1:])):
        if b <= a:
            continue
        if i == 0 and left_power != 0:
            x, w = jacobi_panel(a, b, left_power, n)
            w = w / (x - a) ** left_power
        else:
            x, w = legendre_panel(a, b, n)
        xs.append(x)
        ws.append(w)
    x = np.concatenate(xs)
    return QuadratureRule(PLAIN, 0.0, x, np.concatenate(ws), 2 * n - 1)


def half_line_split_rule(gamma, n_panel=16, n_tail=80, levels=40, scale=1.0):
    """Plain rule for int_0^inf h(x) x^gamma dx with x^gamma folded in.

    (0, 1] is graded geometrically toward 0 with a Jacobi panel carrying
    x^gamma innermost; [1, inf) uses a shifted Gauss-Laguerre rule whose
    e^{-u} weight is divided back out.
    """
    if not gamma > -1:
        raise DomainError(f"weight exponent must exceed -1, got {gamma}")
    breaks = geometric_breaks(0.0, 1.0, 0.5, 2.0 ** -levels)
    xs, ws = [], []
    for i, (a, b) in enumerate(zip(breaks[:-1], breaks[1:])):
        if i == 0:
            x, w = jacobi_panel(a, b, gamma, n_panel)
        else:
            x, w = legendre_panel(a, b, n_panel)
            w = w * x ** gamma
        xs.append(x)
        ws.append(w)
    gl = gauss_laguerre(n_tail, 0.0)
    xt = 1.0 + scale * gl.nodes
    wt = scale * np.exp(gl.log_weights + gl.nodes) * xt ** gamma
    xs.append(xt)
    ws.append(wt)
    return QuadratureRule(PLAIN, float(gamma), np.concatenate(xs), np.concatenate(ws), 2 * n_panel - 1)


def _sample(f, x):
    vals = np.asarray(f(x), dtype=float)
    if vals.shape != x.shape:
        vals = np.broadcast_to(vals, x.shape)
    bad = ~np.isfinite(vals)
    if bad.any():
        raise IntegrationError(f"non-finite integrand at node x={x[np.argmax(bad)]!r}")
    return vals


def weighted_integral(f, gamma, rule=None, scale=1.0, n=200):
    """int_0^inf f(x) x^gamma dx.

    With a half-line rule of order alpha_r the substitution x = scale * u
    turns the integral into scale^{gamma+1} sum w_i e^{u_i} u_i^{gamma-alpha_r} f(scale u_i).
    """
    if rule is None:
        rule = gauss_laguerre(n, gamma)
    if rule.kind == HALF_LINE:
        u = rule.nodes
        x = scale * u
        vals = _sample(f, x)
        w = np.exp(rule.log_weights + u + (gamma - rule.alpha) * np.log(u))
        return scale ** (gamma + 1.0) * float(np.dot(w, vals))
    if rule.kind == PLAIN:
        vals = _sample(f, rule.nodes)
        if rule.alpha == gamma:
            return float(np.dot(rule.weights, vals))
        return float(np.dot(rule.weights * rule.nodes ** (gamma - rule.alpha), vals))
    raise DomainError(f"rule kind {rule.kind!r} does not live on the half line")


def weighted_norm(f, p, gamma, rule=None, scale=None, n=200):
    """(int_0^inf |f(x)|^p x^gamma dx)^{1/p}.

    ``scale`` defaults to 2/p, which makes |f|^p e^{u} polynomial for
    functions of the form poly(x) e^{-x/2}.
    """
    if not p >= 1:
        raise DomainError(f"norm exponent must be >= 1, got {p}")
    if not gamma > -1:
        raise DomainError(f"weight exponent must exceed -1, got {gamma}")
    if scale is None:
        scale = 2.0 / p
    total = weighted_integral(lambda x: np.abs(np.asarray(f(x), dtype=float)) ** p, gamma, rule, scale, n)
    return max(total, 0.0) ** (1.0 / p)


def mu_norm(F, p, alpha, rule=None, support=None, n=200):
    """(int_0^inf |F(y)|^p y^{2alpha+1} dy)^{1/p}.

    Evaluated as 2^{-1/p} times the x^alpha-weighted norm of f(x) = F(sqrt x),
    or on Legendre panels over [0, support] when F has compact support.
    """
    if not p >= 1:
        raise DomainError(f"norm exponent must be >= 1, got {p}")
    if support is not None:
        breaks = np.linspace(0.0, support, 9)
        r = composite(breaks, 24)
        vals = np.abs(_sample(F, r.nodes)) ** p * r.nodes ** (2 * alpha + 1)
        return float(np.dot(r.weights, vals)) ** (1.0 / p)
    norm = weighted_norm(lambda x: F(np.sqrt(x)), p, alpha, rule, n=n)
    return norm * 2.0 ** (-1.0 / p)
