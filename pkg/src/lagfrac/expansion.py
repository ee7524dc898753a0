"""Laguerre series, the dense class E, and spectral multipliers.

An element of E is p(x) e^{-x/2} with p a polynomial; it is stored by
the monomial coefficients of p.  The differential operator

    L = -(x d^2/dx^2 + (alpha+1) d/dx - x/4)

maps E to itself and acts on p as

    p  ->  -x p'' + (x - alpha - 1) p' + (alpha+1)/2 p,

so eigen-relations can be checked without quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special as sp
from scipy.signal import fftconvolve

from .errors import DomainError, TruncationError
from .quadrature import HALF_LINE, gauss_laguerre
from .special import binom_A_seq, laguerre_table

DEFAULT_J_MAX = 10**5
DEFAULT_DIFF_TOL = 1e-8


@dataclass(frozen=True)
class EClassFunction:
    poly_coeffs: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.poly_coeffs, dtype=float))
        nz = np.flatnonzero(c)
        c = c[: nz[-1] + 1] if nz.size else c[:1] * 0.0
        object.__setattr__(self, "poly_coeffs", c)

    @property
    def degree(self):
        return self.poly_coeffs.size - 1

    def poly(self, x):
        return np.polynomial.polynomial.polyval(x, self.poly_coeffs)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self.poly(x) * np.exp(-0.5 * x)

    def __add__(self, other):
        n = max(self.poly_coeffs.size, other.poly_coeffs.size)
        a = np.pad(self.poly_coeffs, (0, n - self.poly_coeffs.size))
        b = np.pad(other.poly_coeffs, (0, n - other.poly_coeffs.size))
        return EClassFunction(a + b)

    def __sub__(self, other):
        return self + other.scale(-1.0)

    def scale(self, c):
        return EClassFunction(c * self.poly_coeffs)

    def mul_x(self):
        return EClassFunction(np.concatenate([[0.0], self.poly_coeffs]))

    def derivative(self):
        """d/dx (p e^{-x/2}) = (p' - p/2) e^{-x/2}."""
        c = self.poly_coeffs
        dp = np.polynomial.polynomial.polyder(c) if c.size > 1 else np.zeros(1)
        dp = np.pad(dp, (0, c.size - dp.size))
        return EClassFunction(dp - 0.5 * c)

    def of_square(self):
        """y -> f(y^2), used for the radial picture on (R_+, dmu_alpha)."""
        return lambda y: self(np.asarray(y, dtype=float) ** 2)

    @classmethod
    def laguerre(cls, k, alpha):
        """l_k^alpha written out in monomials."""
        i = np.arange(k + 1)
        log_mag = (
            0.5 * (sp.gammaln(k + 1) - sp.gammaln(k + alpha + 1))
            + sp.gammaln(k + alpha + 1)
            - sp.gammaln(k - i + 1)
            - sp.gammaln(alpha + i + 1)
            - sp.gammaln(i + 1)
        )
        return cls(np.where(i % 2, -1.0, 1.0) * np.exp(log_mag))

    @classmethod
    def random(cls, rng, degree, low=-1.0, high=1.0):
        return cls(rng.uniform(low, high, size=degree + 1))


def apply_L(f, alpha):
    """L f for f in E, exactly in the monomial coefficients."""
    c = f.poly_coeffs
    n = c.size
    i = np.arange(n, dtype=float)
    out = (i + 0.5 * (alpha + 1.0)) * c
    # -(i+1)(i+alpha+1) c_{i+1} lands on x^i
    out[:-1] -= (i[:-1] + 1.0) * (i[:-1] + alpha + 1.0) * c[1:]
    return EClassFunction(out)


def eigenvalue(k, alpha):
    return k + 0.5 * (alpha + 1.0)


@dataclass(frozen=True)
class LaguerreSeries:
    alpha: float
    coeffs: np.ndarray

    def __post_init__(self):
        if not self.alpha > -1:
            raise DomainError(f"alpha must exceed -1, got {self.alpha}")
        object.__setattr__(self, "coeffs", np.atleast_1d(np.asarray(self.coeffs, dtype=float)))

    @property
    def K(self):
        return self.coeffs.size - 1

    def __call__(self, x):
        return synthesize(self, x)

    def to_eclass(self):
        """Sum of a_k l_k^alpha as an element of E."""
        total = EClassFunction(np.zeros(1))
        for k, a in enumerate(self.coeffs):
            if a:
                total = total + EClassFunction.laguerre(k, self.alpha).scale(a)
        return total


def analyze(f, alpha, K, rule=None):
    """Laguerre coefficients a_k = int f l_k^alpha x^alpha dx, k = 0..K.

    ``f`` is an EClassFunction or any vectorised callable with
    f(x) e^{x/2} polynomially bounded.
    """
    if not alpha > -1:
        raise DomainError(f"alpha must exceed -1, got {alpha}")
    if rule is None:
        if isinstance(f, EClassFunction):
            n = max(32, (f.degree + K) // 2 + 8)
        else:
            n = 200
        rule = gauss_laguerre(n, alpha)
    if rule.kind != HALF_LINE:
        raise DomainError("analyze needs a half-line Gauss-Laguerre rule")
    x = rule.nodes
    w = np.exp(rule.log_weights + x)
    if rule.alpha != alpha:
        w = w * x ** (alpha - rule.alpha)
    vals = np.asarray(f(x), dtype=float)
    table = laguerre_table(K, alpha, x)
    return LaguerreSeries(alpha, table @ (w * vals))


def synthesize(series, x):
    """Partial sum sum_{k<=K} a_k l_k^alpha(x)."""
    xs = np.asarray(x, dtype=float)
    flat = np.atleast_1d(xs).ravel()
    table = laguerre_table(series.K, series.alpha, flat)
    out = series.coeffs @ table
    return float(out[0]) if xs.ndim == 0 else out.reshape(xs.shape)


POWER = "power_sigma"
GAMMA_RATIO = "gamma_ratio_sigma"
ALTERNATING = "alternating_power_sigma"
TABLE = "custom_table"
RULES = (POWER, GAMMA_RATIO, ALTERNATING, TABLE)


@dataclass(frozen=True)
class MultiplierSequence:
    """m_k for k >= 0.

    power_sigma gives (k+1)^{-sigma} (any real sigma, so sigma = 0 is the
    constant 1 and sigma = -1 gives k+1); gamma_ratio_sigma gives
    Gamma(k+1)/Gamma(k+sigma+1); alternating_power_sigma gives
    (-1)^k (k+1)^{-sigma}; custom_table is zero past the table.
    """

    rule: str
    sigma: float = 0.0
    table: tuple = field(default=())

    def __post_init__(self):
        if self.rule not in RULES:
            raise DomainError(f"unknown multiplier rule {self.rule!r}")
        object.__setattr__(self, "table", tuple(float(v) for v in self.table))

    def values(self, k):
        k = np.asarray(k)
        kf = k.astype(float)
        if self.rule == POWER:
            return (kf + 1.0) ** (-self.sigma)
        if self.rule == ALTERNATING:
            return np.where(k % 2, -1.0, 1.0) * (kf + 1.0) ** (-self.sigma)
        if self.rule == GAMMA_RATIO:
            return np.exp(sp.gammaln(kf + 1.0) - sp.gammaln(kf + self.sigma + 1.0))
        tab = np.asarray(self.table)
        out = np.zeros(k.shape)
        inside = k < tab.size
        out[inside] = tab[k[inside]]
        return out

    def __call__(self, k):
        return self.values(k)

    def tail_sup(self, start):
        """sup_{k >= start} |m_k|."""
        if self.rule in (POWER, ALTERNATING):
            return math.inf if self.sigma < 0 else (start + 1.0) ** (-self.sigma)
        if self.rule == GAMMA_RATIO:
            if self.sigma < 0:
                return math.inf
            return float(np.exp(sp.gammaln(start + 1.0) - sp.gammaln(start + self.sigma + 1.0)))
        tab = np.abs(np.asarray(self.table[start:]))
        return float(tab.max()) if tab.size else 0.0


def apply_multiplier(series, m):
    k = np.arange(series.coeffs.size)
    return LaguerreSeries(series.alpha, series.coeffs * m.values(k))


def fractional_integral(series, sigma):
    """I_sigma: multiply a_k by (k+1)^{-sigma}."""
    if not sigma > 0:
        raise DomainError(f"fractional order must be positive, got {sigma}")
    return apply_multiplier(series, MultiplierSequence(POWER, sigma))


def omega_sequence(k, sigma):
    """Gamma(k+1) / Gamma(sigma+k+1)."""
    if not sigma > 0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    kf = np.asarray(k, dtype=float)
    out = np.exp(sp.gammaln(kf + 1.0) - sp.gammaln(kf + sigma + 1.0))
    return float(out) if kf.ndim == 0 else out


@dataclass(frozen=True)
class DifferenceResult:
    value: float
    tail_bound: float
    terms: int


def _is_integer(s):
    return float(s).is_integer()


def _difference_terms(s, J_max):
    """(coefficients A_j^{-s-1}, number of terms, tail factor)."""
    if _is_integer(s):
        n = int(s)
        return binom_A_seq(n, -s - 1.0), n + 1, 0.0
    if J_max <= s + 1:
        raise DomainError(f"J_max={J_max} must exceed s+1={s + 1}")
    coeffs = binom_A_seq(J_max, -s - 1.0)
    # For s > 0 the A_j^{-s-1} sum to 0 and have one sign once j > s+1, so
    # sum_{j>J} |A_j^{-s-1}| = |sum_{j<=J} A_j^{-s-1}| = |A_J^{-s}|.
    tail = abs(binom_A_seq(J_max, -s)[-1])
    return coeffs, J_max + 1, tail


def fractional_difference(m, k, s, J_max=DEFAULT_J_MAX, tol=None):
    """Delta^s m_k = sum_j A_j^{-s-1} m_{k+j}, truncated after J_max terms.

    Integer orders are finite sums and exact.  Otherwise the returned
    tail bound is sum_{j > J_max} |A_j^{-s-1}| * sup_{j > J_max} |m_{k+j}|.
    """
    if not s > 0:
        raise DomainError(f"difference order must be positive, got {s}")
    coeffs, n, tail_factor = _difference_terms(s, J_max)
    vals = m.values(np.arange(k, k + n))
    terms = coeffs * vals
    value = float(math.fsum(terms))
    tail = 0.0 if tail_factor == 0.0 else tail_factor * m.tail_sup(k + n)
    # rounding in the summation itself
    tail += n * np.finfo(float).eps * float(np.max(np.abs(terms)))
    if tol is not None and tail > tol:
        raise TruncationError(f"tail bound {tail:.3g} exceeds tolerance {tol:.3g} at J_max={J_max}", tail)
    return DifferenceResult(value, tail, n)


def fractional_difference_seq(m, s, k_max, J_max=DEFAULT_J_MAX):
    """Delta^s m_k for k = 0..k_max plus the worst tail bound."""
    if not s > 0:
        raise DomainError(f"difference order must be positive, got {s}")
    coeffs, n, tail_factor = _difference_terms(s, J_max)
    vals = m.values(np.arange(k_max + n))
    if n <= 64:
        out = np.zeros(k_max + 1)
        for j, c in enumerate(coeffs):
            out += c * vals[j : j + k_max + 1]
    else:
        out = fftconvolve(vals, coeffs[::-1], mode="valid")[: k_max + 1]
    tail = 0.0 if tail_factor == 0.0 else tail_factor * m.tail_sup(n)
    return out, tail


@dataclass(frozen=True)
class RHSReport:
    value: float
    sup_term: float
    block_sup: float
    argmax_N: int
    tail_bound: float


def corollary_rhs(m, s, sigma, N_max, J_max=DEFAULT_J_MAX):
    """||{(k+1)^sigma m_k}||_inf^2 + sup_{N<=N_max} sum_{k=N}^{2N} |(k+1)^{s+sigma} Delta^s m_k|^2 / (k+1)."""
    k_max = 2 * N_max
    diffs, tail = fractional_difference_seq(m, s, k_max, J_max)
    k = np.arange(k_max + 1, dtype=float)
    sup_term = float(np.max(np.abs((k + 1.0) ** sigma * m.values(np.arange(k_max + 1))))) ** 2
    terms = ((k + 1.0) ** (s + sigma) * diffs) ** 2 / (k + 1.0)
    csum = np.concatenate([[0.0], np.cumsum(terms)])
    N = np.arange(N_max + 1)
    blocks = csum[2 * N + 1] - csum[N]
    best = int(np.argmax(blocks))
    return RHSReport(sup_term + float(blocks[best]), sup_term, float(blocks[best]), best, tail)


@dataclass(frozen=True)
class ConditionReport:
    value: float
    last_block: float
    tail_ratio: float
    K_max: int


def remark3_condition(f_seq, N, r, alpha, K_max):
    """Truncated sum_{k<=K_max} (k+1)^{N + (alpha+1)/r'} |Delta^{N+1} f_k|.

    ``last_block`` is the contribution of the final dyadic block
    (K_max/2, K_max]; a small ``tail_ratio`` indicates convergence.
    """
    if int(N) != N or N < 0:
        raise DomainError(f"N must be a nonnegative integer, got {N}")
    if not r >= 1:
        raise DomainError(f"r must be >= 1, got {r}")
    r_dual_inv = 1.0 - 1.0 / r
    diffs, _ = fractional_difference_seq(f_seq, N + 1, K_max)
    k = np.arange(K_max + 1, dtype=float)
    terms = (k + 1.0) ** (N + (alpha + 1.0) * r_dual_inv) * np.abs(diffs)
    value = float(math.fsum(terms))
    last = float(math.fsum(terms[K_max // 2 + 1 :]))
    return ConditionReport(value, last, last / value if value else 0.0, K_max)
