"""Scalar and vectorised special functions.

Laguerre polynomials and the three normalised Laguerre function systems
are evaluated by upward three-term recurrence in the degree.  The
normalised recurrences carry a per-abscissa logarithmic scale so that
the factor ``exp(-x/2)`` never underflows before the polynomial growth
has compensated it; this keeps degrees in the thousands and abscissas
in the tens of thousands usable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as sp

from .errors import DomainError

_RESCALE = 1e150
_LOG_RESCALE = math.log(_RESCALE)
SERIES_TERMS = 60


@dataclass(frozen=True)
class BasisParams:
    alpha: float
    k: int

    def __post_init__(self):
        if not self.alpha > -1:
            raise DomainError(f"alpha must exceed -1, got {self.alpha}")
        if int(self.k) != self.k or self.k < 0:
            raise DomainError(f"k must be a nonnegative integer, got {self.k}")


def _check_alpha(alpha):
    if not alpha > -1:
        raise DomainError(f"alpha must exceed -1, got {alpha}")


def _check_k(k):
    if int(k) != k or k < 0:
        raise DomainError(f"degree must be a nonnegative integer, got {k}")
    return int(k)


def _out(value, scalar):
    return float(value[0]) if scalar else value


def _as_1d(x):
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 0
    return np.atleast_1d(arr).ravel(), scalar, arr.shape


def log_gamma(z):
    """ln Gamma(z) for z > 0 (scalar or array)."""
    arr = np.asarray(z, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError("log_gamma requires z > 0")
    out = sp.gammaln(arr)
    return float(out) if arr.ndim == 0 else out


def laguerre_poly(k, alpha, x):
    """Generalised Laguerre polynomial L_k^alpha(x) by upward recurrence."""
    k = _check_k(k)
    _check_alpha(alpha)
    xs, scalar, shape = _as_1d(x)
    if k == 0:
        out = np.ones_like(xs)
    elif k == 1:
        out = alpha + 1.0 - xs
    elif k == 2:
        out = ((alpha + 1.0) * (alpha + 2.0) - 2.0 * (alpha + 2.0) * xs + xs * xs) / 2.0
    else:
        prev = np.ones_like(xs)
        cur = alpha + 1.0 - xs
        for j in range(1, k):
            prev, cur = cur, ((2 * j + alpha + 1.0 - xs) * cur - (j + alpha) * prev) / (j + 1.0)
        out = cur
    return _out(out, scalar) if scalar else out.reshape(shape)


def _normalized_table(kmax, alpha, xs, log_extra=None):
    """Rows k = 0..kmax of exp(log_extra) * l_k^alpha(xs).

    Values are carried as mantissa times exp(scale) per column and
    rescaled whenever the mantissa grows large.
    """
    n = xs.size
    table = np.empty((kmax + 1, n))
    scale = -0.5 * xs - 0.5 * sp.gammaln(alpha + 1.0)
    if log_extra is not None:
        scale = scale + log_extra
    prev = np.zeros(n)
    cur = np.ones(n)
    table[0] = np.exp(scale)
    for j in range(kmax):
        nxt = ((2 * j + alpha + 1.0 - xs) * cur - math.sqrt(j * (j + alpha)) * prev) / math.sqrt(
            (j + 1.0) * (j + alpha + 1.0)
        )
        prev, cur = cur, nxt
        big = np.abs(cur) > _RESCALE
        if big.any():
            cur[big] /= _RESCALE
            prev[big] /= _RESCALE
            scale[big] += _LOG_RESCALE
        with np.errstate(under="ignore", over="ignore"):
            table[j + 1] = cur * np.exp(scale)
    return table


def laguerre_table(kmax, alpha, x):
    """Array of shape (kmax+1, len(x)) holding l_k^alpha(x) for k <= kmax."""
    kmax = _check_k(kmax)
    _check_alpha(alpha)
    xs = np.atleast_1d(np.asarray(x, dtype=float)).ravel()
    if np.any(xs < 0):
        raise DomainError("Laguerre functions need x >= 0")
    return _normalized_table(kmax, alpha, xs)


def laguerre_fn_l(k, alpha, x):
    """Orthonormal Laguerre function l_k^alpha on L^2(x^alpha dx)."""
    k = _check_k(k)
    _check_alpha(alpha)
    xs, scalar, shape = _as_1d(x)
    if np.any(xs < 0):
        raise DomainError("Laguerre functions need x >= 0")
    out = _normalized_table(k, alpha, xs)[k]
    return _out(out, scalar) if scalar else out.reshape(shape)


def laguerre_fn_script(k, alpha, x):
    """x^{alpha/2} l_k^alpha(x), the system bounded uniformly in k and x."""
    k = _check_k(k)
    _check_alpha(alpha)
    xs, scalar, shape = _as_1d(x)
    if np.any(xs < 0):
        raise DomainError("x must be nonnegative")
    if alpha < 0 and np.any(xs == 0):
        raise DomainError("x = 0 is singular when alpha < 0")
    with np.errstate(divide="ignore"):
        log_extra = np.where(xs > 0, 0.5 * alpha * np.log(np.where(xs > 0, xs, 1.0)), 0.0)
    out = _normalized_table(k, alpha, xs, log_extra)[k]
    if alpha > 0:
        out = np.where(xs == 0, 0.0, out)
    return _out(out, scalar) if scalar else out.reshape(shape)


def psi_fn(k, alpha, x):
    """psi_k^alpha(x) = sqrt(2) l_k^alpha(x^2), orthonormal for x^{2alpha+1} dx."""
    xs = np.asarray(x, dtype=float)
    return math.sqrt(2.0) * laguerre_fn_l(k, alpha, xs * xs)


def psi_table(kmax, alpha, x):
    xs = np.atleast_1d(np.asarray(x, dtype=float)).ravel()
    return math.sqrt(2.0) * laguerre_table(kmax, alpha, xs * xs)


def bessel_crossover(beta):
    return 12.0 + 2.0 * abs(beta)


def bessel_j_normalized(beta, x):
    """Gamma(beta+1) J_beta(x) / (x/2)^beta, equal to 1 at x = 0.

    Ascending series below ``12 + 2|beta|``; above it the Bessel value
    comes from scipy's ``jv`` with the prefactor applied in log space.
    """
    if beta < -0.5:
        raise DomainError(f"Bessel order must be >= -1/2, got {beta}")
    xs, scalar, shape = _as_1d(x)
    if np.any(xs < 0):
        raise DomainError("x must be nonnegative")
    out = np.empty_like(xs)
    small = xs < bessel_crossover(beta)
    if small.any():
        z = -0.25 * xs[small] ** 2
        term = np.ones_like(z)
        total = np.ones_like(z)
        for m in range(1, SERIES_TERMS):
            term = term * z / (m * (beta + m))
            total += term
        out[small] = total
    large = ~small
    if large.any():
        xl = xs[large]
        logpre = sp.gammaln(beta + 1.0) - beta * np.log(xl / 2.0)
        out[large] = np.exp(logpre) * sp.jv(beta, xl)
    return _out(out, scalar) if scalar else out.reshape(shape)


def binom_A_seq(jmax, t):
    """A_0^t .. A_jmax^t by the product recurrence A_j = A_{j-1} (t+j)/j."""
    jmax = _check_k(jmax)
    j = np.arange(1, jmax + 1, dtype=float)
    out = np.empty(jmax + 1)
    out[0] = 1.0
    if jmax:
        out[1:] = np.cumprod((t + j) / j)
    return out


def binom_A(j, t):
    """Generalised binomial coefficient Gamma(j+t+1) / (j! Gamma(t+1))."""
    j = _check_k(j)
    value = 1.0
    for i in range(1, j + 1):
        value *= (t + i) / i
    return value
