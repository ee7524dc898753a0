"""Fractional-integration kernels.

``g_sigma`` is the kernel whose twisted convolution realises I_sigma:

    g_sigma(x) = Gamma(alpha+1) sum_k (k+1)^{-sigma} L_k^alpha(x) e^{-x/2}.

The series converges only in a summability sense, so it is evaluated by
Cesaro means or Abel means (both with Richardson extrapolation), by the
absolutely convergent subordinated series, or by quadrature of the
equivalent heat-kernel integral

    g_sigma(x) = Gamma(alpha+1)/Gamma(sigma) int_0^inf t^{sigma-1} e^{-t}
                 (1-e^{-t})^{-alpha-1} exp(-(x/2) coth(t/2)) dt,

which follows from (k+1)^{-sigma} = Gamma(sigma)^{-1} int t^{sigma-1} e^{-(k+1)t} dt
and the Laguerre generating function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import special as sp

from . import _sums
from .errors import ConvergenceError, DomainError, IntegrationError
from .quadrature import gauss_laguerre, jacobi_panel, legendre_panel, nu_constant

ABEL = "abel_sum"
CESARO = "cesaro_sum"
SUBORDINATED = "subordinated"
INTEGRAL = "integral"
METHODS = (ABEL, CESARO, SUBORDINATED, INTEGRAL)

DEFAULT_TRUNCATION = {CESARO: 512, ABEL: 2048, SUBORDINATED: 512, INTEGRAL: 2048}
LEVELS = 4
ABEL_DECAY = 45.0
SUB_HEAD = 1000
AGREEMENT_TOL = 0.01
FLOOR = 1e-6
NOISE = 1e-9


def default_grid(n=200, lo=1e-4, hi=50.0):
    """Logarithmic grid used for kernel profiles."""
    return np.geomspace(lo, hi, n)


@dataclass(frozen=True)
class KernelProfile:
    alpha: float
    sigma: float
    grid: np.ndarray
    values: np.ndarray
    truncation: int
    method: str
    tail_estimate: float
    refined: bool = False
    converged: bool = True
    normalization: float = 1.0
    history: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.grid.ndim != 1 or np.any(np.diff(self.grid) <= 0):
            raise DomainError("profile grid must be strictly increasing")
        if self.values.shape != self.grid.shape:
            raise DomainError("values and grid differ in shape")

    def ratio(self):
        """|g_sigma(x)| x^{alpha+1-sigma} on the grid."""
        return np.abs(self.values) * self.grid ** (self.alpha + 1.0 - self.sigma)


def _check_params(alpha, sigma):
    if not alpha >= 0:
        raise DomainError(f"g_sigma needs alpha >= 0, got {alpha}")
    if not 0 < sigma < alpha + 1:
        raise DomainError(f"sigma must lie in (0, alpha+1) = (0, {alpha + 1}), got {sigma}")


def _richardson(levels):
    # columns coarse -> fine; error ~ sum c_m h^m with h halving
    cols = [levels[:, j] for j in range(levels.shape[1])]
    prev_best = cols[-1]
    for m in range(1, len(cols)):
        cols = [cols[j] + (cols[j] - cols[j - 1]) / (2.0**m - 1.0) for j in range(1, len(cols))]
        if len(cols) >= 2:
            prev_best = cols[-2]
    return cols[-1], cols[-1] - prev_best


def _term_counts(grid, truncation):
    g = np.asarray(grid, dtype=float)
    return np.ceil(truncation * np.maximum(g, 1.0) / np.minimum(g, 1.0)).astype(np.int64)


def _table_mode(coefficients):
    if coefficients is None:
        return 0, np.zeros(0)
    return 1, np.ascontiguousarray(np.asarray(coefficients, dtype=float))


def _abel(grid, alpha, sigma, truncation, coefficients=None):
    n = _term_counts(grid, truncation)
    eps_min = ABEL_DECAY / n
    scale = 2.0 ** np.arange(LEVELS, -1, -1, dtype=float)
    eps = eps_min[:, None] * scale[None, :]
    mode, table = _table_mode(coefficients)
    lv = _sums.abel_levels(grid, float(alpha), eps, n, mode, float(sigma), table)
    return _richardson(lv)


def cesaro_order(alpha):
    """Integer Cesaro order used for g_sigma; comfortably above alpha+1."""
    return int(math.ceil(alpha)) + 4


def _cesaro(grid, alpha, sigma, truncation, coefficients=None):
    n = _term_counts(grid, truncation)
    div = 2 ** np.arange(LEVELS, -1, -1)
    nlev = np.maximum(n[:, None] // div[None, :], 1).astype(np.int64)
    mode, table = _table_mode(coefficients)
    lv = _sums.cesaro_levels(grid, float(alpha), cesaro_order(alpha), nlev, mode, float(sigma), table)
    return _richardson(lv)


def subordination_order(alpha):
    return int(math.ceil(alpha)) + 3


@lru_cache(maxsize=32)
def _power_diff_head(sigma, N, count=SUB_HEAD):
    # Delta^N (k+1)^{-sigma} = Gamma(sigma)^{-1} int u^{sigma-1} e^{-(k+1)u} (1-e^{-u})^N du,
    # rescaled u -> u/(k+1) so the Gauss-Laguerre weight absorbs u^{sigma-1} e^{-u}
    rule = gauss_laguerre(160, sigma - 1.0)
    k1 = np.arange(1, count + 1, dtype=float)[:, None]
    vals = (-np.expm1(-rule.nodes[None, :] / k1)) ** N
    return (vals @ rule.weights) * k1[:, 0] ** (-sigma) / math.gamma(sigma)


def _subordinated(grid, alpha, sigma, truncation):
    # summation by parts N times: sum_k c_k L_k^a = sum_k (Delta^N c)_k L_k^{a+N}
    N = subordination_order(alpha)
    n = _term_counts(grid, truncation)
    head = _power_diff_head(float(sigma), N)
    vals = _sums.plain_sum(grid, float(alpha + N), n, 2, float(sigma), N, head)
    half = _sums.plain_sum(grid, float(alpha + N), np.maximum(n // 2, 1), 2, float(sigma), N, head)
    return vals, vals - half


def g_sigma_integral(x, alpha, sigma, step=0.02):
    """g_sigma by trapezoidal quadrature of the heat-kernel integral in log t.

    The integrand decays double-exponentially at both ends of the log
    scale, so the trapezoid converges geometrically in the step.
    """
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(xs <= 0):
        raise DomainError("g_sigma is evaluated at positive x only")
    out = np.empty_like(xs)
    lg = sp.gammaln(alpha + 1.0) - sp.gammaln(sigma)
    for i, xv in enumerate(xs):
        s_lo = math.log(xv / 800.0)
        s = np.arange(s_lo, math.log(800.0) + step, step)
        t = np.exp(s)
        with np.errstate(over="ignore", under="ignore"):
            logf = sigma * s - t - (alpha + 1.0) * np.log(-np.expm1(-t)) - 0.5 * xv / np.tanh(0.5 * t)
            out[i] = step * np.exp(logf + lg).sum()
    return out if np.ndim(x) else float(out[0])


def _integral(grid, alpha, sigma, truncation):
    # returned without the Gamma(alpha+1) factor, like the series sums
    step = 80.0 / truncation
    gamma = math.gamma(alpha + 1.0)
    vals = g_sigma_integral(grid, alpha, sigma, step) / gamma
    coarse = g_sigma_integral(grid, alpha, sigma, 2 * step) / gamma
    return vals, vals - coarse


def _floor_relative(a, b, grid, alpha, sigma):
    """Max |a-b| relative to max(|b|, floor) with a floor tied to the bound.

    At large x the kernel falls below the cancellation noise of any
    summation method; the floor max(1e-6 * sup(|b| x^{a+1-s}) * x^{s-a-1},
    1e-9 * max|b|) excludes that regime from relative comparisons.
    """
    env = grid ** (sigma - alpha - 1.0)
    sup = np.max(np.abs(b) / env)
    scale = np.maximum(np.abs(b), FLOOR * sup * env)
    scale = np.maximum(scale, NOISE * np.max(np.abs(b)))
    if sup == 0:
        return float(np.max(np.abs(a - b)))
    return float(np.max(np.abs(a - b) / scale))


def _run(method, grid, alpha, sigma, truncation, coefficients):
    if method == ABEL:
        return _abel(grid, alpha, sigma, truncation, coefficients)
    if method == CESARO:
        return _cesaro(grid, alpha, sigma, truncation, coefficients)
    if coefficients is not None:
        raise DomainError(f"custom coefficients are supported by {ABEL} and {CESARO} only")
    if method == SUBORDINATED:
        return _subordinated(grid, alpha, sigma, truncation)
    if method == INTEGRAL:
        return _integral(grid, alpha, sigma, truncation)
    raise DomainError(f"unknown method {method!r}; choose from {METHODS}")


def g_sigma_profile(alpha, sigma, grid=None, method=CESARO, truncation=None, coefficients=None,
                    refine=True, reference=1.0):
    """Tabulate g_sigma on ``grid``.

    ``truncation`` T sets the work per abscissa: n(x) = T max(x,1)/min(x,1)
    terms.  With ``refine`` the profile is recomputed at 2T; the reported
    values are the 2T ones and ``refined`` records whether the change was
    below 1% uniformly (relative to a floor, see ``_floor_relative``).

    ``coefficients`` replaces (k+1)^{-sigma} by an explicit sequence
    (zero beyond its end).  The subordinated series is normalised by
    matching an Abel evaluation at ``reference``; the factor found is
    kept in ``normalization``.
    """
    _check_params(alpha, sigma)
    grid = default_grid() if grid is None else np.ascontiguousarray(np.asarray(grid, dtype=float))
    if np.any(grid <= 0):
        raise DomainError("grid must be positive")
    if method not in METHODS:
        raise DomainError(f"unknown method {method!r}; choose from {METHODS}")
    T = DEFAULT_TRUNCATION[method] if truncation is None else int(truncation)
    if T < 8:
        raise DomainError(f"truncation too small: {T}")
    gamma = math.gamma(alpha + 1.0)
    first, diff = _run(method, grid, alpha, sigma, T, coefficients)
    history = {}
    if refine:
        second, diff = _run(method, grid, alpha, sigma, 2 * T, coefficients)
        change = _floor_relative(first, second, grid, alpha, sigma)
        history["doubling_change"] = change
        vals, T_used = second, 2 * T
        refined = change < AGREEMENT_TOL
    else:
        vals, T_used, refined = first, T, False
    vals = gamma * vals
    tail = _floor_relative(vals - gamma * diff, vals, grid, alpha, sigma) if np.any(vals) else 0.0
    norm = 1.0
    if method == SUBORDINATED:
        ref = np.array([float(reference)])
        abel_ref = gamma * _abel(ref, alpha, sigma, DEFAULT_TRUNCATION[ABEL])[0][0]
        sub_ref = gamma * _subordinated(ref, alpha, sigma, T_used)[0][0]
        norm = abel_ref / sub_ref
        vals = norm * vals
        history["normalization_reference"] = float(reference)
    converged = bool(np.all(np.isfinite(vals))) and tail < 0.1
    return KernelProfile(float(alpha), float(sigma), grid, vals, T_used, method, float(tail),
                         refined, converged, float(norm), history)


def compare_profiles(first, second, tol=AGREEMENT_TOL):
    """Max floor-relative deviation; ConvergenceError if above ``tol``."""
    if not np.array_equal(first.grid, second.grid):
        raise DomainError("profiles live on different grids")
    dev = _floor_relative(first.values, second.values, first.grid, first.alpha, first.sigma)
    if dev > tol:
        raise ConvergenceError(
            f"{first.method} and {second.method} disagree by {dev:.3g} (> {tol})", first, second)
    return dev


def kernel_bound_ratio(profile):
    """(sup_x |g(x)| x^{alpha+1-sigma}, argmax x) over the profile grid."""
    if not profile.converged:
        raise ConvergenceError(f"profile ({profile.method}) did not converge; "
                               f"tail estimate {profile.tail_estimate:.3g}", profile)
    r = profile.ratio()
    i = int(np.argmax(r))
    return float(r[i]), float(profile.grid[i])


def power_kernel(x, alpha, sigma):
    """K_sigma(x) = x^{2(sigma-alpha-1)}."""
    return np.asarray(x, dtype=float) ** (2.0 * (sigma - alpha - 1.0))


def chord(x, y, theta):
    """(x^2 + y^2 - 2xy cos theta)^{1/2} in the cancellation-free form."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    s = np.sin(0.5 * np.asarray(theta, dtype=float))
    return np.sqrt((x - y) ** 2 + 4.0 * x * y * s * s)


@lru_cache(maxsize=256)
def _graded_theta(alpha, depth, n):
    # (0, pi) split as [0, t_min], geometric panels (ratio 1/4) up to pi/2,
    # then [pi/2, pi]; sin^{2alpha} folded into the weights with the
    # endpoint factors carried by Jacobi panels
    tops = [0.5 * math.pi * 0.25**j for j in range(depth + 1)][::-1]
    xs, ws = [], []
    x, w = jacobi_panel(0.0, tops[0], 2 * alpha, n)
    xs.append(x)
    ws.append(w * (np.sin(x) / x) ** (2 * alpha))
    for a, b in zip(tops[:-1], tops[1:]):
        x, w = legendre_panel(a, b, n)
        xs.append(x)
        ws.append(w * np.sin(x) ** (2 * alpha))
    u, w = jacobi_panel(0.0, 0.5 * math.pi, 2 * alpha, n)
    x = math.pi - u
    xs.append(x[::-1])
    ws.append((w * (np.sin(u) / u) ** (2 * alpha))[::-1])
    theta = np.concatenate(xs)
    weights = np.concatenate(ws) * nu_constant(alpha)
    return theta, weights


def graded_theta_rule(alpha, theta_scale, n=16):
    """Rule for int_0^pi g dnu_alpha resolving features down to ``theta_scale``.

    Geometric panels toward theta = 0 keep every panel at least a fixed
    relative distance from the complex singularities at +-i*theta_scale
    of integrands built from the chord near the diagonal.
    """
    if not alpha > -0.5:
        raise DomainError(f"theta rules need alpha > -1/2, got {alpha}")
    scale = max(float(theta_scale), 1e-15)
    depth = max(0, int(math.ceil(math.log(0.5 * math.pi / scale * 8.0) / math.log(4.0))))
    t, w = _graded_theta(float(alpha), depth, int(n))
    return t.copy(), w.copy()


def _diagonal_average(x, alpha, power):
    # int (2x sin(theta/2))^power dnu = (2x)^power nu 2^{2alpha} B((power+2alpha+1)/2, alpha+1/2)
    if not power + 2 * alpha > -1:
        raise IntegrationError(
            f"theta integral diverges on the diagonal (exponent {power + 2 * alpha:.3g} <= -1)")
    logb = sp.betaln(0.5 * (power + 2 * alpha + 1), alpha + 0.5)
    return (2 * x) ** power * nu_constant(alpha) * math.exp(2 * alpha * math.log(2.0) + logb)


def theta_average(x, y, alpha, power, n=16):
    """int_0^pi (x,y)_theta^power dnu_alpha(theta) for scalar x and array y."""
    ys = np.atleast_1d(np.asarray(y, dtype=float))
    out = np.empty_like(ys)
    diag = ys == x
    if diag.any():
        out[diag] = _diagonal_average(x, alpha, power)
    off = ~diag
    if off.any():
        yo = ys[off]
        with np.errstate(divide="ignore"):
            scale = np.min(np.abs(x - yo) / np.sqrt(np.maximum(x * yo, 1e-300)))
        theta, w = graded_theta_rule(alpha, scale, n)
        c = chord(x, yo[:, None], theta[None, :])
        out[off] = (c ** power) @ w
    return out if np.ndim(y) else float(out[0])


def homogeneous_kernel(x, y, alpha, sigma, a=0.0, b=0.0, n=16):
    """K(x,y) = x^{-2b} (int (x,y)_theta^{2(sigma-alpha-1)} dnu_alpha) y^{-2a}."""
    if not alpha > -0.5:
        raise DomainError(f"alpha must exceed -1/2, got {alpha}")
    if not sigma < alpha + 1:
        raise DomainError(f"sigma must be below alpha+1, got {sigma}")
    if not x > 0 or np.any(np.asarray(y) <= 0):
        raise DomainError("homogeneous kernel needs x, y > 0")
    avg = theta_average(x, y, alpha, 2.0 * (sigma - alpha - 1.0), n)
    return x ** (-2.0 * b) * avg * np.asarray(y, dtype=float) ** (-2.0 * a)


@dataclass(frozen=True)
class SchurResult:
    value: float
    pieces: tuple
    divergent: tuple
    exponents: tuple

    @property
    def finite(self):
        return not self.divergent


def schur_exponents(p, alpha, sigma, a, b):
    """Power of y in K(1,y) y^{-(2alpha+2)/p} y^{2alpha+1} near 0 and near infinity."""
    near0 = -2 * a - (2 * alpha + 2) / p + 2 * alpha + 1
    near_inf = 2 * (sigma - alpha - 1) - 2 * a - (2 * alpha + 2) / p + 2 * alpha + 1
    return near0, near_inf


def schur_integral(p, alpha, sigma, a, b, cutoffs=(0.5, 2.0), n=24, tol=1e-12):
    """int_0^inf K(1,y) y^{-(2alpha+2)/p} dmu_alpha(y) split at ``cutoffs``.

    Divergence is decided from exponents: the piece at 0 diverges when
    a >= (alpha+1)/p', the piece at infinity when b >= (alpha+1)/p; the
    middle piece has the integrable |1-y|^{sigma-1} type singularity.
    """
    if not abs(sigma - (a + b)) <= 1e-12:
        raise DomainError(f"the Schur test needs sigma = a+b, got sigma={sigma}, a+b={a + b}")
    if not 0 < sigma < alpha + 1:
        raise DomainError(f"sigma must lie in (0, alpha+1), got {sigma}")
    lo, hi = cutoffs
    e0, einf = schur_exponents(p, alpha, sigma, a, b)
    power = 2.0 * (sigma - alpha - 1.0)
    divergent = []
    if not e0 > -1 + tol:
        divergent.append("near_zero")
    if not einf < -1 - tol:
        divergent.append("near_infinity")

    # (0, lo): theta average is smooth in y; y^{e0} carried by a Jacobi panel
    if "near_zero" in divergent:
        piece0 = math.inf
    else:
        y, w = jacobi_panel(0.0, lo, e0, n)
        piece0 = float(w @ theta_average(1.0, y, alpha, power))

    # (lo, hi): graded toward y = 1 from both sides
    segs = []
    for a_, b_, toward in ((lo, 1.0, "right"), (1.0, hi, "left")):
        width = b_ - a_
        d = width
        edges = [d]
        while d > 1e-13:
            d *= 0.25
            edges.append(d)
        for outer, inner in zip(edges[:-1], edges[1:]):
            if toward == "right":
                yy, ww = legendre_panel(1.0 - outer, 1.0 - inner, n)
            else:
                yy, ww = legendre_panel(1.0 + inner, 1.0 + outer, n)
            segs.append((yy, ww))
    piece1 = 0.0
    for yy, ww in segs:
        piece1 += float(ww @ (theta_average(1.0, yy, alpha, power) * yy ** e0))

    # (hi, inf): asymptotic part y^{einf} exactly, remainder with t = 1/y
    if "near_infinity" in divergent:
        piece2 = math.inf
    else:
        asym = hi ** (einf + 1) / (-(einf + 1))
        t, w = legendre_panel(0.0, 1.0 / hi, n)
        # y^{einf} (h(1/y) - 1) dy = t^{-einf-2} (h(t) - 1) dt, h(t) - 1 = O(t^2)
        h = theta_average(1.0, t, alpha, power)
        remainder = float(w @ (t ** (-einf - 2.0) * (h - 1.0)))
        piece2 = asym + remainder
    total = piece0 + piece1 + piece2
    return SchurResult(total, (piece0, piece1, piece2), tuple(divergent), (e0, einf))
