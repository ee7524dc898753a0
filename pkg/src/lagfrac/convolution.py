"""Translations and convolutions on (R_+, dmu_alpha), dmu_alpha = x^{2alpha+1} dx.

Both translations average F along the chord (x,y)_theta against
dnu_alpha; the twisted one carries the extra normalised Bessel factor
J_{alpha-1/2}(xy sin theta).  Convolutions integrate the translate
against G(y) kappa_alpha dmu_alpha(y) with kappa_alpha = 2/Gamma(alpha+1)^2,
the constant that makes the psi-coefficients of F x G equal c_k d_k for
G = Gamma(alpha+1) sum d_k L_k^alpha(x^2) e^{-x^2/2}.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from . import kernels
from .errors import DomainError, IntegrationError
from .expansion import EClassFunction, LaguerreSeries, fractional_integral, synthesize
from .quadrature import jacobi_panel, legendre_panel, nu_constant, theta_rule
from .special import bessel_j_normalized, log_gamma

SCHWARTZ = "schwartz_like"
COMPACT = "compact_support"
POWER_DECAY = "power_decay"
DECAY_CLASSES = (SCHWARTZ, COMPACT, POWER_DECAY)

PANEL_NODES = 16
EPS_RANGE = (-20, 10)


def kappa(alpha):
    """Convolution normaliser 2/Gamma(alpha+1)^2."""
    return 2.0 * math.exp(-2.0 * log_gamma(alpha + 1.0))


@dataclass(frozen=True)
class RadialFunction:
    """A function of the radial variable with the facts quadrature needs.

    ``support`` is the radius beyond which F vanishes (compact) or is
    below 1e-17 of its maximum (Schwartz-like); ``singular_power`` s
    says F(t) ~ t^s as t -> 0; ``power`` marks F(t) = t^power exactly.
    """

    evaluator: Callable
    decay_class: str
    support: float = math.inf
    exponent: float | None = None
    singular_power: float | None = None
    power: float | None = None
    name: str = ""

    def __post_init__(self):
        if self.decay_class not in DECAY_CLASSES:
            raise DomainError(f"unknown decay class {self.decay_class!r}")
        if self.decay_class == COMPACT and not math.isfinite(self.support):
            raise DomainError("compactly supported function needs a finite support radius")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.asarray(self.evaluator(t), dtype=float)
        if self.decay_class == COMPACT:
            out = np.where(t <= self.support, out, 0.0)
        return out

    def abs(self):
        return replace(self, evaluator=lambda t, f=self.evaluator: np.abs(f(t)), name=f"|{self.name}|")

    def dilate(self, lam):
        """t -> F(lam t)."""
        if not lam > 0:
            raise DomainError("dilation factor must be positive")
        return replace(self, evaluator=lambda t, f=self.evaluator: f(lam * np.asarray(t)),
                       support=self.support / lam, name=f"{self.name}({lam:g}t)")

    @classmethod
    def from_eclass(cls, f: EClassFunction, name="eclass", tol=1e-17):
        """F(t) = f(t^2) for f in E."""
        return cls(f.of_square(), SCHWARTZ, _effective_radius(f.of_square(), tol), name=name)

    @classmethod
    def psi_series(cls, coeffs, alpha, name="psi_series"):
        """sum_k c_k psi_k^alpha."""
        f = LaguerreSeries(alpha, coeffs).to_eclass().scale(math.sqrt(2.0))
        return cls.from_eclass(f, name)

    @classmethod
    def laguerre_kernel_series(cls, coeffs, alpha, name="kernel_series"):
        """Gamma(alpha+1) sum_k d_k L_k^alpha(t^2) e^{-t^2/2}."""
        k = np.arange(len(coeffs))
        # L_k e^{-x/2} = sqrt(Gamma(k+alpha+1)/k!) l_k
        norm = np.exp(0.5 * (log_gamma(k + alpha + 1.0) - log_gamma(k + 1.0)))
        f = LaguerreSeries(alpha, np.asarray(coeffs) * norm).to_eclass()
        return cls.from_eclass(f.scale(math.gamma(alpha + 1.0)), name)

    @classmethod
    def bump(cls, coeffs, radius, order=4, name="bump"):
        """P(t^2/R^2) (1 - t^2/R^2)_+^order with P given by ``coeffs``."""
        c = np.asarray(coeffs, dtype=float)

        def ev(t, c=c, R=float(radius)):
            s = (np.asarray(t) / R) ** 2
            return np.polynomial.polynomial.polyval(s, c) * np.clip(1.0 - s, 0.0, None) ** order

        return cls(ev, COMPACT, float(radius), name=name)

    @classmethod
    def power_kernel(cls, alpha, sigma):
        """K_sigma(t) = t^{2(sigma-alpha-1)}."""
        e = 2.0 * (sigma - alpha - 1.0)
        return cls(lambda t, e=e: np.asarray(t, dtype=float) ** e, POWER_DECAY, math.inf, e, e, e,
                   name=f"K_{sigma:g}")

    @classmethod
    def constant(cls, c=1.0):
        return cls(lambda t, c=c: np.full(np.shape(t), float(c)), POWER_DECAY, math.inf, 0.0,
                   name=f"const{c:g}")

    @classmethod
    def zero(cls):
        return cls(lambda t: np.zeros(np.shape(t)), COMPACT, 1.0, name="zero")


def _effective_radius(f, tol, t_max=80.0, n=8001):
    t = np.linspace(0.0, t_max, n)
    v = np.abs(f(t))
    peak = v.max()
    if peak == 0:
        return 1.0
    big = np.flatnonzero(v > tol * peak)
    return float(t[min(big[-1] + 1, n - 1)])


def _check_alpha(alpha):
    if alpha < 0:
        if not alpha > -0.5:
            raise DomainError(f"translations need alpha > -1/2, got {alpha}")
        warnings.warn("alpha < 0: translations are no longer positive operators", stacklevel=3)


def _theta_count(xy, twisted):
    n = 64 + 8 * int(math.ceil(math.sqrt(max(xy, 0.0))))
    if twisted:
        n = max(n, 8 * int(math.ceil(xy)))
    return n


def _full_theta(alpha, n):
    r = theta_rule(n, alpha)
    return r.nodes, r.weights * nu_constant(alpha)


def _translate(F, x, y, alpha, twisted, n=None):
    ys = np.atleast_1d(np.asarray(y, dtype=float))
    out = np.zeros_like(ys)
    R = F.support
    live = np.abs(x - ys) <= R
    if not live.any():
        return out
    yl = ys[live]
    if F.singular_power is not None and not twisted:
        with np.errstate(divide="ignore"):
            scale = np.min(np.abs(x - yl) / np.sqrt(np.maximum(x * yl, 1e-300)))
        diag = yl == x
        if diag.any() and not F.singular_power + 2 * alpha > -1:
            raise IntegrationError("translate of a power singularity diverges on the diagonal")
        theta, w = kernels.graded_theta_rule(alpha, scale, PANEL_NODES)
        out[live] = _theta_sum(F, x, yl, theta, w, alpha, twisted)
        return out
    n = n or _theta_count(x * float(yl.max()), twisted)
    res = np.empty_like(yl)
    window = np.zeros(yl.shape, dtype=bool)
    if F.decay_class == COMPACT and x > 0:
        with np.errstate(divide="ignore", invalid="ignore"):
            u0 = (x * x + yl * yl - R * R) / (2.0 * x * yl)
        window = (yl > 0) & (u0 > -0.5)
        if window.any():
            res[window] = _translate_window(F, x, yl[window], u0[window], alpha, twisted, n)
    if not window.all():
        res[~window] = _translate_full(F, x, yl[~window], alpha, twisted, n)
    out[live] = res
    return out


def _theta_sum(F, x, y, theta, w, alpha, twisted):
    c = kernels.chord(x, y[:, None], theta[None, :])
    vals = F(c)
    if twisted:
        arg = x * y[:, None] * np.sin(theta)[None, :]
        vals = vals * bessel_j_normalized(alpha - 0.5, arg.ravel()).reshape(arg.shape)
    return vals @ w


def _translate_full(F, x, y, alpha, twisted, n):
    theta, w = _full_theta(alpha, n)
    return _theta_sum(F, x, y, theta, w, alpha, twisted)


def _translate_window(F, x, y, u0, alpha, twisted, n):
    # F(chord) vanishes once cos(theta) < u0; in u = cos(theta) the weight is
    # (1-u)^{alpha-1/2} (1+u)^{alpha-1/2}, Gauss-Jacobi at the u = 1 end
    # u0 can exceed 1 by rounding when |x - y| = R
    span = np.maximum(1.0 - u0, 0.0)
    s, ws = jacobi_panel(0.0, 1.0, alpha - 0.5, n)
    v = span[:, None] * s[None, :]
    c = np.sqrt(np.maximum((x - y[:, None]) ** 2 + 2.0 * x * y[:, None] * v, 0.0))
    vals = F(c) * (2.0 - v) ** (alpha - 0.5)
    if twisted:
        sin_t = np.sqrt(np.maximum(v * (2.0 - v), 0.0))
        arg = x * y[:, None] * sin_t
        vals = vals * bessel_j_normalized(alpha - 0.5, arg.ravel()).reshape(arg.shape)
    return (vals @ ws) * span ** (alpha + 0.5) * nu_constant(alpha)


def translate_euclid(F: RadialFunction, x, y, alpha, n=None):
    """tau^E_x F(y) = int_0^pi F((x,y)_theta) dnu_alpha(theta); y may be an array."""
    _check_alpha(alpha)
    out = _translate(F, float(x), y, alpha, False, n)
    return out if np.ndim(y) else float(out[0])


def translate_twisted(F: RadialFunction, x, y, alpha, n=None):
    """tau_x F(y) = int_0^pi F((x,y)_theta) J_{alpha-1/2}(xy sin theta) dnu_alpha(theta).

    The theta rule has max(64 + 8 sqrt(xy), 8 ceil(xy)) nodes to follow
    the Bessel oscillation.
    """
    _check_alpha(alpha)
    out = _translate(F, float(x), y, alpha, True, n)
    return out if np.ndim(y) else float(out[0])


def _geometric_toward(a, b, toward_b, n, min_rel=1e-10, ratio=0.25):
    """Legendre panels on [a, b] graded geometrically toward one end."""
    width = b - a
    edges = [width]
    while edges[-1] > width * min_rel:
        edges.append(edges[-1] * ratio)
    edges.append(0.0)
    xs, ws = [], []
    for outer, inner in zip(edges[:-1], edges[1:]):
        lo, hi = (b - outer, b - inner) if toward_b else (a + inner, a + outer)
        x, w = legendre_panel(lo, hi, n)
        xs.append(x)
        ws.append(w)
    return np.concatenate(xs), np.concatenate(ws)


def _y_rule(lo, hi, alpha, marks=(), origin_power=None, n=PANEL_NODES, max_width=1.0):
    """Nodes/weights for int_lo^hi h(y) y^{2alpha+1} dy (weight folded in).

    When lo = 0 the first panel carries y^{2alpha+1+origin_power} through
    a Jacobi rule, preceded by geometric grading if origin_power is set.
    """
    pts = sorted({lo, hi, *[m for m in marks if lo < m < hi]})
    xs, ws = [], []
    for a, b in zip(pts[:-1], pts[1:]):
        if a == 0.0:
            power = 2 * alpha + 1 + (origin_power or 0.0)
            if origin_power is not None:
                head = b * 1e-8
                x, w = jacobi_panel(0.0, head, power, n)
                xs.append(x)
                ws.append(w * x ** (2 * alpha + 1 - power))
                x, w = _geometric_toward(head, b, False, n, min_rel=1e-8 * 4)
                xs.append(x)
                ws.append(w * x ** (2 * alpha + 1))
                continue
            first = min(b, max_width)
            x, w = jacobi_panel(0.0, first, power, n)
            xs.append(x)
            ws.append(w)
            a = first
            if a >= b:
                continue
        m = max(1, int(math.ceil((b - a) / max_width)))
        edges = np.linspace(a, b, m + 1)
        for c, d in zip(edges[:-1], edges[1:]):
            x, w = legendre_panel(c, d, n)
            xs.append(x)
            ws.append(w * x ** (2 * alpha + 1))
    return np.concatenate(xs), np.concatenate(ws)


def _power_kernel_conv(F, x, alpha, sigma, n=PANEL_NODES):
    # K_sigma * F(x) = int F(t) tau^E_x K_sigma(t) dmu(t), and tau^E_x K_sigma(t)
    # is the theta average of the chord power; graded around t = x
    R = F.support
    power = 2.0 * (sigma - alpha - 1.0)
    pieces = []
    if x < R:
        left_end = 0.5 * x
        t, w = jacobi_panel(0.0, left_end, 2 * alpha + 1, n)
        pieces.append((t, w))
        t, w = _geometric_toward(left_end, x, True, n)
        pieces.append((t, w * t ** (2 * alpha + 1)))
        right_end = min(R, 2.0 * x)
        # x within rounding of R leaves no right-hand piece
        if right_end - x > 1e-12 * x:
            t, w = _geometric_toward(x, right_end, False, n)
            pieces.append((t, w * t ** (2 * alpha + 1)))
        if right_end < R:
            t, w = _y_rule(right_end, R, alpha, n=n, max_width=max(x, R / 8))
            pieces.append((t, w))
    elif x < 2 * R:
        t, w = jacobi_panel(0.0, 0.5 * R, 2 * alpha + 1, n)
        pieces.append((t, w))
        t, w = _geometric_toward(0.5 * R, R, True, n, min_rel=max(1e-10, (x - R) / R * 0.1))
        pieces.append((t, w * t ** (2 * alpha + 1)))
    else:
        t, w = jacobi_panel(0.0, 0.5 * R, 2 * alpha + 1, n)
        pieces.append((t, w))
        t, w = legendre_panel(0.5 * R, R, n)
        pieces.append((t, w * t ** (2 * alpha + 1)))
    total = 0.0
    for t, w in pieces:
        f = F(t)
        keep = f != 0
        if keep.any():
            total += float((w[keep] * f[keep]) @ kernels.theta_average(x, t[keep], alpha, power))
    return kappa(alpha) * total


def _conv(F, G, x, alpha, twisted, n_theta=None):
    if G.power is not None and F.power is None:
        if twisted:
            raise DomainError("power kernels are convolved with the Euclidean translation only")
        if not math.isfinite(F.support):
            raise DomainError("power-kernel convolution needs F with finite (effective) support")
        sigma = 0.5 * G.power + alpha + 1.0
        return _power_kernel_conv(F, x, alpha, sigma)
    if F.power is not None and G.power is None:
        return _conv(G, F, x, alpha, twisted, n_theta)
    RF, RG = F.support, G.support
    if not math.isfinite(RG) and not math.isfinite(RF):
        raise DomainError("both factors lack a finite (effective) support; the integral may diverge")
    if not math.isfinite(RG):
        # tau_x F(y) vanishes once |x - y| > R_F: integrate in y over that window
        lo, hi = max(0.0, x - RF), x + RF
    else:
        lo, hi = max(0.0, x - RF) if math.isfinite(RF) else 0.0, min(RG, x + RF)
    if hi <= lo:
        return 0.0
    marks = [x]
    if math.isfinite(RF):
        marks.append(abs(RF - x))
    y, w = _y_rule(lo, hi, alpha, marks, G.singular_power if lo == 0.0 else None)
    g = G(y)
    keep = g != 0
    if not keep.any():
        return 0.0
    tr = _translate(F, x, y[keep], alpha, twisted, n_theta)
    return kappa(alpha) * float((w[keep] * g[keep]) @ tr)


def conv_euclid(F: RadialFunction, G: RadialFunction, x, alpha, n_theta=None):
    """F * G(x) = kappa_alpha int tau^E_x F(y) G(y) dmu_alpha(y)."""
    _check_alpha(alpha)
    if x < 0:
        raise DomainError("x must be nonnegative")
    return _conv(F, G, float(x), alpha, False, n_theta)


def conv_twisted(F: RadialFunction, G: RadialFunction, x, alpha, n_theta=None):
    """F x G(x) = kappa_alpha int tau_x F(y) G(y) dmu_alpha(y)."""
    _check_alpha(alpha)
    if x < 0:
        raise DomainError("x must be nonnegative")
    return _conv(F, G, float(x), alpha, True, n_theta)


def conv_profile(F, G, xs, alpha, twisted=False):
    fn = conv_twisted if twisted else conv_euclid
    return np.array([fn(F, G, float(x), alpha) for x in np.atleast_1d(xs)])


def truncated_power_conv(F, x, alpha, sigma, delta, n=32):
    """J_1 = int_0^delta tau^E_x F(y) y^{2(sigma-alpha-1)} dmu_alpha(y), no kappa."""
    y, w = jacobi_panel(0.0, delta, 2 * sigma - 1.0, n)
    marks = [m for m in (x,) if 0 < m < delta]
    if marks:
        y1, w1 = jacobi_panel(0.0, marks[0], 2 * sigma - 1.0, n)
        y2, w2 = legendre_panel(marks[0], delta, n)
        y, w = np.concatenate([y1, y2]), np.concatenate([w1, w2 * y2 ** (2 * sigma - 1.0)])
    return float(w @ translate_euclid(F, x, y, alpha))


@dataclass(frozen=True)
class MaximalValue:
    value: float
    epsilon: float


def maximal_fn(F: RadialFunction, x, alpha, eps_range=EPS_RANGE, n=PANEL_NODES):
    """F*(x) = sup over eps = 2^m of eps^{-(2alpha+2)} int_0^eps tau^E_x|F| dmu_alpha."""
    _check_alpha(alpha)
    absF = F.abs()
    m0, m1 = eps_range
    eps = 2.0 ** np.arange(m0, m1 + 1)
    cum = np.empty_like(eps)
    y, w = jacobi_panel(0.0, eps[0], 2 * alpha + 1, n)
    total = float(w @ translate_euclid(absF, x, y, alpha))
    cum[0] = total
    reach = x + F.support
    for i in range(1, eps.size):
        a, b = eps[i - 1], eps[i]
        if a < reach:
            y, w = legendre_panel(a, min(b, reach), n)
            total += float((w * y ** (2 * alpha + 1)) @ translate_euclid(absF, x, y, alpha))
        cum[i] = total
    ratio = cum * eps ** (-(2 * alpha + 2))
    i = int(np.argmax(ratio))
    return MaximalValue(float(ratio[i]), float(eps[i]))


def hardy_V(f, x, delta, alpha, n=24, levels=3):
    """V_delta f(x) = x^{2(delta-alpha-1)} int_0^x f(y) y^{-2 delta} dmu_alpha(y).

    Graded at 0: a Jacobi panel with weight y^{2alpha+1-2delta} on
    [0, x 4^{-levels}] followed by geometric Legendre panels.
    """
    e = 2 * alpha + 1 - 2 * delta
    if not e > -1:
        raise DomainError(f"V_delta diverges at 0: exponent 2alpha+1-2delta = {e:.3g} <= -1")
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty_like(xs)
    for i, xv in enumerate(xs):
        if xv <= 0:
            raise DomainError("V_delta is evaluated at x > 0")
        head = xv * 0.25**levels
        y, w = jacobi_panel(0.0, head, e, n)
        tops = head * 4.0 ** np.arange(levels + 1)
        ys, ws = [y], [w]
        for a, b in zip(tops[:-1], tops[1:]):
            yy, ww = legendre_panel(a, b, n)
            ys.append(yy)
            ws.append(ww * yy**e)
        y = np.concatenate(ys)
        w = np.concatenate(ws)
        out[i] = xv ** (2 * (delta - alpha - 1)) * float(w @ np.asarray(f(y), dtype=float))
    return out if np.ndim(x) else float(out[0])


def hardy_bound(alpha, delta, p):
    """Schur constant (2alpha+2-2delta-(2alpha+2)/p)^{-1} for ||V_delta||_p."""
    d = 2 * alpha + 2 - 2 * delta - (2 * alpha + 2) / p
    if not d > 0:
        raise DomainError(f"V_delta is unbounded on L^p here: 2alpha+2-2delta-(2alpha+2)/p = {d:.3g}")
    return 1.0 / d


def hardy_pointwise_constant(alpha, delta, p):
    """((2alpha+2-2delta p')^{-1})^{1/p'} from Hoelder on (0, x)."""
    pp = p / (p - 1.0)
    d = 2 * alpha + 2 - 2 * delta * pp
    if not d > 0:
        raise DomainError(f"pointwise bound needs 2alpha+2-2delta p' > 0, got {d:.3g}")
    return d ** (-1.0 / pp)


def log_grid(lo, hi, per_decade=32):
    n = int(math.ceil(per_decade * math.log10(hi / lo))) + 1
    return np.geomspace(lo, hi, n)


def power_tail_norm(values, grid, p, gamma, tail_exponent=None, head_exponent=0.0):
    """(int_0^inf |h|^p x^gamma dx)^{1/p} from samples of h on a log grid.

    Trapezoid in log x on the grid; below grid[0] h is continued as
    x^{head_exponent}, beyond grid[-1] as x^{tail_exponent} (omitted when
    None).
    """
    if not gamma + head_exponent * p > -1:
        raise DomainError(f"|h|^p x^gamma is not integrable at 0 (exponent {gamma + head_exponent * p:.3g})")
    h = np.abs(np.asarray(values, dtype=float)) ** p
    s = np.log(grid)
    integrand = h * grid ** (gamma + 1.0)
    total = float(np.sum(0.5 * (integrand[1:] + integrand[:-1]) * np.diff(s)))
    total += h[0] * grid[0] ** (gamma + 1.0) / (gamma + 1.0 + head_exponent * p)
    if tail_exponent is not None:
        e = tail_exponent * p + gamma + 1.0
        if not e < 0:
            raise DomainError(f"tail |h|^p x^gamma ~ x^{e - 1:.3g} is not integrable")
        total += h[-1] * grid[-1] ** (gamma + 1.0) / (-e)
    return total ** (1.0 / p)


def compact_norm(F, p, gamma, n=24, panels=8):
    """(int_0^R |F(t)|^p t^gamma dt)^{1/p} for F supported in [0, R]."""
    if not gamma > -1:
        raise DomainError(f"weight exponent must exceed -1, got {gamma}")
    R = F.support
    if not math.isfinite(R):
        raise DomainError("compact_norm needs a finite support")
    edges = np.linspace(0.0, R, panels + 1)
    t, w = jacobi_panel(0.0, edges[1], gamma, n)
    total = float(w @ np.abs(F(t)) ** p)
    for a, b in zip(edges[1:-1], edges[2:]):
        t, w = legendre_panel(a, b, n)
        total += float((w * t**gamma) @ np.abs(F(t)) ** p)
    return total ** (1.0 / p)


def translate_norm(F, x, p, alpha, n=PANEL_NODES):
    """||tau^E_x F||_{L^p(dmu_alpha)} in the y variable."""
    R = F.support
    if not math.isfinite(R):
        raise DomainError("translate_norm needs a finite (effective) support")
    lo, hi = max(0.0, x - R), x + R
    y, w = _y_rule(lo, hi, alpha, [x, abs(R - x)], n=n, max_width=max(R / 4, 0.25))
    return float(w @ np.abs(translate_euclid(F, x, y, alpha)) ** p) ** (1.0 / p)


def g_sigma_radial(alpha, sigma):
    """G_sigma(y) = g_sigma(y^2) as a radial function."""
    ev = lambda t: kernels.g_sigma_integral(np.maximum(np.asarray(t, dtype=float), 1e-300) ** 2, alpha, sigma)
    R = 1.0
    while abs(float(ev(R))) > 1e-17 * abs(float(ev(0.05))):
        R *= 1.25
    return RadialFunction(ev, SCHWARTZ, R, singular_power=2.0 * (sigma - alpha - 1.0), name=f"G_{sigma:g}")


def bridge_identity(f: EClassFunction, alpha, sigma, xs, K=None):
    """(|I_sigma f(x^2)|, |F x G_sigma(x)|) on ``xs`` with F(y) = f(y^2)."""
    from .expansion import analyze

    K = f.degree if K is None else K
    series = analyze(f, alpha, K)
    lhs = np.abs(synthesize(fractional_integral(series, sigma), np.asarray(xs, dtype=float) ** 2))
    F = RadialFunction.from_eclass(f)
    G = g_sigma_radial(alpha, sigma)
    rhs = np.abs(conv_profile(F, G, xs, alpha, twisted=True))
    return lhs, rhs
