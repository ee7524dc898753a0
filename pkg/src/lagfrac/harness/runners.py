"""Verification experiments.

PASS never compares against an absolute constant: it means the sup ratio
is finite and stable under the doublings recorded in ``stability``.
"""

from __future__ import annotations

import math
import time

import numpy as np

from .. import convolution as C
from .. import kernels as K
from ..expansion import (
    ALTERNATING,
    POWER,
    EClassFunction,
    LaguerreSeries,
    MultiplierSequence,
    corollary_rhs,
    fractional_integral,
    remark3_condition,
)
from ..quadrature import weighted_norm
from .config import ExperimentConfig
from .report import VerificationReport

DRIFT_TOL = 0.02
SPREAD_TOL = 1e-4
LAW_TOL = 0.01
BRIDGE_TOL = 1e-5
DILATIONS = (0.25, 0.5, 1.0, 2.0, 4.0)
DILATION_PROFILES = 10
PERTURB = 1.1
DEGREE_SWEEP = (4, 8, 16, 32)
LEMMA_PAIRS = tuple((al, f * (al + 1)) for al in (0.0, 1.0, 2.5) for f in (0.3, 0.6, 0.9))


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def _finish(report, t0):
    report.seconds = time.perf_counter() - t0
    return report


# thm11: fractional integral between weighted Laguerre spaces


def _thm11_ratio(series, cfg, n):
    num = weighted_norm(fractional_integral(series, cfg.sigma), cfg.q, cfg.alpha - cfg.b * cfg.q, n=n)
    den = weighted_norm(series, cfg.p, cfg.alpha + cfg.a * cfg.p, n=n)
    return num / den if den > 0 else math.nan


def _random_series(rng, alpha, degree):
    d = int(rng.integers(0, degree + 1))
    return LaguerreSeries(alpha, rng.uniform(-1.0, 1.0, d + 1))


def run_thm11(cfg: ExperimentConfig) -> VerificationReport:
    """max over random E-class f of ||I_s f||_{q, alpha-bq} / ||f||_{p, alpha+ap}."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(cfg.seed)
    series = [_random_series(rng, cfg.alpha, cfg.degree) for _ in range(cfg.samples)]
    r1 = np.array([_thm11_ratio(s, cfg, 200) for s in series])
    r2 = np.array([_thm11_ratio(s, cfg, 400) for s in series])
    ok = np.isfinite(r1)
    i = int(np.nanargmax(r1))
    drift = _rel(float(np.nanmax(r2)), float(np.nanmax(r1)))
    sweep = {}
    per = max(cfg.samples // 4, 10)
    for deg in DEGREE_SWEEP:
        srng = np.random.default_rng([cfg.seed, deg])
        sweep[str(deg)] = max(_thm11_ratio(_random_series(srng, cfg.alpha, deg), cfg, 200) for _ in range(per))
    report = VerificationReport(
        "thm11", cfg.to_dict(), r1.tolist(), float(r1[i]),
        {"sample": i, "degree": series[i].K - 1}, float(np.nanmedian(r1)),
        {"quadrature_doubling": {"nodes": [200, 400], "sup_drift": drift},
         "degree_sweep_max": sweep, "excluded_zero": int((~ok).sum())},
    )
    report.passed = bool(np.isfinite(report.sup_ratio) and drift < DRIFT_TOL)
    report.table = {"sample": list(range(cfg.samples)), "ratio": r1, "ratio_doubled": r2}
    return _finish(report, t0)


# thm22: power-kernel convolution, dilation law


def random_bump(rng, max_degree=3, order=4):
    coeffs = rng.uniform(-1.0, 1.0, int(rng.integers(0, max_degree + 1)) + 1)
    coeffs[0] = abs(coeffs[0]) + 0.5
    radius = float(rng.uniform(0.5, 2.0))
    return C.RadialFunction.bump(coeffs, radius, order)


def _conv_on_grid(F, alpha, sigma, lo, hi, per_decade):
    """K_sigma * F on a doubled log grid; the base grid is every other point."""
    g = C.log_grid(lo, hi, 2 * per_decade)
    v = C.conv_profile(F, C.RadialFunction.power_kernel(alpha, sigma), g, alpha)
    return g, v


def dilation_exponent(alpha, p, q_prime, sigma):
    """E with ||K*F_lam||_{q'} / ||F_lam||_p proportional to lam^{-E}."""
    return (2 * alpha + 2) * (1.0 / q_prime - 1.0 / p) + 2 * sigma


def run_thm22_dilation(cfg: ExperimentConfig, per_decade=16) -> VerificationReport:
    t0 = time.perf_counter()
    al, p, q, s = cfg.alpha, cfg.p, cfg.q, cfg.sigma
    gamma = 2 * al + 1
    tail = 2 * (s - al - 1)
    qp = PERTURB * q
    E = dilation_exponent(al, p, qp, s)
    rng = np.random.default_rng(cfg.seed)
    lam = np.array(DILATIONS)
    base = int(np.argmin(np.abs(lam - 1.0)))
    exact, pert, ratios, grid_change, excluded = [], [], [], 0.0, 0
    for j in range(DILATION_PROFILES):
        F = random_bump(rng)
        re, rp = [], []
        for lm in lam:
            Fl = F.dilate(lm)
            den = C.compact_norm(Fl, p, gamma)
            if den == 0:
                excluded += 1
                break
            g, v = _conv_on_grid(Fl, al, s, 1e-5, 1e5, per_decade)
            num = C.power_tail_norm(v[::2], g[::2], q, gamma, tail)
            fine = C.power_tail_norm(v, g, q, gamma, tail)
            grid_change = max(grid_change, _rel(fine, num))
            re.append(fine / den)
            rp.append(C.power_tail_norm(v, g, qp, gamma, tail) / den)
        else:
            re, rp = np.array(re), np.array(rp)
            exact.append(float((re.max() - re.min()) / re[base]))
            pert.append(float(np.max(np.abs(rp / rp[base] / lam ** (-E) - 1.0))))
            ratios.append(re)
    ratios = np.array(ratios)
    sup = float(ratios.max())
    idx = np.unravel_index(int(np.argmax(ratios)), ratios.shape)
    literal = float(np.max(np.abs(ratios[0] / ratios[0, base] - 1.0)))
    stability = {
        "grid_doubling": {"per_decade": [per_decade, 2 * per_decade], "max_norm_change": grid_change},
        "exact_exponent_spread": max(exact),
        "perturbed_q": qp,
        "perturbed_law_exponent": -E,
        "perturbed_law_max_deviation": max(pert),
        "unsigned_law_exponent": E,
        "excluded_zero": excluded,
    }
    report = VerificationReport(cfg.theorem, cfg.to_dict(), ratios.ravel().tolist(), sup,
                                {"profile": int(idx[0]), "lambda": float(lam[idx[1]])},
                                float(np.median(ratios)), stability)
    report.notes.append(f"exact-exponent relative spread of profile 0: {literal:.3g}")
    report.passed = bool(max(exact) <= SPREAD_TOL and max(pert) <= LAW_TOL and grid_change < DRIFT_TOL)
    rows = [(k, lm, ratios[k, m]) for k in range(ratios.shape[0]) for m, lm in enumerate(lam)]
    report.table = {"profile": [r[0] for r in rows], "lambda": [r[1] for r in rows], "ratio": [r[2] for r in rows]}
    return _finish(report, t0)


# thm31: weighted power-kernel convolution


def run_thm31(cfg: ExperimentConfig, per_decade=16) -> VerificationReport:
    """max over random bumps F of ||x^{-2b} K*F||_q / ||x^{2a} F||_p."""
    t0 = time.perf_counter()
    al, p, q, s, a, b = cfg.alpha, cfg.p, cfg.q, cfg.sigma, cfg.a, cfg.b
    gamma_num = 2 * al + 1 - 2 * b * q
    gamma_den = 2 * al + 1 + 2 * a * p
    tail = 2 * (s - al - 1)
    rng = np.random.default_rng(cfg.seed)
    coarse, fine, quad = [], [], []
    for _ in range(cfg.samples):
        F = random_bump(rng)
        R = F.support
        g, v = _conv_on_grid(F, al, s, 1e-5 * R, 1e5 * R, per_decade)
        den = C.compact_norm(F, p, gamma_den)
        den2 = C.compact_norm(F, p, gamma_den, n=48)
        coarse.append(C.power_tail_norm(v[::2], g[::2], q, gamma_num, tail) / den)
        fine.append(C.power_tail_norm(v, g, q, gamma_num, tail) / den)
        quad.append(fine[-1] * den / den2)
    coarse, fine, quad = map(np.array, (coarse, fine, quad))
    i = int(np.argmax(fine))
    grid_drift = _rel(float(fine.max()), float(coarse.max()))
    quad_drift = _rel(float(quad.max()), float(fine.max()))
    stability = {"grid_doubling": {"per_decade": [per_decade, 2 * per_decade], "sup_drift": grid_drift},
                 "quadrature_doubling": {"nodes": [24, 48], "sup_drift": quad_drift}}
    passed = bool(np.isfinite(fine.max()) and grid_drift < DRIFT_TOL and quad_drift < DRIFT_TOL)
    notes = []
    if abs(p - q) < 1e-12:
        schur = K.schur_integral(p, al, s, a, b)
        stability["schur"] = {"value": schur.value, "divergent": schur.divergent}
        passed = passed and schur.finite
    if cfg.exploratory:
        notes.append("exploratory: alpha < 0")
    report = VerificationReport("thm31", cfg.to_dict(), fine.tolist(), float(fine[i]), {"sample": i},
                                float(np.median(fine)), stability, passed, notes=notes)
    report.table = {"sample": list(range(cfg.samples)), "ratio": fine, "ratio_coarse": coarse}
    return _finish(report, t0)


# lemma21: |g_sigma(x)| <= C x^{sigma-alpha-1}


def lemma21_pair(alpha, sigma, grid=None):
    grid = K.default_grid() if grid is None else grid
    ces = K.g_sigma_profile(alpha, sigma, grid=grid, method=K.CESARO)
    abel = K.g_sigma_profile(alpha, sigma, grid=grid, method=K.ABEL, refine=False)
    mid = np.sqrt(grid[1:] * grid[:-1])
    ref = K.g_sigma_profile(alpha, sigma, grid=mid, method=K.CESARO, refine=False)
    sup, arg = K.kernel_bound_ratio(ces)
    sup_mid = float(ref.ratio().max())
    refine_change = _rel(max(sup, sup_mid), sup)
    agree = K._floor_relative(abel.values, ces.values, grid, alpha, sigma)
    stab = {"truncation_doubling": {"truncation": [ces.truncation // 2, ces.truncation],
                                    "change": ces.history["doubling_change"]},
            "grid_refinement_change": refine_change,
            "abel_cesaro_deviation": agree}
    ok = (np.isfinite(sup) and ces.history["doubling_change"] < K.AGREEMENT_TOL
          and refine_change < DRIFT_TOL and agree < K.AGREEMENT_TOL)
    return sup, arg, stab, bool(ok), ces


def run_lemma21(cfg: ExperimentConfig) -> VerificationReport:
    t0 = time.perf_counter()
    pairs = LEMMA_PAIRS if cfg.alpha is None else ((cfg.alpha, cfg.sigma),)
    sups, stab, ok_all, table = [], {}, True, {"alpha": [], "sigma": [], "x": [], "g_sigma": [], "ratio": []}
    best = None
    for al, s in pairs:
        sup, arg, st, ok, prof = lemma21_pair(al, s)
        key = f"alpha={al:g},sigma={s:g}"
        st["sup_ratio"], st["argmax_x"], st["pass"] = sup, arg, ok
        stab[key] = st
        sups.append(sup)
        ok_all &= ok
        if best is None or sup > best[0]:
            best = (sup, {"alpha": al, "sigma": s, "x": arg})
        n = prof.grid.size
        table["alpha"] += [al] * n
        table["sigma"] += [s] * n
        table["x"] += prof.grid.tolist()
        table["g_sigma"] += prof.values.tolist()
        table["ratio"] += prof.ratio().tolist()
    report = VerificationReport("lemma21", cfg.to_dict(), sups, best[0], best[1], float(np.median(sups)), stab, ok_all)
    report.table = table
    return _finish(report, t0)


# corollary12: multiplier condition


def run_corollary12(cfg: ExperimentConfig) -> VerificationReport:
    t0 = time.perf_counter()
    rule = POWER if cfg.sequence == "power" else ALTERNATING
    m = MultiplierSequence(rule, cfg.sigma)
    first = corollary_rhs(m, cfg.order, cfg.sigma, cfg.nmax)
    second = corollary_rhs(m, cfg.order, cfg.sigma, 2 * cfg.nmax)
    change = _rel(second.value, first.value)
    stability = {"nmax_doubling": {"nmax": [cfg.nmax, 2 * cfg.nmax], "change": change},
                 "sup_term": second.sup_term, "block_sup": second.block_sup, "tail_bound": second.tail_bound}
    report = VerificationReport("corollary12", cfg.to_dict(), [first.value, second.value], second.value,
                                {"N": second.argmax_N}, second.value, stability)
    report.passed = bool(math.isfinite(second.value) and change < LAW_TOL)
    report.table = {"nmax": [cfg.nmax, 2 * cfg.nmax], "rhs": [first.value, second.value],
                    "argmax_N": [first.argmax_N, second.argmax_N]}
    return _finish(report, t0)


# remark3: coefficient condition implies membership in L^r


def remark3_function_norm(alpha, sigma, r, lo=1e-10, hi=200.0, per_decade=32):
    """||sum_k (k+1)^{-sigma} L_k^alpha e^{-x/2}||_{L^r(x^alpha dx)}."""
    g = C.log_grid(lo, hi, per_decade)
    f = K.g_sigma_integral(g, alpha, sigma) / math.gamma(alpha + 1.0)
    head = min(sigma - alpha - 1.0, 0.0)
    if not alpha + r * head > -1:
        return math.inf
    return C.power_tail_norm(f, g, r, alpha, None, head)


def run_remark3(cfg: ExperimentConfig) -> VerificationReport:
    t0 = time.perf_counter()
    m = MultiplierSequence(POWER, cfg.sigma)
    c1 = remark3_condition(m, cfg.N, cfg.r, cfg.alpha, cfg.kmax)
    c2 = remark3_condition(m, cfg.N, cfg.r, cfg.alpha, 2 * cfg.kmax)
    norm = remark3_function_norm(cfg.alpha, cfg.sigma, cfg.r)
    norm2 = remark3_function_norm(cfg.alpha, cfg.sigma, cfg.r, per_decade=64)
    change = _rel(c2.value, c1.value)
    ratio = norm / c2.value if c2.value else math.inf
    stability = {"kmax_doubling": {"kmax": [cfg.kmax, 2 * cfg.kmax], "change": change},
                 "last_block_ratio": c2.tail_ratio, "condition": c2.value,
                 "function_norm": norm, "norm_grid_change": _rel(norm2, norm)}
    report = VerificationReport("remark3", cfg.to_dict(), [ratio], ratio, {"K_max": 2 * cfg.kmax}, ratio, stability)
    report.passed = bool(math.isfinite(c2.value) and math.isfinite(norm) and change < LAW_TOL)
    report.table = {"kmax": [cfg.kmax, 2 * cfg.kmax], "condition": [c1.value, c2.value]}
    return _finish(report, t0)


# bridge between I_sigma and the twisted convolution with G_sigma


def bridge_functions(alpha, seed, degree=6):
    rng = np.random.default_rng(seed)
    return {"l_0": EClassFunction.laguerre(0, alpha), "l_2": EClassFunction.laguerre(2, alpha),
            f"random_deg{degree}": EClassFunction.random(rng, degree)}


def bridge_grid(n=20, lo=0.1, hi=3.0):
    return np.linspace(lo, hi, n)


def run_bridge(cfg: ExperimentConfig) -> VerificationReport:
    t0 = time.perf_counter()
    al, s = cfg.alpha, cfg.sigma
    xs = bridge_grid()
    G = C.g_sigma_radial(al, s)
    devs, theta_change, table = {}, 0.0, {"function": [], "x": [], "lhs": [], "rhs": []}
    for name, f in bridge_functions(al, cfg.seed).items():
        lhs, rhs = C.bridge_identity(f, al, s, xs)
        devs[name] = float(np.max(np.abs(lhs - rhs)))
        F = C.RadialFunction.from_eclass(f)
        for x in xs[::5]:
            n2 = 2 * C._theta_count(x * (x + F.support), True)
            theta_change = max(theta_change, abs(abs(C.conv_twisted(F, G, x, al, n_theta=n2))
                                                 - rhs[list(xs).index(x)]))
        table["function"] += [name] * xs.size
        table["x"] += xs.tolist()
        table["lhs"] += lhs.tolist()
        table["rhs"] += rhs.tolist()
    worst = max(devs, key=devs.get)
    stability = {"theta_doubling_max_change": theta_change, "max_abs_deviation": devs}
    report = VerificationReport("bridge", cfg.to_dict(), list(devs.values()), devs[worst], {"function": worst},
                                float(np.median(list(devs.values()))), stability)
    report.passed = bool(devs[worst] <= BRIDGE_TOL and theta_change <= BRIDGE_TOL)
    report.table = table
    return _finish(report, t0)


RUNNERS = {
    "thm11": run_thm11,
    "thm22": run_thm22_dilation,
    "dilation": run_thm22_dilation,
    "thm31": run_thm31,
    "lemma21": run_lemma21,
    "corollary12": run_corollary12,
    "remark3": run_remark3,
    "bridge": run_bridge,
}


def run(cfg: ExperimentConfig) -> VerificationReport:
    return RUNNERS[cfg.theorem](cfg)
