"""Command line interface: ``lagfrac <subcommand> [flags]``.

Exit codes: 0 all PASS, 1 any FAIL, 2 configuration or usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import convolution as C
from . import kernels as K
from .errors import ConfigError, LagfracError
from .expansion import EClassFunction, LaguerreSeries, analyze, fractional_integral, synthesize
from .harness import config as hc
from .harness.output import csv_text, svg_lines, write_csv, write_json, write_svg, write_text
from .harness.report import VerificationReport, _clean
from .harness.runners import run
from .quadrature import gauss_laguerre, theta_rule
from .special import laguerre_fn_l, laguerre_fn_script, psi_fn

VERIFY_TARGETS = ("thm11", "thm22", "thm31", "lemma21", "corollary12", "remark3", "bridge", "all")
ALL_TARGETS = VERIFY_TARGETS[:-1]
DEFAULT_OUT = "lagfrac_out"
RULE_NODES = 200


def _common(p):
    num = hc.parse_number
    p.add_argument("--alpha", type=num)
    p.add_argument("--sigma", type=num)
    p.add_argument("--p", type=num)
    p.add_argument("--q", type=num)
    p.add_argument("--a", type=num)
    p.add_argument("--b", type=num)
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help=f"output directory (default {DEFAULT_OUT})")
    p.add_argument("--config", help="key=value file; flags given here override it")
    p.add_argument("--dump-rule", dest="dump_rule", action="store_const", const=True,
                   help="also write the quadrature rules used as CSV")
    p.add_argument("--svg", action="store_const", const=True, help="also write SVG plots")
    p.add_argument("--degree", type=int, help="polynomial degree of random test functions")
    p.add_argument("--order", type=num, help="difference order s")
    p.add_argument("--N", type=int, help="difference order offset in the coefficient condition")
    p.add_argument("--r", type=num, help="Lebesgue exponent in the coefficient condition")
    p.add_argument("--nmax", type=int)
    p.add_argument("--kmax", type=int)
    p.add_argument("--grid-points", dest="grid_points", type=int)
    p.add_argument("--truncation", type=int)
    p.add_argument("--method", choices=K.METHODS)
    p.add_argument("--sequence", choices=("power", "alternating"))


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def build_parser():
    parser = _Parser(prog="lagfrac", description="Laguerre fractional integration toolkit and verification harness.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "eval-basis": "tabulate l_k, script-L_k and psi_k on a grid",
        "transform": "Laguerre coefficients of a random E-class function and the round-trip error",
        "fracint": "apply I_sigma to a random E-class function",
        "kernel-bound": "tabulate g_sigma and the ratio |g_sigma(x)| x^{alpha+1-sigma}",
        "conv": "Euclidean and twisted convolutions of two test functions on a grid",
        "maximal": "maximal function profile of a test function",
    }
    for name, text in helps.items():
        _common(sub.add_parser(name, help=text))
    m = sub.add_parser("multiplier", help="evaluate multiplier conditions")
    m.add_argument("action", choices=("check",))
    _common(m)
    v = sub.add_parser("verify", help="run verification experiments")
    v.add_argument("target", choices=VERIFY_TARGETS)
    _common(v)
    return parser


FLAG_KEYS = ("alpha", "sigma", "p", "q", "a", "b", "samples", "seed", "out", "dump_rule", "svg", "degree", "order",
             "N", "r", "nmax", "kmax", "grid_points", "truncation", "method", "sequence")


def merged_values(args):
    """Config file values overlaid by explicitly given flags."""
    values = {}
    if args.config:
        for key, raw in hc.read_config_file(args.config).items():
            k = key.replace("-", "_")
            values[k] = hc.convert(key, raw)
    for key in FLAG_KEYS:
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    return values


def _get(values, key, default):
    v = values.get(key)
    return default if v is None else v


def _out(values):
    return _get(values, "out", DEFAULT_OUT)


def _dump_rules(values, alpha):
    out = _out(values)
    write_text(os.path.join(out, "rule_gauss_laguerre.csv"), gauss_laguerre(RULE_NODES, alpha).to_csv())
    write_text(os.path.join(out, "rule_theta.csv"), theta_rule(64, max(alpha, 0.0)).to_csv())


def _finish_table(values, name, header, columns, series=None, **plot):
    out = _out(values)
    path = write_csv(os.path.join(out, f"{name}.csv"), header, columns)
    print(f"wrote {path}")
    if values.get("svg") and series:
        print(f"wrote {write_svg(os.path.join(out, f'{name}.svg'), series, **plot)}")


def _random_eclass(values, default_degree=8):
    rng = np.random.default_rng(_get(values, "seed", 42))
    return EClassFunction.random(rng, _get(values, "degree", default_degree))


def cmd_eval_basis(values):
    alpha = _get(values, "alpha", 0.0)
    kmax = _get(values, "kmax", 8)
    x = np.geomspace(1e-3, 50.0, _get(values, "grid_points", 200))
    cols = [[], [], [], [], []]
    series = {}
    for k in range(kmax + 1):
        l = laguerre_fn_l(k, alpha, x)
        cols[0] += [k] * x.size
        cols[1] += x.tolist()
        cols[2] += np.asarray(l).tolist()
        cols[3] += np.asarray(laguerre_fn_script(k, alpha, x)).tolist()
        cols[4] += np.asarray(psi_fn(k, alpha, np.sqrt(x))).tolist()
        series[f"l_{k}"] = (x, l)
    _finish_table(values, "basis", ["k", "x", "l", "script_L", "psi_at_sqrt_x"], cols, series,
                  title=f"Laguerre functions, alpha={alpha:g}", ylabel="l_k(x)")
    return 0


def cmd_transform(values):
    alpha = _get(values, "alpha", 0.0)
    f = _random_eclass(values)
    series = analyze(f, alpha, f.degree)
    x = np.geomspace(1e-3, 50.0, _get(values, "grid_points", 200))
    err = float(np.max(np.abs(synthesize(series, x) - f(x))))
    k = np.arange(series.coeffs.size)
    _finish_table(values, "transform", ["k", "coefficient"], [k, series.coeffs])
    print(f"round-trip max error {err:.3e}")
    return 0


def cmd_fracint(values):
    alpha = _get(values, "alpha", 0.0)
    sigma = _get(values, "sigma", 0.5)
    f = _random_eclass(values)
    series = analyze(f, alpha, f.degree)
    out = fractional_integral(series, sigma)
    x = np.geomspace(1e-3, 50.0, _get(values, "grid_points", 200))
    fx, gx = synthesize(series, x), synthesize(out, x)
    _finish_table(values, "fracint", ["x", "f", "I_sigma_f"], [x, fx, gx], {"f": (x, fx), "I_sigma f": (x, gx)},
                  title=f"I_sigma, alpha={alpha:g}, sigma={sigma:g}")
    return 0


def cmd_kernel_bound(values):
    alpha = _get(values, "alpha", 0.0)
    sigma = _get(values, "sigma", 0.5)
    grid = K.default_grid(_get(values, "grid_points", 200))
    prof = K.g_sigma_profile(alpha, sigma, grid=grid, method=_get(values, "method", K.CESARO),
                             truncation=values.get("truncation"))
    ratio = prof.ratio()
    _finish_table(values, "kernel_bound", ["x", "g_sigma", "ratio"], [grid, prof.values, ratio],
                  {"ratio": (grid, ratio)}, title=f"|g_sigma| x^(alpha+1-sigma), alpha={alpha:g}, sigma={sigma:g}")
    i = int(np.argmax(ratio))
    summary = {"alpha": alpha, "sigma": sigma, "method": prof.method, "truncation": prof.truncation,
               "sup_ratio": float(ratio[i]), "argmax_x": float(grid[i]), "converged": prof.converged,
               "refined": prof.refined, "doubling_change": prof.history.get("doubling_change")}
    print(json.dumps(_clean(summary)))
    return 0 if prof.converged and prof.refined else 1


def _test_pair(values):
    alpha = _get(values, "alpha", 0.0)
    rng = np.random.default_rng(_get(values, "seed", 42))
    deg = _get(values, "degree", 3)
    F = C.RadialFunction.psi_series(rng.uniform(-1, 1, deg + 1), alpha, "F")
    G = C.RadialFunction.psi_series(rng.uniform(-1, 1, deg + 1), alpha, "G")
    return alpha, F, G


def cmd_conv(values):
    alpha, F, G = _test_pair(values)
    x = np.linspace(0.05, 4.0, _get(values, "grid_points", 40))
    e = C.conv_profile(F, G, x, alpha)
    t = C.conv_profile(F, G, x, alpha, twisted=True)
    _finish_table(values, "conv", ["x", "euclid", "twisted"], [x, e, t], {"F*G": (x, e), "FxG": (x, t)},
                  logx=False, title=f"convolutions, alpha={alpha:g}")
    return 0


def cmd_maximal(values):
    alpha, F, _ = _test_pair(values)
    x = np.linspace(0.05, 4.0, _get(values, "grid_points", 40))
    mv = [C.maximal_fn(F, float(v), alpha) for v in x]
    val = [m.value for m in mv]
    _finish_table(values, "maximal", ["x", "value", "epsilon"], [x, val, [m.epsilon for m in mv]],
                  {"F*": (x, val), "|F|": (x, np.abs(F(x)))}, logx=False, title=f"maximal function, alpha={alpha:g}")
    return 0


def _write_reports(values, reports):
    out = _out(values)
    for r in reports:
        name = r.experiment if r.experiment != "thm22" else "thm22"
        if r.table:
            keys = list(r.table)
            write_csv(os.path.join(out, f"{name}.csv"), keys, [r.table[k] for k in keys])
        if values.get("svg") and r.table and "ratio" in r.table:
            y = np.asarray(r.table["ratio"], dtype=float)
            write_svg(os.path.join(out, f"{name}.svg"), {"ratio": (np.arange(y.size), y)}, logx=False,
                      title=f"{name}: ratios", xlabel="index", ylabel="ratio")
    path = write_json(os.path.join(out, "report.json"), reports)
    for r in reports:
        print(r.summary())
    print(f"wrote {path}")
    return 0 if all(r.passed for r in reports) else 1


def cmd_multiplier(values):
    reports = [run(hc.build_config("corollary12", _params(values))), run(hc.build_config("remark3", _params(values)))]
    return _write_reports(values, reports)


def _params(values):
    return {k: v for k, v in values.items() if k not in ("out", "svg", "dump_rule")}


def cmd_verify(values, target):
    if target == "all":
        keep = {k: values[k] for k in ("samples", "seed") if k in values}
        configs = [hc.build_config(t, keep) for t in ALL_TARGETS]
    else:
        configs = [hc.build_config(target, _params(values))]
    reports = [run(cfg) for cfg in configs]
    return _write_reports(values, reports)


COMMANDS = {
    "eval-basis": cmd_eval_basis,
    "transform": cmd_transform,
    "fracint": cmd_fracint,
    "kernel-bound": cmd_kernel_bound,
    "conv": cmd_conv,
    "maximal": cmd_maximal,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        values = merged_values(args)
        if values.get("dump_rule"):
            _dump_rules(values, _get(values, "alpha", 0.0))
        if args.command == "verify":
            return cmd_verify(values, args.target)
        if args.command == "multiplier":
            return cmd_multiplier(values)
        return COMMANDS[args.command](values)
    except (ConfigError, ValueError) as exc:
        print(f"lagfrac: error: {exc}", file=sys.stderr)
        return 2
    except LagfracError as exc:
        print(f"lagfrac: failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
