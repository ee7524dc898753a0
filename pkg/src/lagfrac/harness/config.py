"""Experiment configuration and parameter-region validation."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace
from fractions import Fraction

from ..errors import ConfigError

THEOREMS = ("thm11", "thm22", "thm31", "lemma21", "corollary12", "remark3", "dilation", "bridge")

# keys accepted in config files, spelled as the CLI flags
FLOAT_KEYS = ("alpha", "sigma", "p", "q", "a", "b", "order", "r", "delta")
INT_KEYS = ("samples", "seed", "degree", "nmax", "kmax", "N", "grid-points", "truncation")
STR_KEYS = ("out", "method", "sequence", "theorem")
BOOL_KEYS = ("svg", "dump-rule")

TOL = 1e-9


class RegionError(ConfigError):
    """A parameter constraint of a theorem fails; ``constraint`` names it."""

    def __init__(self, theorem, constraint, detail=""):
        msg = f"{theorem}: constraint violated: {constraint}"
        super().__init__(msg + (f" ({detail})" if detail else ""))
        self.theorem = theorem
        self.constraint = constraint


def parse_number(text):
    """Float from '0.5', '4/3' or '1e-3'."""
    try:
        return float(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"not a number: {text!r}") from exc


def read_config_file(path):
    """Flat key=value file; '#' starts a comment.  Returns a dict of strings."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    known = set(FLOAT_KEYS + INT_KEYS + STR_KEYS + BOOL_KEYS)
    for num, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{num}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in known:
            raise ConfigError(f"{path}:{num}: unknown key {key!r}")
        out[key] = value
    return out


def convert(key, value):
    if value is None:
        return None
    if key in FLOAT_KEYS:
        return value if isinstance(value, float) else parse_number(str(value))
    if key in INT_KEYS:
        try:
            return int(value)
        except ValueError as exc:
            raise ConfigError(f"{key} must be an integer, got {value!r}") from exc
    if key in BOOL_KEYS:
        if isinstance(value, bool):
            return value
        return str(value).lower() in ("1", "true", "yes", "on")
    return value


@dataclass(frozen=True)
class ExperimentConfig:
    theorem: str
    alpha: float | None = None
    sigma: float | None = None
    p: float | None = None
    q: float | None = None
    a: float = 0.0
    b: float = 0.0
    samples: int = 200
    seed: int = 42
    degree: int = 16
    order: float = 2.0
    N: int = 2
    r: float = 1.0
    nmax: int = 1024
    kmax: int = 4096
    grid_points: int = 200
    truncation: int | None = None
    method: str = "cesaro_sum"
    sequence: str = "power"
    solved: str | None = None
    exploratory: bool = False

    def to_dict(self):
        return {k: v for k, v in asdict(self).items() if v is not None}

    def validated(self):
        if self.theorem not in THEOREMS:
            raise ConfigError(f"unknown theorem {self.theorem!r}; choose from {', '.join(THEOREMS)}")
        if self.samples < 1:
            raise ConfigError("samples must be positive")
        check = _VALIDATORS.get(self.theorem)
        return check(self) if check else self


def _need(cfg, *names):
    missing = [n for n in names if getattr(cfg, n) is None]
    if missing:
        raise ConfigError(f"{cfg.theorem}: missing parameter(s): {', '.join(missing)}")


def _dual(p):
    return p / (p - 1.0)


def _solve_identity(cfg, shift):
    """Fill q or sigma from 1/q = 1/p - (sigma - shift)/(alpha+1)."""
    al, p = cfg.alpha, cfg.p
    if cfg.q is None and cfg.sigma is None:
        raise ConfigError(f"{cfg.theorem}: give q or sigma; the other is solved from the exponent identity")
    if cfg.q is None:
        if cfg.theorem in ("thm11", "thm31") and not 0 < cfg.sigma < al + 1:
            raise RegionError(cfg.theorem, "0 < sigma < alpha+1", f"sigma = {cfg.sigma:.6g}")
        inv = 1.0 / p - (cfg.sigma - shift) / (al + 1.0)
        if not inv > 0:
            raise RegionError(cfg.theorem, "q < inf", f"1/q = {inv:.6g} <= 0")
        return replace(cfg, q=1.0 / inv, solved="q")
    if cfg.sigma is None:
        sigma = shift + (al + 1.0) * (1.0 / p - 1.0 / cfg.q)
        return replace(cfg, sigma=sigma, solved="sigma")
    lhs = 1.0 / cfg.q
    rhs = 1.0 / p - (cfg.sigma - shift) / (al + 1.0)
    if abs(lhs - rhs) > TOL:
        ident = "1/q = 1/p - (sigma-a-b)/(alpha+1)" if shift else "1/q = 1/p - sigma/(alpha+1)"
        raise RegionError(cfg.theorem, ident, f"1/q = {lhs:.6g}, right side = {rhs:.6g}")
    return cfg


def _weighted_region(cfg, name, alpha_rule, alpha_text, strict_pq):
    _need(cfg, "alpha", "p")
    if not alpha_rule(cfg.alpha):
        raise RegionError(name, alpha_text, f"alpha = {cfg.alpha}")
    if not 1 < cfg.p < math.inf:
        raise RegionError(name, "1 < p", f"p = {cfg.p}")
    shift = cfg.a + cfg.b
    cfg = _solve_identity(cfg, shift)
    al, p, q, s = cfg.alpha, cfg.p, cfg.q, cfg.sigma

    def sigma_range():
        if not 0 < s < al + 1:
            raise RegionError(name, "0 < sigma < alpha+1", f"sigma = {s:.6g}")

    # report the constraint on the parameter the user gave, not the solved one
    if cfg.solved != "sigma":
        sigma_range()
    if strict_pq:
        if not p < q < math.inf:
            raise RegionError(name, "1 < p < q < inf", f"p = {p:.6g}, q = {q:.6g}")
    elif not p <= q + TOL or not q < math.inf:
        raise RegionError(name, "1 < p <= q < inf", f"p = {p:.6g}, q = {q:.6g}")
    sigma_range()
    if not cfg.a < (al + 1) / _dual(p) - TOL:
        raise RegionError(name, "a < (alpha+1)/p'", f"a = {cfg.a:.6g}, (alpha+1)/p' = {(al + 1) / _dual(p):.6g}")
    if not cfg.b < (al + 1) / q - TOL:
        raise RegionError(name, "b < (alpha+1)/q", f"b = {cfg.b:.6g}, (alpha+1)/q = {(al + 1) / q:.6g}")
    if not cfg.a + cfg.b >= 0:
        raise RegionError(name, "a+b >= 0", f"a+b = {cfg.a + cfg.b:.6g}")
    return cfg


def _thm11(cfg):
    return _weighted_region(cfg, "thm11", lambda al: al >= 0, "alpha >= 0", False)


def _thm31(cfg):
    cfg = _weighted_region(cfg, "thm31", lambda al: al > -0.5, "alpha > -1/2", False)
    return replace(cfg, exploratory=cfg.alpha < 0)


def _thm22(cfg):
    if cfg.a or cfg.b:
        raise RegionError(cfg.theorem, "a = b = 0", "the dilation check is unweighted")
    _need(cfg, "alpha", "p")
    if not cfg.alpha > -0.5:
        raise RegionError(cfg.theorem, "alpha > -1/2", f"alpha = {cfg.alpha}")
    if not 1 < cfg.p:
        raise RegionError(cfg.theorem, "1 < p", f"p = {cfg.p}")
    cfg = _solve_identity(cfg, 0.0)
    if not cfg.sigma > 0:
        raise RegionError(cfg.theorem, "sigma > 0", f"sigma = {cfg.sigma:.6g}")
    if not cfg.p < cfg.q < math.inf:
        raise RegionError(cfg.theorem, "1 < p < q < inf", f"p = {cfg.p:.6g}, q = {cfg.q:.6g}")
    return replace(cfg, exploratory=cfg.alpha < 0)


def _lemma21(cfg):
    if cfg.alpha is None and cfg.sigma is None:
        return cfg
    _need(cfg, "alpha", "sigma")
    if not cfg.alpha >= 0:
        raise RegionError("lemma21", "alpha >= 0", f"alpha = {cfg.alpha}")
    if not 0 < cfg.sigma < cfg.alpha + 1:
        raise RegionError("lemma21", "0 < sigma < alpha+1", f"sigma = {cfg.sigma}")
    return cfg


def _corollary12(cfg):
    cfg = replace(cfg, sigma=0.5 if cfg.sigma is None else cfg.sigma, alpha=0.0 if cfg.alpha is None else cfg.alpha)
    if not cfg.order > 0:
        raise RegionError("corollary12", "s > 0", f"s = {cfg.order}")
    if cfg.sequence not in ("power", "alternating"):
        raise ConfigError(f"corollary12: sequence must be 'power' or 'alternating', got {cfg.sequence!r}")
    if cfg.nmax < 2:
        raise ConfigError("corollary12: nmax must be at least 2")
    return cfg


def _remark3(cfg):
    cfg = replace(cfg, sigma=1.0 if cfg.sigma is None else cfg.sigma, alpha=0.0 if cfg.alpha is None else cfg.alpha)
    if not cfg.alpha > -1:
        raise RegionError("remark3", "alpha > -1", f"alpha = {cfg.alpha}")
    if not cfg.r >= 1:
        raise RegionError("remark3", "1 <= r", f"r = {cfg.r}")
    if not cfg.sigma > 0:
        raise RegionError("remark3", "sigma > 0", f"sigma = {cfg.sigma}")
    if cfg.N < 0:
        raise RegionError("remark3", "N >= 0", f"N = {cfg.N}")
    return cfg


def _bridge(cfg):
    cfg = replace(cfg, sigma=0.5 if cfg.sigma is None else cfg.sigma, alpha=0.0 if cfg.alpha is None else cfg.alpha)
    if not cfg.alpha >= 0:
        raise RegionError("bridge", "alpha >= 0", f"alpha = {cfg.alpha}")
    if not 0 < cfg.sigma < cfg.alpha + 1:
        raise RegionError("bridge", "0 < sigma < alpha+1", f"sigma = {cfg.sigma}")
    return cfg


_VALIDATORS = {
    "thm11": _thm11,
    "thm22": _thm22,
    "dilation": _thm22,
    "thm31": _thm31,
    "lemma21": _lemma21,
    "corollary12": _corollary12,
    "remark3": _remark3,
    "bridge": _bridge,
}

DEFAULTS = {
    "thm11": dict(alpha=0.0, p=4 / 3, sigma=0.5),
    "thm22": dict(alpha=1.0, p=2.0, sigma=0.8),
    "dilation": dict(alpha=1.0, p=2.0, sigma=0.8),
    "thm31": dict(alpha=1.0, p=2.0, sigma=0.5, a=0.25, b=0.25),
    "lemma21": {},
    "corollary12": {},
    "remark3": {},
    "bridge": {},
}


def build_config(theorem, values):
    """ExperimentConfig from defaults overlaid by ``values`` (flag-name keys)."""
    merged = dict(DEFAULTS.get(theorem, {}))
    if values.get("q") is not None and values.get("sigma") is None:
        # q given alone: sigma is solved, not defaulted
        merged.pop("sigma", None)
    for key, value in values.items():
        if value is None:
            continue
        merged[key.replace("-", "_")] = convert(key.replace("_", "-") if key == "grid_points" else key, value)
    merged.pop("out", None)
    merged.pop("svg", None)
    merged.pop("dump_rule", None)
    merged.pop("theorem", None)
    return ExperimentConfig(theorem=theorem, **merged).validated()
