"""Verification reports."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


def _clean(value):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_clean(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isfinite(v):
            return v
        return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")
    return value


@dataclass
class VerificationReport:
    """Outcome of one experiment.

    ``passed`` is derived from the recorded numbers by the runner;
    ``stability`` holds at least one doubling record whenever it passes.
    """

    experiment: str
    config: dict
    ratios: list = field(default_factory=list)
    sup_ratio: float = math.nan
    attaining: object = None
    median: float = math.nan
    stability: dict = field(default_factory=dict)
    passed: bool = False
    seconds: float = 0.0
    notes: list = field(default_factory=list)
    table: dict | None = None

    def to_json(self):
        return _clean({
            "experiment": self.experiment,
            "config": self.config,
            "sup_ratio": self.sup_ratio,
            "attaining": self.attaining,
            "median": self.median,
            "stability": self.stability,
            "pass": self.passed,
            "seconds": round(self.seconds, 3),
            "notes": self.notes,
        })

    def summary(self):
        flag = "PASS" if self.passed else "FAIL"
        return f"{flag} {self.experiment}: sup_ratio={self.sup_ratio:.6g} attaining={self.attaining}"
