"""Verification experiments, reports and writers."""

from .config import ExperimentConfig, RegionError, build_config, read_config_file
from .report import VerificationReport
from .runners import (
    run,
    run_bridge,
    run_corollary12,
    run_lemma21,
    run_remark3,
    run_thm11,
    run_thm22_dilation,
    run_thm31,
)

__all__ = [
    "ExperimentConfig", "RegionError", "VerificationReport", "build_config", "read_config_file", "run",
    "run_bridge", "run_corollary12", "run_lemma21", "run_remark3", "run_thm11", "run_thm22_dilation", "run_thm31",
]
