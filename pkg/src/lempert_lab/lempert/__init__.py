"""Weighted multipole Lempert function: objective, estimator, oracles, scans."""

from .estimator import Estimate, OptimizerConfig, estimate_lempert
from .oracles import (
    UnconvergedWarning,
    lempert_disc_oracle,
    lempert_product_oracle,
    lempert_punctured_oracle,
    objective,
    punctured_oracle_details,
)
from .poles import PoleSchedule, PoleSpec, single_pole
from .scans import (
    MonotonicityReport,
    TruncationScan,
    check_monotonicity,
    extend_competitor,
    finite_truncation_scan,
    nested_scan,
)

__all__ = [
    "Estimate",
    "MonotonicityReport",
    "TruncationScan",
    "check_monotonicity",
    "extend_competitor",
    "finite_truncation_scan",
    "nested_scan",
    "OptimizerConfig",
    "PoleSchedule",
    "PoleSpec",
    "UnconvergedWarning",
    "estimate_lempert",
    "lempert_disc_oracle",
    "lempert_product_oracle",
    "lempert_punctured_oracle",
    "objective",
    "punctured_oracle_details",
    "single_pole",
]
