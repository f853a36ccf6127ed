"""Certified upper bounds for weighted multipole Lempert functions on model domains.

Submodules: :mod:`complex_core` (disc primitives), :mod:`domains`,
:mod:`discs` (competitor discs), :mod:`lempert` (objective, estimator,
oracles, scans) and :mod:`experiments` with its command line in :mod:`cli`.
"""

from .complex_core import DomainError
from .domains import Domain, euclidean_ball, polydisc, product, punctured_disc, unit_disc
from .lempert import OptimizerConfig, PoleSchedule, PoleSpec, estimate_lempert

__version__ = "0.1.0"

__all__ = [
    "Domain",
    "DomainError",
    "OptimizerConfig",
    "PoleSchedule",
    "PoleSpec",
    "estimate_lempert",
    "euclidean_ball",
    "polydisc",
    "product",
    "punctured_disc",
    "unit_disc",
]
