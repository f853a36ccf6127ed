"""Closed-form values of the multipole Lempert function on model domains."""

from __future__ import annotations

import math
import warnings

import numpy as np

from ..complex_core import (
    DomainError,
    cayley,
    cayley_inverse,
    green_disc_multipole,
    mobius_factor,
)
from .poles import PoleSpec


class UnconvergedWarning(RuntimeWarning):
    """The branch search of the covering oracle did not stabilize."""


def objective(competitor, spec: PoleSpec) -> float:
    """``∏ |λ_j|^{p_j}`` over the competitor's nodes.

    The nodes must cover the poles of ``spec`` exactly once each.
    """
    idx = sorted(competitor.pole_indices)
    if idx != list(range(len(spec))):
        raise DomainError("competitor nodes do not match the pole set")
    value = 1.0
    for lam, i in competitor.nodes:
        value *= abs(lam) ** spec.weights[i]
    return value


def log_objective(competitor, spec: PoleSpec) -> float:
    idx = sorted(competitor.pole_indices)
    if idx != list(range(len(spec))):
        raise DomainError("competitor nodes do not match the pole set")
    return float(sum(spec.weights[i] * math.log(abs(lam)) for lam, i in competitor.nodes))


def lempert_disc_oracle(spec: PoleSpec, z) -> float:
    """In the unit disc the weighted Lempert function is the Green product."""
    if spec.dimension != 1:
        raise DomainError("disc oracle needs one-dimensional poles")
    z = complex(np.ravel(z)[0]) if np.ndim(z) else complex(z)
    return green_disc_multipole(zip(spec.points[:, 0], spec.weights), z)


def lempert_product_oracle(spec: PoleSpec, point) -> float:
    """Bidisc poles ``B × {b}`` with unit weights: ``max{g(B, z), m(b, w)}``."""
    if spec.dimension != 2:
        raise DomainError("product oracle needs bidisc poles")
    heights = spec.points[:, 1]
    if not np.all(heights == heights[0]):
        raise DomainError("poles must share their second coordinate")
    if not all(w == 1.0 for w in spec.weights):
        raise DomainError("product oracle is stated for characteristic pole functions")
    z, w = np.asarray(point, dtype=complex).ravel()
    first = green_disc_multipole(zip(spec.points[:, 0], spec.weights), complex(z))
    return max(first, mobius_factor(complex(heights[0]), complex(w)))


def covering_map(lam):
    """Universal covering ``exp ∘ cayley`` of the punctured disc."""
    return np.exp(cayley(lam))


def lift(point: complex, branch: int = 0) -> complex:
    """Lift of ``point`` on sheet ``branch``: ``cayley⁻¹(log a + 2πik)``."""
    point = complex(point)
    if point == 0 or abs(point) >= 1:
        raise DomainError(f"{point!r} is not in the punctured disc")
    return cayley_inverse(np.log(point) + 2j * math.pi * branch)


def punctured_oracle_details(poles, z, branch_bound: int = 50):
    """Value, optimal branches and convergence flag of the covering oracle.

    ``poles`` is a sequence of ``(point, weight)``. The lift of ``z`` is
    fixed on the principal sheet; each pole picks its best sheet within
    ``|k| <= branch_bound`` on its own. The value is reported as
    unconverged if widening the range by 5 changes it.
    """
    if branch_bound < 1:
        raise DomainError("branch bound must be at least 1")
    poles = [(complex(a), float(p)) for a, p in poles]
    if not poles:
        raise DomainError("pole set must be non-empty")
    zl = lift(complex(np.ravel(z)[0]) if np.ndim(z) else complex(z))

    def best(a, p, K):
        ks = np.arange(-K, K + 1)
        vals = [mobius_factor(lift(a, int(k)), zl) ** p for k in ks]
        i = int(np.argmin(vals))
        return vals[i], int(ks[i])

    value, wide, branches = 1.0, 1.0, []
    for a, p in poles:
        v, k = best(a, p, branch_bound)
        value *= v
        branches.append(k)
        wide *= best(a, p, branch_bound + 5)[0]
    return value, tuple(branches), wide == value


def lempert_punctured_oracle(poles, z, branch_bound: int = 50) -> float:
    value, _, converged = punctured_oracle_details(poles, z, branch_bound)
    if not converged:
        warnings.warn("branch search did not stabilize", UnconvergedWarning)
    return value
