"""Scalar primitives on the unit disc.

Moebius distance factors, finite Blaschke products, the Blaschke
interpolation series and the multipole Green function of the disc.
Everything here is a pure function of its arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np


class DomainError(ValueError):
    """Raised when an input lies outside the domain of an operation."""


# Node separation below which the interpolation series loses digits in B_j(λ_j).
MIN_NODE_SEPARATION = 1e-3


def _check_disc_point(w: complex, name: str = "point") -> complex:
    w = complex(w)
    if not math.isfinite(w.real) or not math.isfinite(w.imag):
        raise DomainError(f"{name} is not finite: {w!r}")
    if abs(w) >= 1.0:
        raise DomainError(f"{name} {w!r} is not in the open unit disc")
    return w


def mobius_factor(a: complex, z: complex) -> float:
    """Pseudo-hyperbolic distance ``|(z - a) / (1 - conj(a) z)|``."""
    a = _check_disc_point(a, "a")
    z = _check_disc_point(z, "z")
    return abs(z - a) / abs(1.0 - a.conjugate() * z)


@dataclass(frozen=True)
class ZeroSequence:
    """Ordered, pairwise distinct zeros in the unit disc.

    A countable family is represented by its first ``len(zeros)`` terms
    together with ``generator_id`` and a declared bound on the partial
    sums of ``1 - |z_j|`` (the Blaschke condition witness).
    """

    zeros: tuple
    generator_id: Optional[str] = None
    blaschke_bound: Optional[float] = None

    def __post_init__(self):
        zs = tuple(_check_disc_point(z, "zero") for z in self.zeros)
        object.__setattr__(self, "zeros", zs)
        for i in range(len(zs)):
            for j in range(i):
                if zs[i] == zs[j]:
                    raise DomainError(f"repeated zero {zs[i]!r}")
        if self.generator_id is not None:
            if self.blaschke_bound is None:
                raise DomainError("countable family needs a Blaschke-condition bound")
            partial = np.cumsum([1.0 - abs(z) for z in zs])
            if len(partial) and partial[-1] > self.blaschke_bound:
                raise DomainError(
                    f"partial sum {partial[-1]:.6g} exceeds declared bound "
                    f"{self.blaschke_bound:.6g}"
                )

    def __len__(self):
        return len(self.zeros)

    @property
    def truncation_length(self) -> int:
        return len(self.zeros)


def _as_zeros(zeros) -> tuple:
    if isinstance(zeros, ZeroSequence):
        return zeros.zeros
    return ZeroSequence(tuple(zeros)).zeros


def blaschke_product(zeros, lam: complex) -> complex:
    """Evaluate the normalized finite Blaschke product with the given zeros.

    Each factor is ``(|a|/a) (a - λ) / (1 - conj(a) λ)``; a zero at the
    origin contributes the factor ``λ``. ``lam`` may lie on the closed
    disc so boundary values can be inspected.
    """
    zs = _as_zeros(zeros)
    lam = complex(lam)
    if not abs(lam) <= 1.0 + 1e-12:
        raise DomainError(f"λ {lam!r} lies outside the closed unit disc")
    out = 1.0 + 0.0j
    for a in zs:
        if a == 0:
            out *= lam
        else:
            out *= (abs(a) / a) * (a - lam) / (1.0 - a.conjugate() * lam)
    return out


def blaschke_product_array(zeros, lam) -> np.ndarray:
    """Vectorized :func:`blaschke_product`; ``lam`` may lie on the closed disc."""
    zs = _as_zeros(zeros)
    lam = np.asarray(lam, dtype=complex)
    out = np.ones_like(lam)
    for a in zs:
        if a == 0:
            out = out * lam
        else:
            out = out * ((abs(a) / a) * (a - lam) / (1.0 - np.conj(a) * lam))
    return out


def blaschke_interpolate(
    nodes,
    values: Sequence[complex],
    weight_exponent: Optional[Callable] = None,
    min_separation: float = MIN_NODE_SEPARATION,
) -> Callable:
    """Return ``g`` with ``g(λ_j) = γ_j`` built from Blaschke products.

    ``g(λ) = exp(ζ(λ)) Σ_j γ_j B_j(λ) / (exp(ζ(λ_j)) B_j(λ_j))`` where
    ``B_j`` vanishes at every node except ``λ_j``. ``ζ`` defaults to 0,
    which is all a finite node set needs.
    """
    zs = _as_zeros(nodes)
    vals = [complex(v) for v in values]
    if len(vals) != len(zs):
        raise DomainError("nodes and values differ in length")
    if not zs:
        raise DomainError("at least one node is required")
    for i in range(len(zs)):
        for j in range(i):
            if abs(zs[i] - zs[j]) < min_separation:
                raise DomainError(
                    f"nodes {zs[j]!r} and {zs[i]!r} closer than {min_separation:g}"
                )
    zeta = weight_exponent if weight_exponent is not None else (lambda lam: 0.0)

    others = [zs[:j] + zs[j + 1:] for j in range(len(zs))]
    denom = [
        np.exp(zeta(zs[j])) * blaschke_product_array(others[j], zs[j])
        for j in range(len(zs))
    ]
    coef = [vals[j] / denom[j] for j in range(len(zs))]

    def g(lam):
        lam_arr = np.asarray(lam, dtype=complex)
        total = np.zeros_like(lam_arr)
        for j in range(len(zs)):
            total = total + coef[j] * blaschke_product_array(others[j], lam_arr)
        total = np.exp(zeta(lam_arr)) * total
        return complex(total) if total.ndim == 0 else total

    return g


def green_disc_multipole(poles, z: complex) -> float:
    """Multipole Green function of the disc, as ``∏ mobius_factor(a_j, z)^{p_j}``.

    ``poles`` is a sequence of ``(point, weight)`` pairs.
    """
    poles = list(poles)
    if not poles:
        raise DomainError("pole set must be non-empty")
    seen = set()
    value = 1.0
    for a, p in poles:
        a = _check_disc_point(a, "pole")
        if a in seen:
            raise DomainError(f"repeated pole {a!r}")
        seen.add(a)
        if not p > 0:
            raise DomainError(f"pole weight must be positive, got {p!r}")
        value *= mobius_factor(a, z) ** p
    return value


def cayley(lam):
    """Disc to left half-plane, ``λ ↦ (λ + 1)/(λ - 1)``."""
    return (lam + 1) / (lam - 1)


def cayley_inverse(w):
    """Left half-plane to disc; the map is an involution."""
    return (w + 1) / (w - 1)


def automorphism(c, w):
    """The disc automorphism ``w ↦ (w + c)/(1 + conj(c) w)``, sending 0 to ``c``."""
    return (w + c) / (1 + np.conj(c) * w)


def automorphism_inverse(c, w):
    """Inverse of :func:`automorphism`, ``w ↦ (w - c)/(1 - conj(c) w)``."""
    return (w - c) / (1 - np.conj(c) * w)


def inverse_square_schedule(t: float, count: int) -> list:
    """Points ``1 - (1 - t)/j**2`` for ``j = 1..count``."""
    if not 0.0 <= t < 1.0:
        raise DomainError("t must lie in [0, 1)")
    return [1.0 - (1.0 - t) / j**2 for j in range(1, count + 1)]


def inverse_square_blaschke_bound(t: float) -> float:
    """Bound on ``Σ (1 - λ_j)`` for :func:`inverse_square_schedule`."""
    return (1.0 - t) * math.pi**2 / 6.0
