"""Truncation scans over countable pole families, and monotonicity checks.

Both rest on competitor transfer: a disc through the poles of ``A`` is
corrected by one polynomial term so that it also passes through a new
pole, which multiplies the objective by ``|λ_new|^{p_new} < 1``. Feeding
the corrected disc to the estimator as a warm start makes the reported
values monotone by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import List, Optional

import numpy as np

from ..complex_core import DomainError
from ..discs import LIFTS, AnalyticDisc, Competitor, horner, lift_values, mobius_values
from ..domains import Domain
from ..fitting import max_radius
from .estimator import Estimate, OptimizerConfig, certify_dilated, estimate_lempert
from .oracles import objective
from .poles import PoleSchedule, PoleSpec

RING_RADII = (0.3, 0.5, 0.7, 0.85, 0.95, 0.99)
RING_ANGLES = 16
CERTIFY_TOP = 6


def _blocks_for(domain: Domain, representation: str):
    if representation == "exp_lift":
        return [("halfplane", (0,))]
    if representation == "covering_lift":
        return [("modulus", (0,))]
    return domain.blocks()


def _inner_targets(c: Competitor, point, branch_bound: int):
    """Values the stored polynomial must take at the new node, with their branches."""
    rep = c.disc.representation
    if rep == "mobius":
        _, t = mobius_values(c.disc.center, point)
        return [(t[0], None)]
    if rep not in LIFTS:
        return [(np.atleast_1d(np.asarray(point, dtype=complex)), None)]
    z = complex(c.base_point[0])
    out = []
    for k in range(-branch_bound, branch_bound + 1):
        _, (t,) = lift_values(z, [complex(point[0])], [k], rep)
        out.append((np.array([t]), k))
    return out


def _root_candidates(coeffs, target, nodes, min_separation):
    cands = []
    for row, t in zip(coeffs, target):
        c = np.array(row, dtype=complex)
        c[0] -= t
        c = np.trim_zeros(c, "b")
        if c.size < 2:
            continue
        for lam in np.roots(c[::-1]):
            if abs(lam) < 1 and abs(lam) >= min_separation:
                if np.all(np.abs(nodes - lam) >= min_separation):
                    cands.append(complex(lam))
    return cands


def extend_competitor(
    domain: Domain,
    competitor: Competitor,
    spec: PoleSpec,
    new_index: int,
    config: Optional[OptimizerConfig] = None,
) -> Optional[Competitor]:
    """Certified competitor for ``spec`` from one that misses pole ``new_index``.

    With ``ω = ∏(λ - λ_j)`` over the existing nodes the disc
    ``φ + (a - φ(μ)) λ ω(λ) / (μ ω(μ))`` still takes the old values and
    hits ``a`` at ``μ``. Candidates for ``μ`` are preimages of ``a`` under
    the current disc (where the correction vanishes, and is skipped when
    the miss is far below the residual tolerance) and points on rings.
    The best certified result is returned, or None.
    """
    config = config or OptimizerConfig()
    rep = competitor.disc.representation
    coeffs = np.asarray(competitor.disc.coeffs, dtype=complex)
    nodes = competitor.node_values
    point = spec.points[new_index]
    if new_index in competitor.pole_indices:
        raise DomainError(f"competitor already has a node for pole {new_index}")
    blocks = _blocks_for(domain, rep)
    omega = np.array([1.0 + 0j])
    for a in nodes:
        omega = np.convolve(omega, np.array([-a, 1.0]))
    lam_omega = np.concatenate([[0.0], omega])  # λ ω(λ)

    ring = [
        r * np.exp(2j * math.pi * (k + 0.5) / RING_ANGLES)
        for r in RING_RADII
        for k in range(RING_ANGLES)
    ]
    ring = [mu for mu in ring if np.all(np.abs(nodes - mu) >= config.min_separation)]

    scored = []
    for target, branch in _inner_targets(competitor, point, config.branch_bound):
        roots = _root_candidates(coeffs, target, nodes, config.min_separation)
        for mu in roots + ring:
            miss = target - horner(coeffs, mu)
            if np.max(np.abs(miss)) <= 0.1 * config.residual_tol:
                # A preimage: skip the correction, whose denominator can be tiny.
                miss = np.zeros_like(miss)
            corr = miss / (mu * np.polyval(omega[::-1], mu))  # (n,)
            size = max(coeffs.shape[1], lam_omega.shape[0])
            new = np.zeros((coeffs.shape[0], size), dtype=complex)
            new[:, :coeffs.shape[1]] += coeffs
            new[:, :lam_omega.shape[0]] += corr[:, None] * lam_omega[None, :]
            all_nodes = np.concatenate([nodes, [mu]])
            r = max_radius(new, blocks, rep, config.radius_samples)
            top = float(np.abs(all_nodes).max())
            if not r > top:
                continue
            w = np.array([spec.weights[i] for i in competitor.pole_indices] + [spec.weights[new_index]])
            est = float(w @ np.log(np.abs(all_nodes))) - w.sum() * math.log(r)
            scored.append((est, len(scored), new, all_nodes, branch))
    scored.sort(key=lambda s: (s[0], s[1]))

    best = None
    indices = list(competitor.pole_indices) + [new_index]
    for _, _, new, all_nodes, branch in scored[:CERTIFY_TOP]:
        branches = None
        if competitor.branches is not None:
            branches = tuple(competitor.branches) + (branch,)
        disc = AnalyticDisc(new, rep, center=competitor.disc.center)
        r = max_radius(new, blocks, rep, config.cert_samples)
        c = certify_dilated(domain, spec, competitor.base_point, disc, all_nodes, r, config, branches, indices)
        if c is None:
            continue
        val = objective(c, spec)
        if best is None or val < best[0]:
            best = (val, c)
    return None if best is None else best[1]


def reindex_competitor(c: Competitor, mapping) -> Competitor:
    """Rename pole indices through ``mapping`` (old index -> new index)."""
    return replace(c, nodes=tuple((lam, int(mapping[i])) for lam, i in c.nodes))


@dataclass
class TruncationScan:
    estimates: List[Estimate]
    values: List[float]
    monotone: bool
    exhausted: bool
    stopped_at: Optional[int]
    transfers: List[bool] = field(default_factory=list)

    def to_record(self, timing: bool = False) -> dict:
        return {
            "values": self.values,
            "monotone": self.monotone,
            "exhausted": self.exhausted,
            "stopped_at": self.stopped_at,
            "transfers": self.transfers,
            "estimates": [e.to_record(timing=timing) for e in self.estimates],
        }


def nested_scan(
    domain: Domain,
    specs,
    z,
    config: Optional[OptimizerConfig] = None,
    seed: int = 42,
    stop_tol: Optional[float] = None,
) -> TruncationScan:
    """Estimates along nested pole specs, each adding one pole at the end.

    Each estimate is warm-started from the previous best competitor
    extended by one node. Warm starts are never worsened, so the step is
    nonincreasing whenever the extension certifies with a value no larger
    than the previous one; ``transfers`` records exactly that. With ``stop_tol`` the
    scan stops once two successive values differ by less.
    """
    config = config or OptimizerConfig()
    estimates, values, transfers = [], [], []
    stopped_at = None
    prev = None
    for m, spec in enumerate(specs, start=1):
        warm = []
        if prev is not None and prev.competitor is not None:
            ext = extend_competitor(domain, prev.competitor, spec, len(spec) - 1, config)
            transfers.append(ext is not None and objective(ext, spec) <= prev.value)
            if ext is not None:
                warm.append(ext)
        est = estimate_lempert(domain, spec, z, config, seed=seed, warm_starts=warm)
        estimates.append(est)
        values.append(est.value)
        prev = est
        if stop_tol is not None and m > 1 and abs(values[-2] - values[-1]) < stop_tol:
            stopped_at = m
            break
    monotone = all(b <= a for a, b in zip(values, values[1:]))
    return TruncationScan(estimates, values, monotone, False, stopped_at, transfers)


def finite_truncation_scan(
    domain: Domain,
    schedule: PoleSchedule,
    z,
    m_max: int,
    config: Optional[OptimizerConfig] = None,
    seed: int = 42,
    stop_tol: Optional[float] = None,
) -> TruncationScan:
    """Estimates for the truncations ``A_1, ..., A_{m_max}`` of a countable pole set.

    See :func:`nested_scan`. A schedule that runs out of poles ends the
    scan early with ``exhausted`` set.
    """
    if m_max < 1:
        raise DomainError("m_max must be at least 1")
    m_top = min(m_max, schedule.available(m_max))
    specs = (schedule.take(m) for m in range(1, m_top + 1))
    scan = nested_scan(domain, specs, z, config, seed, stop_tol)
    scan.exhausted = m_top < m_max and scan.stopped_at is None
    return scan


@dataclass
class MonotonicityReport:
    estimate_p: Estimate
    estimate_q: Estimate
    transfer_certified: bool

    @property
    def value_p(self) -> float:
        return self.estimate_p.value

    @property
    def value_q(self) -> float:
        return self.estimate_q.value

    @property
    def ordered(self) -> bool:
        return self.value_q <= self.value_p

    def to_record(self, timing: bool = False) -> dict:
        return {
            "value_p": self.value_p,
            "value_q": self.value_q,
            "certified_p": self.estimate_p.certified,
            "certified_q": self.estimate_q.certified,
            "transfer_certified": self.transfer_certified,
            "ordered": self.ordered,
        }


def check_monotonicity(
    domain: Domain,
    spec_p: PoleSpec,
    spec_q: PoleSpec,
    z,
    config: Optional[OptimizerConfig] = None,
    seed: int = 42,
) -> MonotonicityReport:
    """Estimate ``l_D(p, z)`` and ``l_D(q, z)`` for pole functions ``p <= q``.

    The best ``p`` competitor, re-indexed into ``q`` and extended through
    the extra poles of ``q``, warm-starts the ``q`` run. Larger weights
    only shrink ``∏|λ_j|^{q_j}`` and extra nodes add factors below 1, but
    the correction for a new node can cost some dilation radius. So the
    ordering is guaranteed exactly when the transferred competitor
    certifies with a value at most the ``p`` value; that is
    ``transfer_certified``.
    """
    if not spec_q.dominates(spec_p):
        raise DomainError("monotonicity needs p <= q pointwise")
    config = config or OptimizerConfig()
    est_p = estimate_lempert(domain, spec_p, z, config, seed=seed)
    if np.array_equal(spec_p.points, spec_q.points) and spec_p.weights == spec_q.weights:
        # Equal pole lists: the deterministic run is the same.
        return MonotonicityReport(est_p, est_p, est_p.certified)
    warm = []
    if est_p.competitor is not None:
        mapping = {i: spec_q.index_of(a) for i, a in enumerate(spec_p.points)}
        c = reindex_competitor(est_p.competitor, mapping)
        for j in range(len(spec_q)):
            if c is None:
                break
            if j not in mapping.values():
                c = extend_competitor(domain, c, spec_q, j, config)
        if c is not None:
            warm.append(c)
    est_q = estimate_lempert(domain, spec_q, z, config, seed=seed, warm_starts=warm)
    transfer = bool(warm) and objective(warm[0], spec_q) <= est_p.value
    return MonotonicityReport(est_p, est_q, transfer)
