"""Certified upper bounds for the weighted Lempert function.

Every reported value is ``∏ |λ_j|^{p_j}`` for an explicit competitor disc
whose containment in the domain has been certified, so it can only
overestimate ``l_D(p, z)``.

The search is a Nelder-Mead simplex over node positions with random
restarts. For each node configuration the free coefficients are fitted by
:class:`~lempert_lab.fitting.CircleFit` and the disc is then dilated by
the largest radius that keeps it inside the domain.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import asdict, dataclass, field, replace
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from ..complex_core import DomainError, cayley_inverse
from ..discs import (
    AnalyticDisc,
    Competitor,
    LIFTS,
    lift_values,
    mobius_values,
    scale_disc,
    shrink_competitor,
)
from ..domains import Domain, certify_disc_in_domain
from ..fitting import TAUS_FINAL, CircleFit, max_radius
from .oracles import objective
from .poles import PoleSpec

PENALTY = 10.0


@dataclass
class OptimizerConfig:
    restarts: int = 32
    max_iter: int = 2000
    free_degree: int = 12
    branch_bound: int = 5
    branch_exhaustive_limit: int = 1024
    branch_refine: int = 2
    fit_samples: Optional[int] = None
    radius_samples: int = 128
    cert_samples: int = 1024
    max_cert_samples: int = 16384
    shrink: float = 1.0 - 1e-6
    min_margin: float = 1e-9
    min_separation: float = 1e-3
    node_cap: float = 1.0 - 1e-6
    residual_tol: float = 1e-10
    xatol: float = 1e-4
    fatol: float = 1e-5
    simplex_step: float = 0.1
    representation: str = "auto"

    @classmethod
    def from_dict(cls, d) -> "OptimizerConfig":
        d = dict(d or {})
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise DomainError(f"unknown optimizer keys: {sorted(unknown)}")
        return cls(**d)


@dataclass
class Estimate:
    value: float
    competitor: Optional[Competitor]
    certified: bool
    restarts_used: int
    iterations: int
    seed: int
    runtime_ms: float
    diagnostics: dict = field(default_factory=dict)

    def to_record(self, spec: Optional[PoleSpec] = None, timing: bool = False) -> dict:
        rec = {
            "value": self.value,
            "certified": self.certified,
            "restarts_used": self.restarts_used,
            "iterations": self.iterations,
            "seed": self.seed,
            "runtime_ms": round(self.runtime_ms, 3) if timing else None,
            "margin": None if self.competitor is None else self.competitor.certificate.margin,
            "diagnostics": self.diagnostics,
        }
        if self.competitor is not None:
            rec["competitor"] = self.competitor.to_record(None if spec is None else spec.weights)
        return rec


def choose_representation(domain: Domain, config: OptimizerConfig) -> str:
    """``auto`` picks covering lifts for the punctured disc, automorphism-composed
    discs for products of unit discs and plain polynomials otherwise."""
    all_modulus = all(k == "modulus" for k, _ in domain.blocks())
    if config.representation == "auto":
        if domain.kind == "punctured_disc":
            return "covering_lift"
        return "mobius" if all_modulus else "polynomial"
    if config.representation in LIFTS and domain.kind != "punctured_disc":
        raise DomainError(f"{config.representation} discs only target the punctured disc")
    if config.representation == "mobius" and not all_modulus:
        raise DomainError("mobius discs need a product of unit discs")
    return config.representation


class NodeObjective:
    """``Σ p_j log|λ_j| - P log r*`` as a function of squashed node coordinates.

    ``r*`` is the largest radius whose dilation keeps the fitted disc in the
    domain, so every finite negative value belongs to a valid competitor.
    """

    def __init__(self, domain, spec, z, config, representation="polynomial", branches=None):
        self.domain = domain
        self.spec = spec
        self.z = z
        self.config = config
        self.representation = representation
        self.branches = branches
        self.weights = np.asarray(spec.weights)
        self.total = float(self.weights.sum())
        m, n = len(spec), domain.dimension
        if representation in LIFTS:
            base, lifted = lift_values(z[0], spec.points[:, 0], branches, representation)
            self.base = np.array([base])
            self.targets = np.array(lifted, dtype=complex)[:, None]
        elif representation == "mobius":
            self.base, self.targets = mobius_values(z, spec.points)
        else:
            self.base = z
            self.targets = spec.points
        K = config.free_degree
        samples = config.fit_samples or max(64, 4 * (m + K + 2))
        self.fitter = CircleFit(domain, K, samples, representation)
        self.final_fitter = CircleFit(domain, K, 2 * samples, representation, TAUS_FINAL)
        self.blocks = self.fitter.blocks
        self.reset()

    def reset(self):
        self.evaluations = 0
        self.best = (math.inf, None)

    # node coordinates <-> unconstrained reals
    def nodes_from_x(self, x):
        u = x[0::2] + 1j * x[1::2]
        rho = np.abs(u)
        scale = np.where(rho > 0, self.config.node_cap * np.tanh(rho) / np.where(rho > 0, rho, 1.0), 0.0)
        return u * scale

    def x_from_nodes(self, nodes):
        nodes = np.asarray(nodes, dtype=complex)
        rho = np.abs(nodes) / self.config.node_cap
        rho = np.clip(rho, 0.0, 1.0 - 1e-15)
        u = np.where(rho > 0, nodes * np.arctanh(rho) / np.where(rho > 0, np.abs(nodes), 1.0), 0.0)
        x = np.empty(2 * len(nodes))
        x[0::2], x[1::2] = u.real, u.imag
        return x

    @staticmethod
    def separation(nodes) -> float:
        sep = float(np.abs(nodes).min())
        if len(nodes) > 1:
            d = np.abs(nodes[:, None] - nodes[None, :])
            d[np.diag_indices_from(d)] = np.inf
            sep = min(sep, float(d.min()))
        return sep

    def fit(self, nodes):
        # Always a cold fit: the objective must not depend on the evaluation history.
        return self.fitter.fit(nodes, self.base, self.targets)

    def value_of(self, nodes, coeffs) -> float:
        r = max_radius(coeffs, self.blocks, self.representation, self.config.radius_samples, tol=1e-8)
        top = float(np.abs(nodes).max())
        if not r > top:
            return PENALTY * 0.1 + self.total * math.log(top / max(r, 1e-300))
        return float(self.weights @ np.log(np.abs(nodes))) - self.total * math.log(r)

    def __call__(self, x) -> float:
        self.evaluations += 1
        nodes = self.nodes_from_x(np.asarray(x, dtype=float))
        sep = self.separation(nodes)
        if sep < self.config.min_separation:
            return PENALTY + (self.config.min_separation - sep) / self.config.min_separation
        coeffs, _ = self.fit(nodes)
        if not np.all(np.isfinite(coeffs)):
            return 2 * PENALTY
        f = self.value_of(nodes, coeffs)
        if f < self.best[0]:
            self.best = (f, nodes.copy())
        return f

    def finalize(self, nodes) -> Optional[Competitor]:
        """Refit from scratch, dilate, shrink and certify; None if that fails."""
        cfg = self.config
        nodes = np.asarray(nodes, dtype=complex)
        if self.separation(nodes) < cfg.min_separation:
            return None
        coeffs, _ = self.final_fitter.fit(nodes, self.base, self.targets)
        if not np.all(np.isfinite(coeffs)):
            return None
        center = self.z if self.representation == "mobius" else None
        disc = AnalyticDisc(coeffs, self.representation, center=center)
        r = max_radius(coeffs, self.blocks, self.representation, cfg.cert_samples)
        return certify_dilated(
            self.domain, self.spec, self.z, disc, nodes, r, cfg, self.branches
        )


def certify_dilated(domain, spec, z, disc, nodes, r, config, branches=None, pole_indices=None):
    """Competitor ``φ(ρ s λ)`` for the largest ``ρ <= r`` that certifies.

    ``s`` is the configured shrink factor, applied through
    :func:`shrink_competitor` after the dilation.
    """
    nodes = np.asarray(nodes, dtype=complex)
    top = float(np.abs(nodes).max())
    if pole_indices is None:
        pole_indices = range(len(nodes))
    rho = r
    for k in range(60):
        if not rho * config.shrink > top:
            return None
        c0 = Competitor(
            scale_disc(disc, rho),
            z,
            tuple(zip(nodes / rho, pole_indices)),
            branches=branches,
        )
        c = shrink_competitor(c0, config.shrink)
        samples = config.cert_samples
        while True:
            cert = certify_disc_in_domain(domain, c.disc, samples, config.min_margin)
            if cert.certified or samples >= config.max_cert_samples:
                break
            samples *= 4
        if cert.certified:
            c = replace(c, certificate=cert)
            if np.max(c.residuals(spec.points)) < config.residual_tol:
                return c
            return None
        rho *= 1.0 - 1e-7 * 2.0**k
    return None


def heuristic_nodes(base, targets, min_separation=1e-3, radius=0.7):
    """Nodes proportional to a complex projection of ``targets - base``.

    The projection is onto the leading singular direction, so nearly
    collinear pole configurations keep their shape.
    """
    D = np.asarray(targets, dtype=complex) - np.asarray(base, dtype=complex)[None, :]
    m = D.shape[0]
    U, S, _ = np.linalg.svd(D.T, full_matrices=False)
    proj = D @ U[:, 0].conj()
    if not np.max(np.abs(proj)) > 0:
        proj = np.exp(2j * np.pi * np.arange(m) / m)
    nodes = radius * proj / np.max(np.abs(proj))
    floor = max(0.05, 4 * min_separation)
    for j in range(m):
        if abs(nodes[j]) < floor:
            nodes[j] = floor * np.exp(1j * (0.7 + 2.0 * j))
        for i in range(j):
            if abs(nodes[j] - nodes[i]) < floor:
                nodes[j] = nodes[j] * np.exp(1j * 0.3) * 0.97
    return nodes


def mobius_nodes(base, targets, representation="polynomial", weights=None, min_separation=1e-3):
    """Nodes of the disc automorphism through the base point, per component.

    For one pole in the unit disc this is the extremal node. Among the
    components giving separated nodes the one with the largest weighted
    product is used (it bounds the value from below). None if no
    component qualifies.
    """
    base = np.atleast_1d(np.asarray(base, dtype=complex))
    targets = np.asarray(targets, dtype=complex).reshape(-1, base.shape[0])
    if representation == "exp_lift":
        base, targets = cayley_inverse(base), cayley_inverse(targets)
    weights = np.ones(targets.shape[0]) if weights is None else np.asarray(weights, dtype=float)
    best, out = -math.inf, None
    for k in range(base.shape[0]):
        z, a = base[k], targets[:, k]
        if abs(z) >= 1 or np.any(np.abs(a) >= 1):
            continue
        nodes = (a - z) / (1 - np.conj(z) * a)
        if NodeObjective.separation(nodes) < min_separation:
            continue
        score = float(weights @ np.log(np.abs(nodes)))
        if score > best:
            best, out = score, nodes
    return out


def random_nodes(rng, m, radius=0.95):
    rho = radius * np.sqrt(rng.uniform(0.05, 1.0, m))
    return rho * np.exp(2j * np.pi * rng.uniform(size=m))


def _nelder_mead(fun, x0, config):
    dim = len(x0)
    simplex = np.vstack([x0] + [x0 + config.simplex_step * np.eye(dim)[i] for i in range(dim)])
    res = minimize(
        fun,
        x0,
        method="Nelder-Mead",
        options={
            "maxiter": config.max_iter,
            "maxfev": 3 * config.max_iter,
            "xatol": config.xatol,
            "fatol": config.fatol,
            "adaptive": dim > 4,
            "initial_simplex": simplex,
        },
    )
    return res.x, int(res.nit)


def branch_candidates(m: int, bound: int, limit: int):
    """All branch vectors in ``[-bound, bound]^m`` when few enough, else None."""
    count = (2 * bound + 1) ** m
    if count > limit:
        return None
    return [tuple(k) for k in itertools.product(range(-bound, bound + 1), repeat=m)]


def _screen_branches(domain, spec, z, config, rep):
    """Order branch vectors by the objective at the heuristic start."""
    m = len(spec)

    def score(branches):
        obj = NodeObjective(domain, spec, z, config, rep, branches)
        nodes = heuristic_nodes(obj.base, obj.targets, config.min_separation)
        return obj(obj.x_from_nodes(nodes))

    combos = branch_candidates(m, config.branch_bound, config.branch_exhaustive_limit)
    if combos is not None:
        scored = sorted((score(b), i, b) for i, b in enumerate(combos))
        return [b for _, _, b in scored[: config.branch_refine]], len(combos)
    # Coordinate descent over branch vectors starting from the principal sheet.
    cur = (0,) * m
    best = score(cur)
    tried = 1
    improved = True
    while improved:
        improved = False
        for j in range(m):
            for step in (-1, 1):
                cand = list(cur)
                cand[j] += step
                if abs(cand[j]) > config.branch_bound:
                    continue
                s = score(tuple(cand))
                tried += 1
                if s < best:
                    best, cur, improved = s, tuple(cand), True
    return [cur], tried


def estimate_lempert(
    domain: Domain,
    spec: PoleSpec,
    z,
    config: Optional[OptimizerConfig] = None,
    seed: int = 42,
    warm_starts: Sequence[Competitor] = (),
) -> Estimate:
    """Certified upper bound for ``l_D(p, z)`` with its witnessing competitor.

    Warm-start competitors for the same pole list are kept as candidates
    unchanged, so the result is never worse than the best of them. If no
    competitor certifies, the trivial bound 1 is returned uncertified.
    """
    t0 = time.perf_counter()
    config = config or OptimizerConfig()
    z = spec.check_against(domain, z)
    rep = choose_representation(domain, config)
    m = len(spec)

    candidates = []  # (value, order, competitor)
    order = itertools.count()
    for w in warm_starts:
        if not w.certificate.certified or sorted(w.pole_indices) != list(range(m)):
            continue
        if np.max(w.residuals(spec.points)) >= config.residual_tol:
            continue
        if not np.allclose(w.base_point, z, rtol=0, atol=config.residual_tol):
            continue
        candidates.append((objective(w, spec), next(order), w))

    diagnostics = {"representation": rep}
    if rep in LIFTS:
        combos, screened = _screen_branches(domain, spec, z, config, rep)
        for w in warm_starts:
            if w.branches is not None and tuple(w.branches) not in combos and len(w.branches) == m:
                combos.append(tuple(w.branches))
        diagnostics["branches_screened"] = screened
    else:
        combos = [None]

    iterations = 0
    evaluations = 0
    restarts_used = 0
    for ci, branches in enumerate(combos):
        obj = NodeObjective(domain, spec, z, config, rep, branches)
        starts = []
        for w in warm_starts:
            if sorted(w.pole_indices) != list(range(m)):
                continue
            if rep in LIFTS and (w.branches is None or tuple(w.branches) != tuple(branches)):
                continue
            nodes = np.empty(m, dtype=complex)
            for lam, i in w.nodes:
                nodes[i] = lam
            starts.append(nodes)
        mob = mobius_nodes(obj.base, obj.targets, rep, spec.weights, config.min_separation)
        if mob is not None:
            starts.append(mob)
        starts.append(heuristic_nodes(obj.base, obj.targets, config.min_separation))
        for r in range(max(config.restarts - len(starts), 0)):
            rng = np.random.default_rng([seed, ci, r])
            starts.append(random_nodes(rng, m))
        for nodes0 in starts:
            obj.reset()
            x, nit = _nelder_mead(obj, obj.x_from_nodes(nodes0), config)
            iterations += nit
            evaluations += obj.evaluations
            restarts_used += 1
            best_nodes = obj.best[1]
            if best_nodes is None:
                continue
            c = obj.finalize(best_nodes)
            if c is not None:
                candidates.append((objective(c, spec), next(order), c))

    diagnostics["evaluations"] = evaluations
    runtime = 1000.0 * (time.perf_counter() - t0)
    if not candidates:
        return Estimate(1.0, None, False, restarts_used, iterations, seed, runtime, diagnostics)
    value, _, best = min(candidates, key=lambda t: (t[0], t[1]))
    if best.branches is not None:
        diagnostics["branches"] = list(best.branches)
    return Estimate(value, best, True, restarts_used, iterations, seed, runtime, diagnostics)
