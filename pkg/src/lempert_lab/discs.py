"""Competitor analytic discs.

A disc is stored by its monomial coefficients, one row per component.
Two lifted representations target the punctured disc. For ``exp_lift``
the row holds an inner polynomial ψ into the left half-plane and the disc
is ``exp(ψ)``. For ``covering_lift`` the row holds a polynomial ``h`` into
the unit disc and the disc is ``exp(cayley(h))``, the covering map after
``h``.
For ``mobius`` each row holds a polynomial ``ψ_k`` into the unit disc with
``ψ_k(0) = 0`` and the component is the disc automorphism sending 0 to
``center[k]`` applied to ``ψ_k``. It serves domains built from unit discs,
where it makes the extremal automorphisms exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .complex_core import (
    MIN_NODE_SEPARATION,
    DomainError,
    automorphism,
    automorphism_inverse,
    cayley,
    cayley_inverse,
)
from .domains import ContainmentCertificate

REPRESENTATIONS = ("polynomial", "exp_lift", "covering_lift", "mobius")
LIFTS = ("exp_lift", "covering_lift")


def cnum(w) -> dict:
    w = complex(w)
    return {"re": w.real, "im": w.imag}


def from_cnum(rec) -> complex:
    if isinstance(rec, dict):
        return complex(float(rec.get("re", 0.0)), float(rec.get("im", 0.0)))
    if isinstance(rec, (list, tuple)):
        return complex(float(rec[0]), float(rec[1]))
    return complex(rec)


@dataclass(frozen=True, eq=False)
class AnalyticDisc:
    coeffs: np.ndarray
    representation: str = "polynomial"
    degree_budget: Optional[int] = None
    center: Optional[np.ndarray] = None

    def __post_init__(self):
        c = np.atleast_2d(np.asarray(self.coeffs, dtype=complex))
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        if self.representation not in REPRESENTATIONS:
            raise DomainError(f"unknown representation {self.representation!r}")
        if self.representation == "mobius":
            if self.center is None:
                raise DomainError("mobius discs need a center")
            ctr = np.atleast_1d(np.asarray(self.center, dtype=complex)).ravel()
            if ctr.shape[0] != c.shape[0] or not np.all(np.abs(ctr) < 1):
                raise DomainError("mobius center needs one unit-disc point per component")
            ctr.setflags(write=False)
            object.__setattr__(self, "center", ctr)
        elif self.center is not None:
            raise DomainError("only mobius discs carry a center")
        if self.representation in LIFTS and c.shape[0] != 1:
            raise DomainError(f"{self.representation} discs have dimension 1")
        if self.degree_budget is None:
            object.__setattr__(self, "degree_budget", c.shape[1] - 1)
        elif c.shape[1] > self.degree_budget + 1:
            raise DomainError("coefficient list longer than the degree budget allows")

    @property
    def dimension(self) -> int:
        return self.coeffs.shape[0]

    @property
    def degree(self) -> int:
        return self.coeffs.shape[1] - 1

    def to_record(self) -> dict:
        rec = {
            "representation": self.representation,
            "degree_budget": self.degree_budget,
            "coefficients": [[cnum(c) for c in row] for row in self.coeffs],
        }
        if self.center is not None:
            rec["center"] = [cnum(c) for c in self.center]
        return rec

    @classmethod
    def from_record(cls, rec) -> "AnalyticDisc":
        coeffs = np.array([[from_cnum(c) for c in row] for row in rec["coefficients"]])
        center = rec.get("center")
        if center is not None:
            center = np.array([from_cnum(c) for c in center])
        return cls(coeffs, rec.get("representation", "polynomial"), rec.get("degree_budget"), center)


def constant_disc(point) -> AnalyticDisc:
    return AnalyticDisc(np.atleast_1d(np.asarray(point, dtype=complex))[:, None])


def identity_disc(scale: complex = 1.0) -> AnalyticDisc:
    return AnalyticDisc(np.array([[0.0, scale]], dtype=complex))


def horner(coeffs: np.ndarray, lam) -> np.ndarray:
    """Evaluate coefficient rows (increasing powers) at ``lam``; shape (rows, *lam.shape)."""
    coeffs = np.atleast_2d(coeffs)
    lam = np.asarray(lam, dtype=complex)
    out = np.zeros((coeffs.shape[0],) + lam.shape, dtype=complex)
    for k in range(coeffs.shape[1] - 1, -1, -1):
        out = out * lam + coeffs[:, k].reshape((-1,) + (1,) * lam.ndim)
    return out


def eval_disc_array(disc: AnalyticDisc, lam) -> np.ndarray:
    """Vectorized evaluation without the closed-disc check."""
    vals = horner(disc.coeffs, lam)
    if disc.representation == "exp_lift":
        return np.exp(vals)
    if disc.representation == "covering_lift":
        return np.exp(cayley(vals))
    if disc.representation == "mobius":
        return automorphism(disc.center.reshape((-1,) + (1,) * (vals.ndim - 1)), vals)
    return vals


def eval_disc(disc: AnalyticDisc, lam: complex) -> np.ndarray:
    """Value of the disc at ``lam`` as a length-n complex vector."""
    lam = complex(lam)
    if not abs(lam) <= 1.0 + 1e-12:
        raise DomainError(f"λ {lam!r} lies outside the closed unit disc")
    return eval_disc_array(disc, lam)


def check_nodes(nodes: Sequence[complex], min_separation: float = MIN_NODE_SEPARATION) -> np.ndarray:
    nodes = np.asarray(nodes, dtype=complex).ravel()
    if np.any(~np.isfinite(nodes)) or np.any(np.abs(nodes) >= 1.0):
        raise DomainError("nodes must lie in the open unit disc")
    if np.any(nodes == 0):
        raise DomainError("a node at 0 collides with the base point")
    for i in range(len(nodes)):
        if len(nodes) > 1:
            others = np.delete(nodes, i)
            if np.min(np.abs(others - nodes[i])) < min_separation:
                raise DomainError(f"node {nodes[i]!r} is within {min_separation:g} of another node")
        if abs(nodes[i]) < min_separation:
            raise DomainError(f"node {nodes[i]!r} is within {min_separation:g} of 0")
    return nodes


def newton_interpolant(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Monomial coefficients of the interpolant through ``(x_i, y[:, i])``.

    Divided differences, then expansion of the Newton form; rows of ``y``
    are interpolated independently.
    """
    x = np.asarray(x, dtype=complex)
    dd = np.array(y, dtype=complex, ndmin=2)
    m = len(x)
    table = [dd[:, 0].copy()]
    cur = dd.copy()
    for k in range(1, m):
        cur = (cur[:, 1:] - cur[:, :-1]) / (x[k:] - x[:-k])
        table.append(cur[:, 0].copy())
    coef = np.zeros((dd.shape[0], m), dtype=complex)
    coef[:, 0] = table[m - 1]
    deg = 0
    for k in range(m - 2, -1, -1):
        # coef <- coef * (λ - x_k) + table[k]
        shifted = np.zeros_like(coef)
        shifted[:, 1:deg + 2] = coef[:, :deg + 1]
        shifted[:, :deg + 1] -= x[k] * coef[:, :deg + 1]
        shifted[:, 0] += table[k]
        coef = shifted
        deg += 1
    return coef


def node_polynomial(nodes: np.ndarray) -> np.ndarray:
    """Coefficients of ``λ ∏ (λ - λ_j)`` in increasing powers."""
    w = np.array([0.0, 1.0], dtype=complex)
    for a in nodes:
        w = np.convolve(w, np.array([-a, 1.0], dtype=complex))
    return w


def lift_values(
    z: complex,
    targets: Sequence[complex],
    branches: Sequence[int],
    representation: str = "exp_lift",
):
    """Lifts of the base point and targets for a lifted representation.

    ``exp_lift`` uses ``log z`` and ``log a_j + 2πi k_j`` (principal logs);
    ``covering_lift`` maps those through ``cayley_inverse`` into the disc.
    """
    if complex(z) == 0 or any(complex(a) == 0 for a in targets):
        raise DomainError("lifted targets must avoid 0")
    base = np.log(complex(z))
    lifted = [np.log(complex(a)) + 2j * math.pi * int(k) for a, k in zip(targets, branches)]
    if representation == "covering_lift":
        base = cayley_inverse(base)
        lifted = [cayley_inverse(w) for w in lifted]
    return base, lifted


def mobius_values(z, targets):
    """Base values (zeros) and targets of ``ψ`` for a disc centered at ``z``."""
    z = np.atleast_1d(np.asarray(z, dtype=complex)).ravel()
    targets = np.asarray(targets, dtype=complex).reshape(-1, z.shape[0])
    if np.any(np.abs(z) >= 1) or np.any(np.abs(targets) >= 1):
        raise DomainError("mobius values need points in the unit polydisc")
    return np.zeros_like(z), automorphism_inverse(z[None, :], targets)


def build_interpolating_disc(
    z,
    nodes: Sequence[complex],
    targets,
    free_coeffs=None,
    representation: str = "polynomial",
    branches: Optional[Sequence[int]] = None,
    min_separation: float = MIN_NODE_SEPARATION,
    degree_budget: Optional[int] = None,
) -> AnalyticDisc:
    """Disc ``φ = L + λ ∏(λ - λ_j) Q`` with ``φ(0) = z`` and ``φ(λ_j) = targets[j]``.

    ``L`` interpolates the constraints and ``Q`` has coefficients
    ``free_coeffs`` (one row per component), so the constraints hold for
    any ``Q``. With ``representation="exp_lift"`` the same construction
    is applied to ``ψ`` with ``ψ(0) = log z``, ``ψ(λ_j) = log a_j + 2πi k_j``
    and the disc is ``exp(ψ)``; ``covering_lift`` interpolates the
    ``cayley_inverse`` images of those logs instead. ``mobius`` centers
    the disc at ``z`` and interpolates ``ψ(0) = 0``,
    ``ψ(λ_j) = automorphism_inverse(z, a_j)`` componentwise.
    """
    nodes = check_nodes(nodes, min_separation)
    z = np.atleast_1d(np.asarray(z, dtype=complex)).ravel()
    n = z.shape[0]
    targets = np.asarray(targets, dtype=complex).reshape(len(nodes), n)
    if representation in LIFTS:
        if n != 1:
            raise DomainError(f"{representation} discs have dimension 1")
        if branches is None:
            branches = [0] * len(nodes)
        base, lifted = lift_values(z[0], targets[:, 0], branches, representation)
        z = np.array([base])
        targets = np.array(lifted, dtype=complex).reshape(len(nodes), 1)
    elif representation == "mobius":
        center = z
        z, targets = mobius_values(z, targets)
    elif representation != "polynomial":
        raise DomainError(f"unknown representation {representation!r}")

    x = np.concatenate([[0.0], nodes])
    y = np.concatenate([z[:, None], targets.T], axis=1)
    coeffs = newton_interpolant(x, y)
    if free_coeffs is not None:
        q = np.atleast_2d(np.asarray(free_coeffs, dtype=complex))
        if q.shape[0] != n:
            raise DomainError("free_coeffs needs one row per component")
        if q.shape[1]:
            w = node_polynomial(nodes)
            extra = np.stack([np.convolve(w, row) for row in q])
            size = max(coeffs.shape[1], extra.shape[1])
            out = np.zeros((n, size), dtype=complex)
            out[:, :coeffs.shape[1]] += coeffs
            out[:, :extra.shape[1]] += extra
            coeffs = out
    if degree_budget is None:
        degree_budget = coeffs.shape[1] - 1
    return AnalyticDisc(coeffs, representation, degree_budget, center if representation == "mobius" else None)


@dataclass(frozen=True, eq=False)
class Competitor:
    """A disc with its node preimages ``(λ_j, pole_index)`` and certificate."""

    disc: AnalyticDisc
    base_point: np.ndarray
    nodes: tuple
    certificate: ContainmentCertificate = field(
        default_factory=lambda: ContainmentCertificate(False, 0.0, "boundary_sampling_plus_modulus")
    )
    branches: Optional[tuple] = None

    def __post_init__(self):
        object.__setattr__(self, "base_point", np.atleast_1d(np.asarray(self.base_point, dtype=complex)))
        object.__setattr__(self, "nodes", tuple((complex(l), int(i)) for l, i in self.nodes))
        if self.branches is not None:
            object.__setattr__(self, "branches", tuple(int(k) for k in self.branches))

    @property
    def node_values(self) -> np.ndarray:
        return np.array([l for l, _ in self.nodes], dtype=complex)

    @property
    def pole_indices(self) -> tuple:
        return tuple(i for _, i in self.nodes)

    def residuals(self, points) -> np.ndarray:
        """Interpolation residuals: base point first, then each node against its pole."""
        points = np.asarray(points, dtype=complex)
        vals = eval_disc_array(self.disc, np.concatenate([[0.0], self.node_values]))
        want = np.concatenate([self.base_point[:, None], points[list(self.pole_indices)].T], axis=1)
        return np.max(np.abs(vals - want), axis=0)

    def to_record(self, weights: Optional[Sequence[float]] = None) -> dict:
        rec = {
            "nodes": [{**cnum(l), "pole_index": i} for l, i in self.nodes],
            "weights": None if weights is None else [float(weights[i]) for _, i in self.nodes],
            "base_point": [cnum(w) for w in self.base_point],
            "coefficients": [[cnum(c) for c in row] for row in self.disc.coeffs],
            "representation": self.disc.representation,
            "degree_budget": self.disc.degree_budget,
            "certificate": self.certificate.to_record(),
        }
        if self.disc.center is not None:
            rec["center"] = [cnum(w) for w in self.disc.center]
        if self.branches is not None:
            rec["branches"] = list(self.branches)
        return rec

    @classmethod
    def from_record(cls, rec) -> "Competitor":
        disc = AnalyticDisc.from_record(rec)
        cert = ContainmentCertificate(**rec["certificate"])
        nodes = tuple((from_cnum(n), n["pole_index"]) for n in rec["nodes"])
        return cls(disc, [from_cnum(w) for w in rec["base_point"]], nodes, cert, rec.get("branches"))


def scale_disc(disc: AnalyticDisc, s: float) -> AnalyticDisc:
    """The disc ``λ ↦ φ(sλ)``."""
    powers = s ** np.arange(disc.coeffs.shape[1])
    return AnalyticDisc(disc.coeffs * powers, disc.representation, disc.degree_budget, disc.center)


def shrink_competitor(c: Competitor, s: float) -> Competitor:
    """Reparametrize by ``λ ↦ sλ``: nodes become ``λ_j / s``.

    The image of the closed disc shrinks, so the certificate carries over.
    """
    s = float(s)
    if not s <= 1.0:
        raise DomainError("shrink factor must not exceed 1")
    top = max((abs(l) for l, _ in c.nodes), default=0.0)
    if not s > top:
        raise DomainError(f"shrink factor {s} does not exceed node modulus {top}")
    if s == 1.0:
        return c
    nodes = tuple((l / s, i) for l, i in c.nodes)
    return replace(c, disc=scale_disc(c.disc, s), nodes=nodes)


def restrict_competitor(c: Competitor, subset_indices) -> Competitor:
    """The same disc seen as a competitor for the sub-pole-set ``subset_indices``.

    Pole indices are renumbered to positions in ``sorted(subset_indices)``,
    matching :meth:`PoleSpec.restrict`.
    """
    subset = sorted(set(int(i) for i in subset_indices))
    if not subset:
        raise DomainError("sub-pole-set must be non-empty")
    have = set(c.pole_indices)
    missing = [i for i in subset if i not in have]
    if missing:
        raise DomainError(f"competitor has no node for poles {missing}")
    pos = {p: k for k, p in enumerate(subset)}
    nodes = tuple((l, pos[i]) for l, i in c.nodes if i in pos)
    branches = None
    if c.branches is not None:
        branches = tuple(k for (l, i), k in zip(c.nodes, c.branches) if i in pos)
    return replace(c, nodes=nodes, branches=branches)
