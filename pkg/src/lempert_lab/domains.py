"""Model target domains in C^n and containment certificates for discs."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .complex_core import DomainError

KINDS = ("unit_disc", "polydisc", "punctured_disc", "euclidean_ball", "product")

DEFAULT_SAMPLES = 1024
DEFAULT_MIN_MARGIN = 1e-9


@dataclass(frozen=True)
class Domain:
    kind: str
    n: int = 1
    factors: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown domain kind {self.kind!r}")
        if self.kind in ("unit_disc", "punctured_disc") and self.n != 1:
            raise DomainError(f"{self.kind} has dimension 1")
        if self.kind in ("polydisc", "euclidean_ball") and self.n < 1:
            raise DomainError("dimension must be positive")
        if self.kind == "product":
            if not self.factors:
                raise DomainError("product needs at least one factor")
            object.__setattr__(self, "factors", tuple(self.factors))
            object.__setattr__(self, "n", sum(f.dimension for f in self.factors))
        elif self.factors:
            raise DomainError("only product domains carry factors")

    @property
    def dimension(self) -> int:
        return self.n

    def blocks(self):
        """Flatten into ``(block_kind, component_indices)`` pairs.

        Block kinds are ``modulus`` (|w| < 1), ``ball`` (||w||_2 < 1) and
        ``punctured`` (0 < |w| < 1). The sup-norm distance to the
        complement of the domain is the minimum over blocks.
        """
        out = []
        self._collect_blocks(0, out)
        return out

    def _collect_blocks(self, offset, out):
        if self.kind == "unit_disc":
            out.append(("modulus", (offset,)))
        elif self.kind == "punctured_disc":
            out.append(("punctured", (offset,)))
        elif self.kind == "polydisc":
            out.extend(("modulus", (offset + k,)) for k in range(self.n))
        elif self.kind == "euclidean_ball":
            out.append(("ball", tuple(range(offset, offset + self.n))))
        else:
            for f in self.factors:
                f._collect_blocks(offset, out)
                offset += f.dimension

    def to_record(self) -> dict:
        if self.kind in ("unit_disc", "punctured_disc"):
            return {"kind": self.kind}
        if self.kind == "product":
            return {"kind": "product", "factors": [f.to_record() for f in self.factors]}
        return {"kind": self.kind, "n": self.n}

    @classmethod
    def from_record(cls, record) -> "Domain":
        if isinstance(record, str):
            record = {"kind": record}
        kind = record.get("kind")
        if kind == "product":
            return cls("product", factors=tuple(cls.from_record(r) for r in record["factors"]))
        if kind in ("polydisc", "euclidean_ball"):
            return cls(kind, n=int(record.get("n", 1)))
        return cls(kind)


def unit_disc() -> Domain:
    return Domain("unit_disc")


def punctured_disc() -> Domain:
    return Domain("punctured_disc")


def polydisc(n: int) -> Domain:
    return Domain("polydisc", n=n)


def euclidean_ball(n: int) -> Domain:
    return Domain("euclidean_ball", n=n)


def product(*factors: Domain) -> Domain:
    return Domain("product", factors=tuple(factors))


def as_point(domain: Domain, point) -> np.ndarray:
    w = np.atleast_1d(np.asarray(point, dtype=complex)).ravel()
    if w.shape[0] != domain.dimension:
        raise DomainError(
            f"point has dimension {w.shape[0]}, domain has {domain.dimension}"
        )
    return w


def _block_distance(kind, w) -> float:
    # Signed sup-norm distance to the block complement; positive inside.
    if kind == "modulus":
        return 1.0 - abs(w[0])
    if kind == "punctured":
        return min(1.0 - abs(w[0]), abs(w[0]))
    return 1.0 - float(np.linalg.norm(w))


def contains(domain: Domain, point) -> bool:
    w = as_point(domain, point)
    if not np.all(np.isfinite(w)):
        return False
    return all(_block_distance(k, w[list(idx)]) > 0 for k, idx in domain.blocks())


def boundary_distance(domain: Domain, point) -> float:
    """Sup-norm distance from ``point`` to the complement of ``domain``.

    The ball factor uses the Euclidean distance ``1 - ||w||_2``.
    """
    w = as_point(domain, point)
    if not contains(domain, w):
        raise DomainError(f"point {w!r} is not in the domain")
    return min(_block_distance(k, w[list(idx)]) for k, idx in domain.blocks())


@dataclass(frozen=True)
class ContainmentCertificate:
    certified: bool
    margin: float
    method: str

    def __post_init__(self):
        object.__setattr__(self, "certified", bool(self.certified))
        object.__setattr__(self, "margin", float(self.margin))
        if self.certified and not self.margin > 0:
            raise ValueError("a certificate needs a positive margin")

    def to_record(self) -> dict:
        return {"certified": self.certified, "margin": self.margin, "method": self.method}


def _refuse(method):
    return ContainmentCertificate(False, 0.0, method)


def _derivative_bounds(coeffs: np.ndarray, order: int = 1) -> np.ndarray:
    """``Σ k^order |c_k|``: bounds the ``order``-th θ-derivative on the circle."""
    k = np.arange(coeffs.shape[-1]) ** order
    return np.abs(coeffs) @ k


def _degree(row: np.ndarray) -> int:
    nz = np.flatnonzero(row)
    return int(nz[-1]) if nz.size else 0


def _sup_of_square(g_samples: np.ndarray, degree: int, delta: float, first_order: float) -> float:
    """Upper bound for ``sup sqrt(g)`` from samples of a nonnegative trig polynomial ``g``.

    At the maximizer ``g' = 0`` and Bernstein gives ``|g''| <= N^2 sup g``,
    so ``sup g <= max g_s / (1 - (δN)^2 / 2)``. ``first_order`` is the
    alternative bound ``max sqrt(g_s) + δ sup|φ'|``; the smaller one wins.
    """
    best = math.sqrt(g_samples.max()) + first_order
    q = 0.5 * (delta * degree) ** 2
    if q < 1.0:
        best = min(best, math.sqrt(g_samples.max() / (1.0 - q)))
    return best


def certify_disc_in_domain(
    domain: Domain,
    disc,
    samples: int = DEFAULT_SAMPLES,
    min_margin: float = DEFAULT_MIN_MARGIN,
) -> ContainmentCertificate:
    """Certify that ``disc`` maps the closed unit disc into ``domain``.

    Every block function (|φ_k|, ||φ||_2, Re ψ) is subharmonic or harmonic,
    so its maximum over the closed disc is attained on the circle. The
    circle is sampled at ``samples`` points; between samples the values are
    controlled by derivative bounds (coefficient sums, or Bernstein's
    inequality at an extremum). For lifted discs into the punctured disc
    the exponential never vanishes, so the margin is the distance to the
    unit circle. Automorphism-composed discs are certified through their
    inner polynomials. A refusal may be conservative.
    """
    if disc.dimension != domain.dimension:
        raise DomainError("disc and domain dimensions differ")
    coeffs = np.asarray(disc.coeffs, dtype=complex)
    if not np.all(np.isfinite(coeffs)):
        return _refuse("boundary_sampling_plus_modulus")
    delta = math.pi / samples

    if disc.representation in ("exp_lift", "covering_lift"):
        # exp never vanishes, so only the outer bound needs checking.
        if domain.kind != "punctured_disc":
            return _refuse("exponential_lift")
        inner = coeffs[0]
        if disc.representation == "exp_lift":
            h = _circle_values(inner, samples).real
            # Re ψ has zero derivative at its maximum.
            gap = min(delta * _derivative_bounds(inner), 0.5 * delta**2 * _derivative_bounds(inner, 2))
            hi = h.max() + gap
        else:
            # |h| <= s < 1 gives Re cayley(h) = -(1 - |h|^2)/|h - 1|^2 <= -(1 - s^2)/4.
            g = np.abs(_circle_values(inner, samples)) ** 2
            s = _sup_of_square(g, _degree(inner), delta, delta * float(_derivative_bounds(inner)))
            hi = -(1.0 - s * s) / 4.0 if s < 1.0 else 0.0
        margin = -math.expm1(hi) if hi < 0 else 0.0
        ok = margin > min_margin
        return ContainmentCertificate(ok, margin if ok else 0.0, "exponential_lift")

    blocks = domain.blocks()
    if disc.representation == "mobius":
        if any(k != "modulus" for k, _ in blocks):
            return _refuse("boundary_sampling_plus_modulus")
        vals = _circle_values(coeffs, samples)
        gaps = delta * _derivative_bounds(coeffs)
        margin = math.inf
        for k in range(coeffs.shape[0]):
            s = _sup_of_square(np.abs(vals[k]) ** 2, _degree(coeffs[k]), delta, float(gaps[k]))
            if not s < 1.0:
                return _refuse("boundary_sampling_plus_modulus")
            # 1 - |M_c(w)|^2 = (1 - |w|^2)(1 - |c|^2)/|1 + conj(c) w|^2 with |w| <= s.
            c = abs(disc.center[k])
            margin = min(margin, 0.5 * (1.0 - s * s) * (1.0 - c) / (1.0 + c))
        ok = margin > min_margin
        return ContainmentCertificate(ok, float(margin) if ok else 0.0, "boundary_sampling_plus_modulus")

    if all(k != "punctured" for k, _ in blocks):
        # Cheap sufficient test: |φ_k| <= Σ|c| on the closed disc.
        abs_sums = np.abs(coeffs).sum(axis=1)
        margin = min(
            1.0 - (abs_sums[idx[0]] if k == "modulus" else float(np.linalg.norm(abs_sums[list(idx)])))
            for k, idx in blocks
        )
        if margin > min_margin:
            return ContainmentCertificate(True, margin, "coefficient_bound")

    vals = _circle_values(coeffs, samples)
    gaps = delta * _derivative_bounds(coeffs)
    margin = math.inf
    for kind, idx in blocks:
        idx = list(idx)
        g = (np.abs(vals[idx]) ** 2).sum(axis=0)
        degree = max(_degree(coeffs[k]) for k in idx)
        sup = _sup_of_square(g, degree, delta, float(np.linalg.norm(gaps[idx])))
        margin = min(margin, 1.0 - sup)
        if kind == "punctured":
            k = idx[0]
            q = 0.5 * (delta * degree) ** 2
            inner = max(math.sqrt(g.min()) - gaps[k], math.sqrt(max(g.min() - q * sup**2, 0.0)))
            if inner <= 0 or _has_root_in_closed_disc(coeffs[k]):
                return _refuse("boundary_sampling_plus_modulus")
            # Nonvanishing, so the minimum modulus sits on the circle.
            margin = min(margin, inner)
    ok = margin > min_margin
    return ContainmentCertificate(ok, float(margin) if ok else 0.0, "boundary_sampling_plus_modulus")


def _circle_values(coeffs: np.ndarray, samples: int) -> np.ndarray:
    """Values of the polynomial(s) at ``samples`` equispaced circle points."""
    c = np.asarray(coeffs, dtype=complex)
    squeeze = c.ndim == 1
    c = np.atleast_2d(c)
    deg = c.shape[-1]
    if samples >= deg:
        # Inverse FFT of the zero-padded coefficients gives the sampled values exactly.
        padded = np.zeros((c.shape[0], samples), dtype=complex)
        padded[:, :deg] = c
        out = np.fft.ifft(padded, axis=-1) * samples
    else:
        theta = np.exp(2j * np.pi * np.arange(samples) / samples)
        out = c @ np.vander(theta, deg, increasing=True).T
    return out[0] if squeeze else out


def _has_root_in_closed_disc(c: np.ndarray, tol: float = 1e-9) -> bool:
    c = np.trim_zeros(np.asarray(c, dtype=complex), "b")
    if c.size <= 1:
        return c.size == 0 or c[0] == 0
    roots = np.roots(c[::-1])
    return bool(np.any(np.abs(roots) <= 1.0 + tol))
