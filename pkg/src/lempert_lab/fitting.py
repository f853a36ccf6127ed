"""Fit the free coefficients of an interpolating disc to a model domain.

For fixed nodes the disc ``φ = L + λ ∏(λ - λ_j) Q`` is affine in ``Q``,
and each block function of the domain (``|φ_k|^2``, ``||φ_S||^2``,
``Re ψ``) is convex in ``Q``. We minimize a log-sum-exp smoothing of its
maximum over circle samples by damped Newton steps, lowering the
temperature in stages. The result is only a good disc, not a certified
one; :func:`max_radius` and the certifier decide what it is worth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._kernels import _values, newton_lse, radius_search
from .discs import newton_interpolant, node_polynomial
from .domains import Domain

# Relative temperatures: a quick schedule for the search, a deeper one for final discs.
TAUS_SEARCH = (1e-1, 1e-2, 1e-3)
TAUS_FINAL = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5)
MAX_STEPS = 40


@dataclass
class CircleFit:
    """Coefficient fitter for one domain, free degree and sample count."""

    domain: Domain
    free_degree: int
    samples: int = 128
    representation: str = "polynomial"
    taus: tuple = TAUS_SEARCH

    def __post_init__(self):
        self.blocks = self.domain.blocks()
        self.u = np.exp(2j * np.pi * np.arange(self.samples) / self.samples)
        if self.representation == "exp_lift":
            self.blocks = [("halfplane", (0,))]
        elif self.representation == "covering_lift":
            self.blocks = [("modulus", (0,))]

    def fit(self, nodes, base, targets, warm=None):
        """Return ``(coeffs, state)`` for nodes, base values (n,) and targets (m, n).

        ``state`` may be passed back as ``warm`` for nearby nodes.
        """
        nodes = np.asarray(nodes, dtype=complex)
        base = np.atleast_1d(np.asarray(base, dtype=complex))
        n = base.shape[0]
        x = np.concatenate([[0.0], nodes])
        y = np.concatenate([base[:, None], np.asarray(targets, dtype=complex).reshape(len(nodes), n).T], axis=1)
        L = newton_interpolant(x, y)
        K = self.free_degree
        w = node_polynomial(nodes)
        deg = max(L.shape[1] - 1, len(w) - 2 + K)
        coeffs = np.zeros((n, deg + 1), dtype=complex)
        coeffs[:, :L.shape[1]] = L
        if K == 0:
            return coeffs, None

        u = self.u
        b = np.stack([np.polyval(row[::-1], u) for row in L])  # (n, M)
        A = np.polyval(w[::-1], u)[:, None] * u[:, None] ** np.arange(K)  # (M, K)
        # Real and imaginary parts of dφ/d[Re q, Im q].
        gR = np.ascontiguousarray(np.concatenate([A.real, -A.imag], axis=1))
        gI = np.ascontiguousarray(np.concatenate([A.imag, A.real], axis=1))
        taus = np.asarray(self.taus, dtype=float)
        state = {}
        Q = np.zeros((n, K), dtype=complex)
        for bi, (kind, idx) in enumerate(self.blocks):
            idx = list(idx)
            key = (bi, kind, len(nodes), K)
            x0 = None if warm is None else warm.get(key)
            linear = kind == "halfplane"
            bR = np.ascontiguousarray(b[idx].real)
            bI = np.ascontiguousarray(b[idx].imag)
            size = 2 * K * len(idx)
            # Temperatures scale with the spread of g at Q = 0, so warm
            # and cold starts follow the same schedule.
            g0 = _values(bR, bI, gR, gI, np.zeros(size), linear)
            scale = max(float(g0.max() - g0.mean()), 1e-3)
            if x0 is None:
                xs = newton_lse(bR, bI, gR, gI, np.zeros(size), taus, scale, linear, MAX_STEPS)
            else:
                xs = newton_lse(bR, bI, gR, gI, x0, taus[-2:], scale, linear, MAX_STEPS)
            for j, k in enumerate(idx):
                seg = xs[2 * K * j: 2 * K * (j + 1)]
                Q[k] = seg[:K] + 1j * seg[K:]
            state[key] = xs
        extra = np.stack([np.convolve(w, row) for row in Q])
        coeffs[:, :extra.shape[1]] += extra
        return coeffs, state


def block_excess(coeffs, blocks, representation, points):
    """Largest block excess at ``points``: negative inside the domain.

    For modulus and punctured blocks this is ``|φ_k| - 1``, for the ball
    ``||φ_S|| - 1`` and for exp_lift discs ``Re ψ``.
    """
    vals = coeffs @ (points[None, :] ** np.arange(coeffs.shape[1])[:, None])
    if representation == "exp_lift":
        return float(vals[0].real.max())
    worst = -math.inf
    for kind, idx in blocks:
        if kind == "ball":
            e = np.sqrt((np.abs(vals[list(idx)]) ** 2).sum(axis=0)).max() - 1.0
        else:
            e = np.abs(vals[idx[0]]).max() - 1.0
        worst = max(worst, e)
    return worst


def max_radius(coeffs, blocks, representation, samples=256, r_hi=2.0, tol=1e-10):
    """Largest sampled radius ``r <= r_hi`` with the disc of radius ``r`` inside.

    Block excesses are nondecreasing in the radius (maximum principle), so
    bisection applies. Punctured blocks of polynomial discs are also capped
    by the smallest root modulus. Returns 0 if even tiny radii fail.
    """
    coeffs = np.ascontiguousarray(coeffs, dtype=complex)
    u = np.exp(2j * np.pi * np.arange(samples) / samples)
    cap = r_hi
    if representation != "exp_lift":
        for kind, idx in blocks:
            if kind == "punctured":
                c = np.trim_zeros(coeffs[idx[0]], "b")
                if c.size > 1:
                    cap = min(cap, float(np.abs(np.roots(c[::-1])).min()) * (1 - 1e-9))
                elif c.size == 0 or c[0] == 0:
                    return 0.0

    groups = np.zeros(coeffs.shape[0], dtype=np.int64)
    for g, (kind, idx) in enumerate(blocks):
        groups[list(idx)] = g
    return radius_search(
        coeffs, u, groups, max(len(blocks), 1), representation == "exp_lift", cap, tol
    )
