"""Compiled inner loop of the coefficient fit.

The fit is run thousands of times per estimate, so the damped Newton
iteration for the log-sum-exp objective is compiled with numba.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit


@njit(cache=True)
def _values(bR, bI, gR, gI, x, linear):
    c, M = bR.shape
    P1 = gR.shape[1]
    g = np.zeros(M)
    if linear:
        return bR[0] + gR @ x
    for k in range(c):
        xk = np.ascontiguousarray(x[k * P1:(k + 1) * P1])
        rR = bR[k] + gR @ xk
        rI = bI[k] + gI @ xk
        g += rR * rR + rI * rI
    return g


@njit(cache=True)
def _lse(g, tau):
    top = g.max()
    e = np.exp((g - top) / tau)
    s = e.sum()
    return top + tau * math.log(s), e / s


@njit(cache=True)
def newton_lse(bR, bI, gR, gI, x, taus, scale, linear, max_steps):
    """Minimize ``τ log Σ_i exp(g_i/τ)`` over ``x`` for each ``τ`` in turn.

    With ``linear`` set, ``g = bR[0] + gR x`` (real part of an affine
    function). Otherwise ``g = Σ_k |b_k + G x_k|^2`` with ``G = gR + i gI``
    and one coefficient block ``x_k`` per row of ``b``. Temperatures are
    ``taus * scale``; the last one is solved more tightly.
    """
    c, M = bR.shape
    P1 = gR.shape[1]
    P = x.shape[0]
    J = np.empty((M, P))
    x = x.copy()
    for level in range(taus.shape[0]):
        tau = taus[level] * scale
        stop = (1e-3 if level == taus.shape[0] - 1 else 1e-2) * tau
        for _ in range(max_steps):
            rR = np.empty((c, M))
            rI = np.empty((c, M))
            if linear:
                g = bR[0] + gR @ x
                J[:, :] = gR
            else:
                g = np.zeros(M)
                for k in range(c):
                    xk = np.ascontiguousarray(x[k * P1:(k + 1) * P1])
                    rR[k] = bR[k] + gR @ xk
                    rI[k] = bI[k] + gI @ xk
                    g += rR[k] * rR[k] + rI[k] * rI[k]
                    for i in range(M):
                        for p in range(P1):
                            J[i, k * P1 + p] = 2.0 * (rR[k, i] * gR[i, p] + rI[k, i] * gI[i, p])
            f, w = _lse(g, tau)
            grad = w @ J
            Jc = J - grad
            Jw = Jc * np.sqrt(w / tau).reshape(M, 1)
            H = Jw.T @ Jw
            if not linear:
                sw = np.sqrt(2.0 * w).reshape(M, 1)
                aR = gR * sw
                aI = gI * sw
                blk = aR.T @ aR + aI.T @ aI
                for k in range(c):
                    H[k * P1:(k + 1) * P1, k * P1:(k + 1) * P1] += blk
            # Near a single active sample H is almost singular; raise the
            # damping until the line search accepts a step.
            mu = 1e-12 * (1.0 + np.trace(H))
            accepted = False
            t = 1.0
            step = np.zeros(P)
            for _ in range(8):
                Hd = H.copy()
                for p in range(P):
                    Hd[p, p] += mu
                step = -np.linalg.solve(Hd, grad)
                dec = -(grad @ step)
                if not dec > stop:
                    break
                if linear:
                    g1 = gR @ step
                    g2 = np.zeros(M)
                else:
                    g1 = np.zeros(M)
                    g2 = np.zeros(M)
                    for k in range(c):
                        dk = np.ascontiguousarray(step[k * P1:(k + 1) * P1])
                        DR = gR @ dk
                        DI = gI @ dk
                        g1 += 2.0 * (rR[k] * DR + rI[k] * DI)
                        g2 += DR * DR + DI * DI
                t = 1.0
                while t > 1e-4:
                    f_new, _ = _lse(g + t * g1 + (t * t) * g2, tau)
                    if f_new <= f - 0.25 * t * dec:
                        accepted = True
                        break
                    t *= 0.5
                if accepted:
                    break
                mu = max(mu * 1e3, 1e-8)
            if not accepted:
                break
            x = x + t * step
    return x


@njit(cache=True)
def _excess(coeffs, u, r, groups, ngroups, halfplane):
    n, N1 = coeffs.shape
    M = u.shape[0]
    worst = -np.inf
    sq = np.zeros(ngroups)
    for i in range(M):
        lam = r * u[i]
        sq[:] = 0.0
        for k in range(n):
            v = coeffs[k, N1 - 1]
            for j in range(N1 - 2, -1, -1):
                v = v * lam + coeffs[k, j]
            if halfplane:
                if v.real > worst:
                    worst = v.real
            else:
                sq[groups[k]] += v.real * v.real + v.imag * v.imag
        if not halfplane:
            for gi in range(ngroups):
                e = math.sqrt(sq[gi]) - 1.0
                if e > worst:
                    worst = e
    return worst


@njit(cache=True)
def radius_search(coeffs, u, groups, ngroups, halfplane, cap, tol):
    """Largest ``r <= cap`` (to within ``tol * cap``) with negative excess at ``u * r``.

    The excess is ``max Re ψ`` with ``halfplane`` set and otherwise the
    largest ``||φ_G|| - 1`` over component groups ``G``. It is
    nondecreasing in ``r``, so bisection applies; 0 if it fails at 0.
    """
    if _excess(coeffs, u, cap, groups, ngroups, halfplane) < 0:
        return cap
    if _excess(coeffs, u, 0.0, groups, ngroups, halfplane) >= 0:
        return 0.0
    lo, hi = 0.0, cap
    while hi - lo > tol * cap:
        mid = 0.5 * (lo + hi)
        if _excess(coeffs, u, mid, groups, ngroups, halfplane) < 0:
            lo = mid
        else:
            hi = mid
    return lo
