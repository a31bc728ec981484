"""Brute-force references for the closed forms.

These integrate the eavesdropping indicator directly: the radial integral
is exact between the roots of the boundary quadratic, and the angular
integral uses scipy's QUADPACK with the known kink angles as breakpoints.
They share no code with the closed-form path.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import quad


def _radial(phi: float, a: float, ltj: float, b: float, r: float, k: int) -> float:
    """Integral over l in [0, r] of l^k where A l^2 - 2 ltj cos(phi) l + B <= 0."""
    c = math.cos(phi)
    pts = [0.0, r]
    if a != 0.0:
        disc = (ltj * c) ** 2 - a * b
        if disc >= 0.0:
            s = math.sqrt(disc)
            for x in ((ltj * c + s) / a, (ltj * c - s) / a):
                if 0.0 < x < r:
                    pts.append(x)
    elif c != 0.0:
        x = b / (2.0 * ltj * c)
        if 0.0 < x < r:
            pts.append(x)
    pts.sort()
    total = 0.0
    for lo, hi in zip(pts[:-1], pts[1:]):
        mid = 0.5 * (lo + hi)
        if a * mid * mid - 2.0 * ltj * c * mid + b <= 0.0:
            total += (hi ** (k + 1) - lo ** (k + 1)) / (k + 1)
    return total


def _kinks(a: float, ltj: float, b: float, r: float) -> list[float]:
    pts = {0.0, 0.5 * math.pi, math.pi}
    if ltj > 0.0:
        cands = [(r * r * a + b) / (2.0 * r * ltj), r * a / ltj]
        if a * b >= 0.0:
            v = math.sqrt(a * b) / ltj
            cands += [v, -v]
        if a == 0.0:
            cands.append(b / (2.0 * r * ltj))
        for v in cands:
            if abs(v) <= 1.0:
                pts.add(math.acos(v))
    return sorted(pts)


def indicator_moment(a: float, ltj: float, h: float, r: float, k: int) -> float:
    """Integral over phi in [0, pi], l in [0, r] of l^k times the indicator."""
    b = ltj * ltj - (1.0 - a) * h * h
    total = 0.0
    edges = _kinks(a, ltj, b, r)
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi - lo < 1e-15:
            continue
        v, _ = quad(_radial, lo, hi, args=(a, ltj, b, r, k), epsabs=1e-13, epsrel=1e-12, limit=500)
        total += v
    return total


def s_values_oracle(a: float, ltj: float, h: float, r: float) -> tuple[float, float, float]:
    return (
        indicator_moment(a, ltj, h, r, 1),
        indicator_moment(a, ltj, h, r, 0),
        3.0 * indicator_moment(a, ltj, h, r, 2),
    )


def disk_cdf_oracle(y: float, cfg, los_prob, n_l: int = 400, n_phi: int = 400) -> float:
    """CDF of Gamma_2 by tensor-product Gauss-Legendre over the disk.

    ``los_prob(l)`` gives the LoS probability at horizontal distance l.
    The indicator is discontinuous, so this is accurate to roughly 1e-4;
    it is a coarse independent check, not a precision reference.
    """
    env = cfg.environment
    xl, wl = np.polynomial.legendre.leggauss(n_l)
    xp, wp = np.polynomial.legendre.leggauss(n_phi)
    l = 0.5 * cfg.r1_m * (xl + 1.0)
    phi = 0.5 * math.pi * (xp + 1.0)
    ll, pp = np.meshgrid(l, phi, indexing="ij")
    d2 = cfg.l_tj_m**2 + ll**2 - 2.0 * cfg.l_tj_m * ll * np.cos(pp)
    ratio = cfg.ps_eff * d2 / ((cfg.h_m**2 + ll**2) * cfg.pj_eff)
    p_l = np.asarray(los_prob(ll))
    mass = p_l * (1.0 + env.eta_los * ratio <= y) + (1.0 - p_l) * (1.0 + env.eta_nlos * ratio <= y)
    w = np.outer(wl * 0.5 * cfg.r1_m * l, wp * 0.5 * math.pi)
    return float(np.sum(mass * w) / (math.pi * cfg.r1_m**2 / 2.0))
