"""Real elliptic integrals of the first and second kind.

Parameter convention follows DLMF ch. 19:

    F(phi|m) = int_0^phi (1 - m sin^2 t)^(-1/2) dt
    E(phi|m) = int_0^phi (1 - m sin^2 t)^(1/2) dt

Everything is built on Carlson's symmetric integrals R_F and R_D, which
accept negative ``m`` without special handling.

Two families are exposed.  ``ellipk``/``ellipe``/``ellipf``/``ellipeinc``
are strict: they raise :class:`EllipticDomainError` whenever the integrand
would leave the real axis.  The ``*_re`` variants return the real part of
the analytic continuation instead, which is what the closed-form S2/S3
expressions need when ``m > 1``: the integrand is purely imaginary on the
stretch where ``m sin^2 t > 1`` so that stretch contributes nothing to the
real part.

Every function takes an optional ``ctx``: ``None`` computes in double
precision, while an ``mpmath`` context (e.g. ``mpmath.mp``) evaluates the
same algorithms at that context's working precision.
"""

from __future__ import annotations

import math
from types import SimpleNamespace

__all__ = [
    "EllipticDomainError",
    "carlson_rf",
    "carlson_rd",
    "ellipk",
    "ellipe",
    "ellipf",
    "ellipeinc",
    "ellipk_re",
    "ellipe_re",
    "ellipf_re",
    "ellipeinc_re",
    "ellint_K",
    "ellint_E",
    "ellint_F",
    "ellint_E_inc",
]

_EPS = 2.220446049250313e-16

FLOAT_CTX = SimpleNamespace(
    sqrt=math.sqrt, sin=math.sin, cos=math.cos, asin=math.asin, floor=math.floor,
    pi=math.pi, eps=_EPS, mpf=float,
)


def _ctx(ctx):
    return FLOAT_CTX if ctx is None else ctx


def _copysign(x, y):
    return -abs(x) if y < 0 else abs(x)


class EllipticDomainError(ValueError):
    """Raised when a real elliptic integral would be complex or infinite."""


def carlson_rf(x: float, y: float, z: float, ctx=None) -> float:
    """Carlson's R_F(x, y, z); at most one argument may be zero."""
    c = _ctx(ctx)
    sqrt = c.sqrt
    if min(x, y, z) < 0.0:
        raise EllipticDomainError(f"R_F needs nonnegative arguments, got {(x, y, z)}")
    if (x == 0.0) + (y == 0.0) + (z == 0.0) > 1:
        raise EllipticDomainError("R_F diverges with two zero arguments")
    x, y, z = c.mpf(x), c.mpf(y), c.mpf(z)
    a0 = (x + y + z) / 3
    q = (3 * c.eps) ** (-c.mpf(1) / 6) * max(abs(a0 - x), abs(a0 - y), abs(a0 - z))
    a = a0
    f = 1.0
    while q * f >= abs(a):
        sx, sy, sz = sqrt(x), sqrt(y), sqrt(z)
        lam = sx * sy + sx * sz + sy * sz
        x = 0.25 * (x + lam)
        y = 0.25 * (y + lam)
        z = 0.25 * (z + lam)
        a = 0.25 * (a + lam)
        f *= 0.25
    dx = (a - x) / a
    dy = (a - y) / a
    dz = -(dx + dy)
    e2 = dx * dy - dz * dz
    e3 = dx * dy * dz
    return (
        1.0
        - e2 / 10.0
        + e3 / 14.0
        + e2 * e2 / 24.0
        - 3.0 * e2 * e3 / 44.0
    ) / sqrt(a)


def carlson_rd(x: float, y: float, z: float, ctx=None) -> float:
    """Carlson's R_D(x, y, z); ``z`` must be positive, x and y not both zero."""
    c = _ctx(ctx)
    sqrt = c.sqrt
    if min(x, y) < 0.0 or z <= 0.0 or x + y == 0.0:
        raise EllipticDomainError(f"R_D domain error at {(x, y, z)}")
    x, y, z = c.mpf(x), c.mpf(y), c.mpf(z)
    a0 = (x + y + 3 * z) / 5
    q = (c.eps / 4) ** (-c.mpf(1) / 6) * max(abs(a0 - x), abs(a0 - y), abs(a0 - z))
    a = a0
    f = 1.0
    acc = 0.0
    while q * f >= abs(a):
        sx, sy, sz = sqrt(x), sqrt(y), sqrt(z)
        lam = sx * sy + sx * sz + sy * sz
        acc += f / (sz * (z + lam))
        x = 0.25 * (x + lam)
        y = 0.25 * (y + lam)
        z = 0.25 * (z + lam)
        a = 0.25 * (a + lam)
        f *= 0.25
    dx = (a - x) / a
    dy = (a - y) / a
    dz = -(dx + dy) / 3.0
    xy = dx * dy
    zz = dz * dz
    e2 = xy - 6.0 * zz
    e3 = (3.0 * xy - 8.0 * zz) * dz
    e4 = 3.0 * (xy - zz) * zz
    e5 = xy * zz * dz
    series = (
        1.0
        - 3.0 * e2 / 14.0
        + e3 / 6.0
        + 9.0 * e2 * e2 / 88.0
        - 3.0 * e4 / 22.0
        - 9.0 * e2 * e3 / 52.0
        + 3.0 * e5 / 26.0
    )
    return 3 * acc + f * series / (a * sqrt(a))


def ellipk(m: float, ctx=None) -> float:
    """Complete integral of the first kind K(m), m < 1."""
    if m >= 1.0:
        raise EllipticDomainError(f"K(m) is not finite and real for m={m}")
    return carlson_rf(0.0, 1 - m, 1.0, ctx)


def ellipe(m: float, ctx=None) -> float:
    """Complete integral of the second kind E(m), m <= 1."""
    c = _ctx(ctx)
    if m > 1.0:
        raise EllipticDomainError(f"E(m) is complex for m={m}")
    if m == 1.0:
        return c.mpf(1)
    if m == 0.0:
        return c.pi / 2
    y = 1 - m
    return carlson_rf(0.0, y, 1.0, ctx) - m * carlson_rd(0.0, y, 1.0, ctx) / 3


def _reduce(phi, c) -> tuple[int, float]:
    """Split phi = k*pi + psi with psi in [-pi/2, pi/2]."""
    k = int(c.floor(phi / c.pi + 0.5))
    return k, phi - k * c.pi


def _f_principal(s, cs, m, ctx):
    # s >= 0 assumed, 1 - m s^2 >= 0 checked by caller
    if s == 0.0:
        return 0.0
    d = 1 - m * s * s
    return s * carlson_rf(cs * cs, d if d > 0 else 0.0, 1.0, ctx)


def _e_principal(s, cs, m, ctx):
    c = _ctx(ctx)
    if s == 0.0:
        return 0.0
    cc = cs * cs
    d = 1 - m * s * s
    d = d if d > 0 else c.mpf(0)
    if m == 0.0:
        return c.asin(s)
    if cc == 0.0 and d == 0.0:
        # phi = pi/2 with m = 1
        return c.mpf(1)
    return s * carlson_rf(cc, d, 1.0, ctx) - m * s**3 * carlson_rd(cc, d, 1.0, ctx) / 3


def _check_real(phi, m, c) -> None:
    if m > 1.0 and m * c.sin(phi) ** 2 > 1.0 + 1e-15:
        raise EllipticDomainError(f"m*sin^2(phi) > 1 for phi={phi}, m={m}")


def ellipf(phi: float, m: float, ctx=None) -> float:
    """Incomplete integral of the first kind F(phi|m)."""
    c = _ctx(ctx)
    k, psi = _reduce(phi, c)
    _check_real(psi, m, c)
    if k != 0 and m >= 1.0:
        raise EllipticDomainError(f"F(phi|m) not real beyond |phi|>pi/2 for m={m}")
    a = abs(psi)
    val = _copysign(_f_principal(c.sin(a), c.cos(a), m, ctx), psi)
    if k:
        val += 2 * k * ellipk(m, ctx)
    return val


def ellipeinc(phi: float, m: float, ctx=None) -> float:
    """Incomplete integral of the second kind E(phi|m)."""
    c = _ctx(ctx)
    k, psi = _reduce(phi, c)
    _check_real(psi, m, c)
    if k != 0 and m > 1.0:
        raise EllipticDomainError(f"E(phi|m) not real beyond |phi|>pi/2 for m={m}")
    a = abs(psi)
    val = _copysign(_e_principal(c.sin(a), c.cos(a), m, ctx), psi)
    if k:
        val += 2 * k * ellipe(m, ctx)
    return val


# -- real part of the analytic continuation ---------------------------------


def ellipk_re(m: float, ctx=None) -> float:
    """Re K(m); for m > 1 this is K(1/m)/sqrt(m)."""
    if m > 1.0:
        return ellipk(1 / m, ctx) / _ctx(ctx).sqrt(m)
    return ellipk(m, ctx)


def ellipe_re(m: float, ctx=None) -> float:
    """Re E(m); for m > 1 this is sqrt(m) E(1/m) - (m-1)/sqrt(m) K(1/m)."""
    if m > 1.0:
        sm = _ctx(ctx).sqrt(m)
        return sm * ellipe(1 / m, ctx) - (m - 1) / sm * ellipk(1 / m, ctx)
    return ellipe(m, ctx)


def _reciprocal_parts(a, m, ctx):
    """F and E over [0, a] (a in [0, pi/2]) for m > 1, clipped to the real zone."""
    c = _ctx(ctx)
    sm = c.sqrt(m)
    sb = sm * c.sin(a)
    beta = c.asin(sb if sb < 1 else c.mpf(1))
    mi = 1 / m
    fb = ellipf(beta, mi, ctx)
    eb = ellipeinc(beta, mi, ctx)
    return fb / sm, sm * eb - (m - 1) / sm * fb


def ellipf_re(phi: float, m: float, ctx=None) -> float:
    """Re F(phi|m) for any real phi and m < 1 or m > 1."""
    if m <= 1.0:
        return ellipf(phi, m, ctx)
    k, psi = _reduce(phi, _ctx(ctx))
    f, _ = _reciprocal_parts(abs(psi), m, ctx)
    return _copysign(f, psi) + 2 * k * ellipk_re(m, ctx)


def ellipeinc_re(phi: float, m: float, ctx=None) -> float:
    """Re E(phi|m) for any real phi and m."""
    if m <= 1.0:
        return ellipeinc(phi, m, ctx)
    k, psi = _reduce(phi, _ctx(ctx))
    _, e = _reciprocal_parts(abs(psi), m, ctx)
    return _copysign(e, psi) + 2 * k * ellipe_re(m, ctx)


# names used by the public interface description
ellint_K = ellipk
ellint_E = ellipe
ellint_F = ellipf
ellint_E_inc = ellipeinc
