"""Closed-form secure connection probability.

The eavesdropping event for one UED at polar position (l, phi) relative to
the transmitter, with phi measured from the jammer's bearing, is the
quadratic condition

    A l^2 - 2 l_tj cos(phi) l + B <= 0,
    A = 1 - (y - 1) Pj / (eta Ps),  B = l_tj^2 - (1 - A) H^2.

Integrating its indicator over the half disk of radius r with weights
l, 1 and 3 l^2 gives S1, S2 and S3.  Each has a closed form selected by
a 19-row condition table on (A, B, r, l_tj, H); rows are evaluated in
order and the first match wins.  The closed forms are combined with the
piecewise LoS model into the CDF of Gamma_2 (one UED's 1 + SIR), and the
SCP lower bound integrates F_Gamma2(g / 2^Rt)^n against the density of
Gamma_1 (the legitimate link's 1 + SINR).
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from functools import cached_property

import mpmath

from .los import PiecewiseLoS, piecewise_los_probability
from .quadrature import QuadratureError, integrate
from .scene import NetworkConfig, distance_jd
from .specfun import FLOAT_CTX, ellipe_re, ellipeinc_re, ellipf_re, ellipk_re

# |A| below this (times 1 + l_tj^2/H^2) is routed to the A = 0 rows
A_ZERO_TOL = 1e-9
# relative tolerance for the equality rows (r^2 A = B, l_tj = H, l_tj = sqrt(AB))
EQ_TOL = 1e-12
# l_tj is clamped to at least this fraction of R1
L_TJ_FLOOR = 1e-6

FULL_ROWS = frozenset({5, 13, 19})

_FLOAT = type(FLOAT_CTX)(**vars(FLOAT_CTX), acos=math.acos, atan=math.atan, log=math.log)


def _close(x: float, y: float) -> bool:
    return abs(x - y) <= EQ_TOL * max(abs(x), abs(y), 1e-300)


def _acos(x: float) -> float:
    return math.acos(min(1.0, max(-1.0, x)))


def _asin(x: float) -> float:
    return math.asin(min(1.0, max(-1.0, x)))


@dataclass(frozen=True)
class CaseGeometry:
    """Intermediate quantities of one (A, r, l_tj, H) evaluation."""

    a_coef: float
    b_coef: float
    r: float
    l_tj: float
    h: float
    y: float = math.nan
    eta_linear: float = math.nan

    @property
    def a1(self) -> float:
        return self.a_coef * self.r**2 + self.b_coef

    @property
    def disc(self) -> float:
        """l_tj^2 - A B, the squared radius scale of the eavesdropping region."""
        return self.l_tj**2 - self.a_coef * self.b_coef

    @property
    def modulus(self) -> float:
        return self.l_tj**2 / self.disc

    @property
    def f1(self) -> float:
        ab = self.a_coef * self.b_coef
        return _acos(-math.sqrt(max(ab, 0.0)) / self.l_tj)

    @property
    def f2(self) -> float:
        return _acos(self.a1 / (2.0 * self.r * self.l_tj))

    @property
    def f3(self) -> float:
        return _acos(self.r * self.a_coef / self.l_tj)

    def roots(self, phi: float) -> tuple[float, float] | None:
        """Radial roots (x1, x2) of the boundary quadratic at angle phi, if real."""
        c = self.l_tj * math.cos(phi)
        d = c * c - self.a_coef * self.b_coef
        if d < 0 or self.a_coef == 0:
            return None
        s = math.sqrt(d)
        return (c + s) / self.a_coef, (c - s) / self.a_coef

    @cached_property
    def case_index(self) -> int | None:
        return classify_case(self)


def geometry(a_coef: float, l_tj: float, h: float, r: float, y: float = math.nan,
             eta_linear: float = math.nan) -> CaseGeometry:
    """Build a CaseGeometry, snapping near-zero A to exactly zero."""
    if abs(a_coef) < A_ZERO_TOL * (1.0 + (l_tj / h) ** 2):
        a_coef = 0.0
    b = l_tj**2 - (1.0 - a_coef) * h**2
    return CaseGeometry(a_coef, b, r, l_tj, h, y, eta_linear)


def a_coefficient(y: float, eta_linear: float, cfg: NetworkConfig) -> float:
    return 1.0 - (y - 1.0) * cfg.pj_eff / (eta_linear * cfg.ps_eff)


def effective_l_tj(cfg: NetworkConfig) -> float:
    return max(cfg.l_tj_m, L_TJ_FLOOR * cfg.r1_m)


def case_geometry(y: float, eta_linear: float, r: float, cfg: NetworkConfig) -> CaseGeometry:
    return geometry(a_coefficient(y, eta_linear, cfg), effective_l_tj(cfg), cfg.h_m, r, y, eta_linear)


def classify_case(g: CaseGeometry) -> int | None:
    """Row of the condition table, or None for the zero-mass remainder."""
    A, B, r, ltj, H = g.a_coef, g.b_coef, g.r, g.l_tj, g.h
    r2a = r * r * A
    q1 = (-r2a - B) / (2.0 * r)
    q2 = (r2a + B) / (2.0 * r)
    if A == 0.0:
        if _close(ltj, H):
            return 18
        if ltj > H and (ltj**2 - H**2) / (2.0 * r) <= ltj:
            return 16
        if ltj < H and (H**2 - ltj**2) / (2.0 * r) <= ltj:
            return 17
        if ltj < (H**2 - ltj**2) / (2.0 * r):
            return 19
        return None
    eq = _close(r2a, B)
    sba = math.sqrt(A * B) if A * B >= 0 else math.nan
    on_sba = sba == sba and _close(ltj, sba)
    if A < 0 and B <= 0:
        if r2a < B and not eq and q1 <= ltj and not on_sba:
            return 1
        if eq and q1 <= ltj and not on_sba:
            return 2
        if r2a < B and not eq and sba < ltj < q1:
            return 3
        if r2a > B and not eq and q1 <= ltj:
            return 4
        return 5
    if A > 0 and B >= 0:
        if r2a > B and not eq and q2 <= ltj and not on_sba:
            return 6
        if eq and q2 <= ltj and not on_sba:
            return 7
        if r2a > B and not eq and sba < ltj < q2:
            return 8
        if r2a < B and not eq and q2 <= ltj:
            return 9
        return None
    if A < 0 and B > 0:
        if ltj >= abs(r2a + B) / (2.0 * r):
            return 10
        if -r2a > B and ltj < q1:
            return 11
        return 12
    # A > 0, B < 0
    if -r2a > B and ltj < q1:
        return 13
    if ltj >= abs(r2a + B) / (2.0 * r):
        return 14
    if -r2a < B and ltj < q2:
        return 15
    return None


class _Terms:
    """Lazily evaluated closed-form building blocks for one geometry.

    Only the terms a row needs are computed, so terms whose arguments are
    out of range for that row are never touched.  ``mag`` records the
    largest additive piece seen, which bounds the rounding error of any
    sum built from these terms; ``ctx`` selects float or mpmath arithmetic.
    """

    def __init__(self, g: CaseGeometry, ctx=None):
        self.c = c = _FLOAT if ctx is None else ctx
        self.A = c.mpf(g.a_coef)
        self.l = c.mpf(g.l_tj)
        self.r = c.mpf(g.r)
        self.h = c.mpf(g.h)
        self.B = self.l**2 - (1 - self.A) * self.h**2 if ctx is not None else g.b_coef
        self.a1 = self.A * self.r**2 + self.B
        self.disc = self.l**2 - self.A * self.B
        self.ctx = ctx
        self.mag = 0.0
        # set when an amplitude sits where its integral has a square-root
        # sensitivity; double precision then loses about half its digits
        self.sensitive = False

    def add(self, *parts):
        for p in parts:
            v = abs(float(p))
            if v > self.mag:
                self.mag = v
        return sum(parts[1:], parts[0])

    def _flag_edge(self, x) -> None:
        if self.ctx is None and 1.0 - abs(x) < 1e-6:
            self.sensitive = True

    def _acos(self, x):
        self._flag_edge(x)
        return self.c.acos(min(1, max(-1, x)))

    def _asin(self, x):
        self._flag_edge(x)
        return self.c.asin(min(1, max(-1, x)))

    def _inc(self, fn, phi, turning: bool = False):
        """Incomplete elliptic integral at amplitude phi with the current modulus.

        ``turning`` marks phi = f1 or pi - f1.  When m > 1 those satisfy
        m sin^2 phi = 1 exactly, where the real part equals the complete
        integral; using that avoids the square-root blow-up of rounding
        in phi.
        """
        m = self.m
        if turning and m > 1:
            return ellipk_re(m, self.ctx) if fn is ellipf_re else ellipe_re(m, self.ctx)
        if self.ctx is None and m > 1.0 and abs(1.0 - m * math.sin(phi) ** 2) < 1e-4:
            self.sensitive = True
        return fn(phi, m, self.ctx)

    @cached_property
    def W(self):
        w2 = 4 * self.l**2 * self.r**2 - self.a1**2
        return self.c.sqrt(w2) if w2 > 0 else self.c.mpf(0)

    @cached_property
    def sq(self):
        return self.c.sqrt(self.disc) if self.disc > 0 else self.c.mpf(0)

    @cached_property
    def m(self):
        return self.l**2 / self.disc

    @cached_property
    def f1(self):
        ab = self.A * self.B
        return self._acos(-self.c.sqrt(ab if ab > 0 else 0) / self.l)

    @cached_property
    def f2(self):
        return self._acos(self.a1 / (2 * self.r * self.l))

    # -- area terms
    @cached_property
    def D1(self):
        A, B, l = self.A, self.B, self.l
        x = self.a1 - 2 * B
        acot = self.c.pi / 2 if x == 0 else self.c.atan(self.W / x)
        return (A * B - l * l) / (2 * A * A) * acot

    @cached_property
    def D2(self):
        A, l, r = self.A, self.l, self.r
        return self.add(
            self.c.pi * r * r / 4,
            -self.W / (4 * A),
            -(self.a1 * A - l * l) / (2 * A * A) * self._asin(self.a1 / (2 * l * r)),
        )

    @cached_property
    def D3(self):
        return self.disc * self.c.pi / (2 * self.A**2)

    @cached_property
    def D4(self):
        return (self.a1 - 2 * self.B) * self.W / (4 * self.A**2 * self.r**2)

    # -- A = 0 helpers
    @cached_property
    def hd(self):
        return self.h**2 - self.l**2

    @cached_property
    def W0(self):
        w2 = 4 * self.l**2 * self.r**2 - self.hd**2
        return self.c.sqrt(w2) if w2 > 0 else self.c.mpf(0)

    @cached_property
    def log0(self):
        return self.c.log((self.W0 + 2 * self.l * self.r) / abs(self.hd))

    @cached_property
    def D5(self):
        l, r = self.l, self.r
        return self.add(r * r / 2 * self._acos(self.a1 / (2 * l * r)), self.hd * self.W0 / (8 * l * l))

    # -- arc-length terms
    @cached_property
    def G0(self):
        return 2 * self.sq / (-self.A)

    @cached_property
    def G1(self):
        return self.G0 * self._inc(ellipeinc_re, self.f1, turning=True)

    @cached_property
    def G2(self):
        return self.G0 * ellipe_re(self.m, self.ctx)

    @cached_property
    def G3(self):
        A, r = self.A, self.r
        return self.add(self.W, -2 * A * r * r * self.f2) / (-2 * A * r)

    @cached_property
    def G4(self):
        return self.G0 * self._inc(ellipeinc_re, self.f2) / 2

    @cached_property
    def G5(self):
        return self.G0 * self._inc(ellipeinc_re, self.c.pi - self.f1, turning=True)

    @cached_property
    def G6(self):
        l, r = self.l, self.r
        return self.add(r * self._acos(-self.hd / (2 * l * r)), self.hd / (2 * l) * self.log0)

    # -- l^2-weighted terms
    @cached_property
    def M0(self):
        return self.sq / (-1.5 * self.A**3) if self.ctx is None else self.sq / (-3 * self.A**3 / 2)

    @cached_property
    def coef(self):
        ab = self.A * self.B
        return 4 * ab, 8 * self.l**2 - 7 * ab

    def _fe(self, phi, half: bool = False, turning: bool = False):
        cf, ce = self.coef
        k = self.M0 / 2 if half else self.M0
        return self.add(
            k * cf * self._inc(ellipf_re, phi, turning), k * ce * self._inc(ellipeinc_re, phi, turning)
        )

    @cached_property
    def M1(self):
        return self._fe(self.f2, half=True)

    @cached_property
    def M2(self):
        cf, ce = self.coef
        return self.add(self.M0 * cf * ellipk_re(self.m, self.ctx), self.M0 * ce * ellipe_re(self.m, self.ctx))

    @cached_property
    def M3(self):
        return self._fe(self.f1, turning=True)

    @cached_property
    def M4(self):
        A, B, l, r = self.A, self.B, self.l, self.r
        tail = self.W / self.sq if self.sq > 0 else 0
        k = self.M0 / (4 * r) * tail
        return self.add(r**3 * self.f2, k * A * 2 * self.a1, -k * 9 * A * B, k * 8 * l * l)

    @cached_property
    def M5(self):
        return self.r**3 * self._acos(abs(self.hd) / (-2 * self.l * self.r))

    @cached_property
    def M6(self):
        l, r, hd = self.l, self.r, abs(self.hd)
        return self.add(r * hd * self.W0 / (8 * l * l), hd**3 / (16 * l**3) * self.log0)


def _s1(case: int | None, t: _Terms):
    r, pi = t.r, t.c.pi
    if case in (1, 9, 10):
        return t.add(t.D1, t.D2, -t.D3 / 2)
    if case in (2, 7):
        return t.add(t.D2, t.D4)
    if case in (3, 11):
        return t.add(pi * r * r / 2, -t.D3)
    if case in (4, 6, 14):
        return t.add(t.D1, t.D2, t.D3 / 2)
    if case in FULL_ROWS:
        return pi * r * r / 2
    if case in (8, 15):
        return t.D3
    if case in (16, 17, 18):
        return t.D5
    return t.c.mpf(0)


def _s2(case: int | None, t: _Terms):
    r, pi = t.r, t.c.pi
    if case in (1, 2):
        return t.add(t.G1, -t.G2, t.G3, -t.G4)
    if case == 3:
        return t.add(pi * r, t.G1, -2 * t.G2)
    if case in (4, 14):
        return t.add(t.G3, t.G4, -t.G2)
    if case in FULL_ROWS:
        return pi * r
    if case in (6, 7):
        return t.add(t.G3, t.G4, -t.G5)
    if case == 8:
        return -t.G5
    if case in (9, 10):
        return t.add(t.G3, -t.G4)
    if case == 11:
        return t.add(pi * r, -t.G2)
    if case == 15:
        return -t.G2
    if case in (16, 17):
        return t.G6
    if case == 18:
        return pi * r / 2
    return t.c.mpf(0)


def _s3(case: int | None, t: _Terms):
    full = t.c.pi * t.r**3
    if case in (1, 2):
        return t.add(t.M3, t.M4, -t.M1, -t.M2)
    if case == 3:
        return t.add(full, -2 * t.M2, t.M3)
    if case in (4, 14):
        return t.add(t.M1, -t.M2, t.M4)
    if case in FULL_ROWS:
        return full
    if case in (6, 7):
        return t.add(t.M1, -t.M3, t.M4)
    if case == 8:
        return -t.M3
    if case in (9, 10):
        return t.add(-t.M1, t.M4)
    if case == 11:
        return t.add(full, -t.M2)
    if case == 15:
        return -t.M2
    if case == 16:
        return t.add(full, -t.M5, -t.M6)
    if case == 17:
        return t.add(t.M5, t.M6)
    if case == 18:
        return full / 2
    return t.c.mpf(0)


# rounding error of a closed-form sum is below ROUND_EPS times its largest piece
ROUND_EPS = 1e-13
TARGET_REL = 1e-11
_MAX_DIGITS = 400
_local = threading.local()


def _mp_context(digits: int):
    ctx = getattr(_local, "ctx", None)
    if ctx is None:
        ctx = _local.ctx = mpmath.MPContext()
    ctx.dps = digits
    return ctx


def _evaluate(fn, case, g: CaseGeometry, full: float) -> float:
    """Evaluate one S in floats, escalating precision while cancellation dominates."""
    t = _Terms(g)
    value = float(fn(case, t))
    floor = 1e-14 * full
    digits = 15
    if t.sensitive:
        digits = max(30, int(math.log10(max(t.mag, 1e-300) / max(abs(value), floor))) + 30)
        t = _Terms(g, _mp_context(digits))
        value = float(fn(case, t))
    while ROUND_EPS * 10.0 ** (15 - digits) * t.mag > max(TARGET_REL * abs(value), floor):
        lost = math.log10(t.mag / max(abs(value), floor))
        digits = max(digits + 10, int(lost) + 25)
        if digits > _MAX_DIGITS:
            raise ArithmeticError(f"closed form too ill-conditioned at {g}")
        t = _Terms(g, _mp_context(digits))
        value = float(fn(case, t))
    return value


def s_values(g: CaseGeometry, which: str = "123") -> tuple[float, float, float]:
    """(S1, S2, S3) for a geometry; entries not named in ``which`` are NaN."""
    if g.r <= 0.0 or g.a_coef >= 1.0:
        # a >= 1 means y = 1 or Pj = 0: the eavesdropping region has zero measure
        return 0.0, 0.0, 0.0
    case = g.case_index
    r = g.r
    out = [math.nan, math.nan, math.nan]
    fulls = (math.pi * r * r / 2.0, math.pi * r, math.pi * r**3)
    for k, fn in enumerate((_s1, _s2, _s3)):
        if str(k + 1) in which:
            out[k] = _evaluate(fn, case, g, fulls[k])
    return out[0], out[1], out[2]


def s_values_radial(a_coef: float, h: float, r: float) -> tuple[float, float, float]:
    """(S1, S2, S3) for a jammer directly above the transmitter.

    With l_tj = 0 the condition is A l^2 <= (1 - A) H^2, which depends only
    on l, so each integral is pi times a one-dimensional integral.
    """
    if r <= 0.0 or a_coef >= 1.0:
        return 0.0, 0.0, 0.0
    b = -(1.0 - a_coef) * h * h
    if a_coef > 0.0:
        lo, hi = 0.0, min(r, math.sqrt(-b / a_coef))
    else:
        lo, hi = 0.0, r
    return (
        math.pi * (hi**2 - lo**2) / 2.0,
        math.pi * (hi - lo),
        math.pi * (hi**3 - lo**3),
    )


def indicator_g(y: float, eta_linear: float, l: float, phi: float, cfg: NetworkConfig) -> bool:
    """True when one UED at (l, phi) sees 1 + SIR <= y."""
    if y <= 1.0:
        return False
    ltj = cfg.l_tj_m
    d2 = ltj * ltj + l * l - 2.0 * ltj * l * math.cos(phi)
    if d2 <= 0.0:
        return True
    if cfg.pj_eff == 0.0:
        return False
    sir = eta_linear * cfg.ps_eff * d2 / ((cfg.h_m**2 + l * l) * cfg.pj_eff)
    return 1.0 + sir <= y


def s1(y: float, eta_linear: float, r: float, cfg: NetworkConfig) -> float:
    return s_values(case_geometry(y, eta_linear, r, cfg), "1")[0]


def s2(y: float, eta_linear: float, r: float, cfg: NetworkConfig) -> float:
    return s_values(case_geometry(y, eta_linear, r, cfg), "2")[1]


def s3(y: float, eta_linear: float, r: float, cfg: NetworkConfig) -> float:
    return s_values(case_geometry(y, eta_linear, r, cfg), "3")[2]


# -- conditional CDF pieces ---------------------------------------------------


def _s_pair(y: float, eta_l: float, eta_n: float, r: float, cfg: NetworkConfig, which: str):
    if y <= 1.0 or cfg.pj_eff == 0.0:
        return (0.0, 0.0, 0.0), (0.0, 0.0, 0.0)
    return (
        s_values(case_geometry(y, eta_l, r, cfg), which),
        s_values(case_geometry(y, eta_n, r, cfg), which),
    )


def f_gamma3(y: float, eta_linear: float, r: float, cfg: NetworkConfig) -> float:
    """Mass of {Gamma_2 <= y} inside radius r for a fixed channel state."""
    if y <= 1.0 or cfg.pj_eff == 0.0:
        return 0.0
    s = s_values(case_geometry(y, eta_linear, r, cfg), "1")[0]
    return s / (math.pi * cfg.r1_m**2 / 2.0)


def f_gamma4(y: float, eta_l: float, eta_n: float, r: float, cfg: NetworkConfig,
             p: PiecewiseLoS) -> float:
    """Mass inside radius r when the LoS probability is c1 H / l + c2."""
    (l1, l2, _), (n1, n2, _) = _s_pair(y, eta_l, eta_n, r, cfg, "12")
    c1h = p.c1 * cfg.h_m
    total = p.c2 * l1 + c1h * l2 + (1.0 - p.c2) * n1 - c1h * n2
    return 2.0 * total / (math.pi * cfg.r1_m**2)


def f_gamma5(y: float, eta_l: float, eta_n: float, r: float, cfg: NetworkConfig,
             p: PiecewiseLoS) -> float:
    """Mass inside radius r when the LoS probability is c3 l / H + c4."""
    (l1, _, l3), (n1, _, n3) = _s_pair(y, eta_l, eta_n, r, cfg, "13")
    k = p.c3 / (3.0 * cfg.h_m)
    total = p.c4 * l1 + k * l3 + (1.0 - p.c4) * n1 - k * n3
    return 2.0 * total / (math.pi * cfg.r1_m**2)


def regime(cfg: NetworkConfig, p: PiecewiseLoS) -> int:
    """1..4 according to which LoS branch the disk edge R1 falls in."""
    l1, l2, l3 = p.breakpoints(cfg.h_m)
    r1 = cfg.r1_m
    if r1 < l1:
        return 1
    if r1 < l2:
        return 2
    if r1 < l3:
        return 3
    return 4


def f_gamma2(y: float, cfg: NetworkConfig, p: PiecewiseLoS) -> float:
    """CDF of Gamma_2 for one UED uniform on the disk."""
    if y <= 1.0 or cfg.pj_eff == 0.0:
        return 0.0
    env = cfg.environment
    eta_l, eta_n = env.eta_los, env.eta_nlos
    l1, l2, l3 = p.breakpoints(cfg.h_m)
    r1 = cfg.r1_m
    total = f_gamma3(y, eta_l, min(r1, l1), cfg)
    if r1 > l1:
        total += f_gamma5(y, eta_l, eta_n, min(r1, l2), cfg, p)
        total -= f_gamma5(y, eta_l, eta_n, l1, cfg, p)
    if r1 > l2:
        total += f_gamma4(y, eta_l, eta_n, min(r1, l3), cfg, p)
        total -= f_gamma4(y, eta_l, eta_n, l2, cfg, p)
    if r1 > l3:
        total += f_gamma3(y, eta_n, r1, cfg) - f_gamma3(y, eta_n, l3, cfg)
    return min(1.0, max(0.0, total))


# -- legitimate link ------------------------------------------------------------


def jammer_los_probability(cfg: NetworkConfig, p: PiecewiseLoS) -> float:
    """LoS probability of the jammer-to-receiver air-to-ground link."""
    horiz = math.sqrt(max(distance_jd(cfg) ** 2 - cfg.h_m**2, 0.0))
    return float(piecewise_los_probability(p, cfg.h_m, horiz))


def gamma1_rates(cfg: NetworkConfig, p: PiecewiseLoS) -> tuple[tuple[float, float], tuple[float, float]]:
    """((P_L, Lambda_L), (P_N, Lambda_N)) of the legitimate-link mixture.

    Gamma_1 - 1 is exponential with rate Lambda given the jamming link's
    state; Lambda = l_sd^beta (eta Pj G l_jd^-2 + N0) / (Ps G) with G the
    free-space factor (lambda / 4 pi)^2 shared by both links.
    """
    env = cfg.environment
    g = cfg.fspl_gain
    ljd2 = distance_jd(cfg) ** 2
    lsd_b = cfg.l_sd_m**cfg.beta
    pl = jammer_los_probability(cfg, p)

    def rate(eta: float) -> float:
        return lsd_b * (eta * cfg.pj_eff * g / ljd2 + cfg.n0_w) / (cfg.ps_eff * g)

    return (pl, rate(env.eta_los)), (1.0 - pl, rate(env.eta_nlos))


def f_gamma1_cdf(g1: float, cfg: NetworkConfig, p: PiecewiseLoS) -> float:
    if g1 <= 1.0:
        return 0.0
    return 1.0 - sum(w * math.exp((1.0 - g1) * lam) for w, lam in gamma1_rates(cfg, p))


def f_gamma1_pdf(g1: float, cfg: NetworkConfig, p: PiecewiseLoS) -> float:
    if g1 < 1.0:
        return 0.0
    return sum(w * lam * math.exp((1.0 - g1) * lam) for w, lam in gamma1_rates(cfg, p))


# -- SCP ---------------------------------------------------------------------------


class ConvergenceError(RuntimeError):
    """The SCP quadrature did not reach its error target."""


@dataclass(frozen=True)
class ScpResult:
    scp: float
    gamma1_truncation: float
    quadrature_error_estimate: float
    regime: int
    lower_bound: bool = True
    mc_scp: float | None = None
    mc_ci: tuple[float, float] | None = None


TAIL = 1e-12


def scp(cfg: NetworkConfig, p: PiecewiseLoS, *, epsabs: float = 1e-8,
        max_intervals: int = 10_000) -> ScpResult:
    """Lower bound on the secure connection probability.

    Integrates F_Gamma2(g / 2^Rt)^n f_Gamma1(g) over [1, Gamma_max] with
    Gamma_max chosen so the neglected tail of Gamma_1 is below 1e-12.
    """
    rates = gamma1_rates(cfg, p)
    lam_min = min(lam for w, lam in rates if w > 0)
    noisy = cfg.n0_w > 0.0
    reg = regime(cfg, p)
    if cfg.pj_eff == 0.0:
        # no jamming: the SIR bound on the eavesdroppers is infinite
        return ScpResult(0.0, 1.0, 0.0, reg, noisy)
    if lam_min <= 0.0:
        raise ConvergenceError("Gamma_1 has no finite tail (zero noise and jamming)")
    g_max = 1.0 + math.log(1.0 / TAIL) / lam_min
    scale = 2.0**cfg.rt_bps_hz
    n = cfg.n_eves

    def integrand(g: float) -> float:
        f = f_gamma2(g / scale, cfg, p)
        if f == 0.0:
            return 0.0
        return f**n * f_gamma1_pdf(g, cfg, p)

    # seed the partition on the decay scales of both exponentials
    points = sorted({1.0 + k / lam for _, lam in rates for k in (0.5, 2.0, 8.0)} | {scale})
    try:
        res = integrate(integrand, 1.0, g_max, points=points, epsabs=epsabs, epsrel=0.0,
                        max_intervals=max_intervals)
    except QuadratureError as exc:
        raise ConvergenceError(str(exc)) from None
    value = min(1.0, max(0.0, res.value))
    return ScpResult(value, g_max, res.error, reg, noisy)


def interference_limited(cfg: NetworkConfig) -> NetworkConfig:
    """The same scenario with both receiver noise powers set to zero."""
    return cfg.replace(n0_w=0.0, ne_w=0.0)
