"""Adaptive 15-point Gauss-Kronrod quadrature (global subdivision)."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

# Kronrod nodes on [0, 1] (symmetric) with Kronrod and embedded Gauss weights.
_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

_NODES = np.concatenate([-_XK[:-1], _XK[::-1]])
_KW = np.concatenate([_WK[:-1], _WK[::-1]])
# Gauss nodes are the odd-indexed Kronrod nodes (1, 3, 5, 7 from the outside in).
_GW = np.zeros(15)
_GW[[1, 3, 5]] = _WG[:3]
_GW[7] = _WG[3]
_GW[[9, 11, 13]] = _WG[2::-1]


class QuadratureError(RuntimeError):
    """Adaptive integration hit the subdivision cap without converging."""


@dataclass(frozen=True)
class QuadResult:
    value: float
    error: float
    intervals: int


def gk15(f: Callable[[float], float], a: float, b: float) -> tuple[float, float]:
    """One Gauss-Kronrod 7/15 panel: (Kronrod estimate, |Kronrod - Gauss|)."""
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    fx = np.array([f(mid + half * x) for x in _NODES], dtype=float)
    k = half * float(fx @ _KW)
    g = half * float(fx @ _GW)
    return k, abs(k - g)


def integrate(
    f: Callable[[float], float],
    a: float,
    b: float,
    *,
    points: Sequence[float] = (),
    epsabs: float = 1e-10,
    epsrel: float = 1e-10,
    max_intervals: int = 10_000,
    strict: bool = True,
) -> QuadResult:
    """Integrate ``f`` over [a, b] by globally adaptive GK15 bisection.

    ``points`` are optional interior breakpoints (kinks, discontinuities)
    used to seed the initial partition.  When the interval cap is reached
    before the error target, :class:`QuadratureError` is raised if
    ``strict``; otherwise the current estimate is returned.
    """
    if b == a:
        return QuadResult(0.0, 0.0, 0)
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    edges = sorted({a, b, *(p for p in points if a < p < b)})
    heap: list[tuple[float, float, float, float]] = []
    total = 0.0
    err = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        v, e = gk15(f, lo, hi)
        total += v
        err += e
        heapq.heappush(heap, (-e, lo, hi, v))
    n = len(heap)
    while err > max(epsabs, epsrel * abs(total)):
        if n >= max_intervals:
            if strict:
                raise QuadratureError(
                    f"no convergence after {n} intervals: value={total:.6g}, err={err:.3g}"
                )
            break
        neg_e, lo, hi, v = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not (lo < mid < hi):
            # interval collapsed to machine resolution; accept its estimate
            heapq.heappush(heap, (0.0, lo, hi, v))
            err += neg_e
            if all(item[0] == 0.0 for item in heap):
                break
            continue
        v1, e1 = gk15(f, lo, mid)
        v2, e2 = gk15(f, mid, hi)
        total += v1 + v2 - v
        err += e1 + e2 + neg_e
        heapq.heappush(heap, (-e1, lo, mid, v1))
        heapq.heappush(heap, (-e2, mid, hi, v2))
        n += 1
    # re-sum to shed accumulated rounding from the running updates
    total = math.fsum(item[3] for item in heap)
    err = math.fsum(-item[0] for item in heap)
    return QuadResult(sign * total, err, n)
