"""Self-checks of the closed forms against independent numerical routes.

Used by the ``validate`` subcommand and by the test-suite.  Each check
returns a :class:`Check`; nothing here raises on a failed comparison.
"""

from __future__ import annotations

import collections
import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import quad

from . import specfun
from .analytic import classify_case, f_gamma2, geometry, interference_limited, s_values, scp
from .los import PiecewiseLoS
from .mc import gamma2_samples, ks_distance, simulate_scp
from .oracle import s_values_oracle
from .scene import NetworkConfig

SIGN_PATTERNS = ("--", "-+", "++", "+-")
ROWS = tuple(range(1, 20))
# rows that sit on an equality or on A = 0 are never hit by continuous draws
CONSTRUCTED_ROWS = frozenset({2, 7, 16, 17, 18, 19})


@dataclass
class Check:
    name: str
    passed: bool
    value: float
    threshold: float
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0


Tuple4 = tuple[float, float, float, float]


def random_tuple(pattern: str, rng: np.random.Generator) -> Tuple4:
    """(A, l_tj, H, r) with the signs of (A, B) given by ``pattern``."""
    if pattern not in SIGN_PATTERNS:
        raise ValueError(f"pattern must be one of {SIGN_PATTERNS}")
    while True:
        h = 10 ** rng.uniform(1.0, 3.3)
        ltj = h * 10 ** rng.uniform(-2.0, 0.7)
        r = ltj * 10 ** rng.uniform(-1.5, 1.5)
        if pattern[0] == "-":
            a = -(10 ** rng.uniform(-4.0, 2.0))
        else:
            a = 10 ** rng.uniform(-4.0, 0.0) * (1.0 - 1e-9)
        b = ltj**2 - (1.0 - a) * h**2
        if {"--": b <= 0, "-+": b > 0, "++": b >= 0, "+-": b < 0}[pattern]:
            return a, ltj, h, r


def _constructed(row: int, rng: np.random.Generator) -> Tuple4 | None:
    h = rng.uniform(50.0, 2000.0)
    if row == 18:
        return 0.0, h, h, rng.uniform(1.0, 3.0) * h
    if row == 16:
        ltj = h * rng.uniform(1.05, 3.0)
        return 0.0, ltj, h, rng.uniform(0.5, 3.0) * ltj
    if row == 17:
        ltj = h * rng.uniform(0.3, 0.95)
        return 0.0, ltj, h, rng.uniform(0.5, 3.0) * h
    if row == 19:
        ltj = h * rng.uniform(0.01, 0.3)
        return 0.0, ltj, h, rng.uniform(0.05, 0.5) * (h * h - ltj * ltj) / (2.0 * ltj)
    if row == 2:
        a = -(10 ** rng.uniform(-3.0, 1.0))
        ltj = h * rng.uniform(0.1, 2.0)
        b = ltj**2 - (1.0 - a) * h**2
        return (a, ltj, h, math.sqrt(b / a)) if b < 0 else None
    if row == 7:
        a = 10 ** rng.uniform(-3.0, -0.01)
        ltj = h * rng.uniform(0.2, 3.0)
        b = ltj**2 - (1.0 - a) * h**2
        return (a, ltj, h, math.sqrt(b / a)) if b > 0 else None
    return None


def _pattern_of_row(row: int) -> str:
    if row <= 5:
        return "--"
    if row <= 9:
        return "++"
    if row <= 12:
        return "-+"
    return "+-"


def row_tuple(row: int, rng: np.random.Generator, max_tries: int = 200_000) -> Tuple4:
    """A tuple that classifies into ``row``, by construction or rejection."""
    if row not in ROWS:
        raise ValueError(f"row must be in 1..19, got {row}")
    for _ in range(max_tries):
        if row in CONSTRUCTED_ROWS:
            t = _constructed(row, rng)
        else:
            t = random_tuple(_pattern_of_row(row), rng)
        if t is not None and classify_case(geometry(*t)) == row:
            return t
    raise RuntimeError(f"no tuple found for row {row} in {max_tries} tries")


def check_closed_forms(seed: int = 0, per_pattern: int = 200, min_row_hits: int = 5,
                       rtol: float = 1e-5, atol: float = 1e-8) -> Check:
    """S1, S2, S3 against the brute-force oracle over random and targeted tuples.

    A value passes when it is within ``max(rtol |ref|, atol)`` of the oracle.
    """
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    tuples = [random_tuple(pat, rng) for pat in SIGN_PATTERNS for _ in range(per_pattern)]
    rows = collections.Counter(classify_case(geometry(*t)) for t in tuples)
    for row in ROWS:
        tuples += [row_tuple(row, rng) for _ in range(max(0, min_row_hits - rows[row]))]
    coverage: collections.Counter = collections.Counter()
    worst = 0.0
    failures = []
    for a, ltj, h, r in tuples:
        g = geometry(a, ltj, h, r)
        coverage[g.case_index] += 1
        got = s_values(g)
        ref = s_values_oracle(g.a_coef, ltj, h, r)
        for k in range(3):
            err = abs(got[k] - ref[k])
            worst = max(worst, err / max(abs(ref[k]), atol / rtol))
            if err > max(rtol * abs(ref[k]), atol):
                failures.append({"tuple": (a, ltj, h, r), "row": g.case_index, "s": k + 1,
                                 "closed_form": got[k], "oracle": ref[k]})
    short = [row for row in ROWS if coverage[row] < min_row_hits]
    return Check(
        "closed_forms_vs_quadrature",
        not failures and not short,
        worst,
        rtol,
        {"tuples": len(tuples), "coverage": {str(k): v for k, v in sorted(coverage.items(), key=str)},
         "rows_short": short, "failures": failures[:10]},
        time.perf_counter() - t0,
    )


def check_specfun(rtol: float = 1e-12) -> Check:
    """Legendre relation, F(pi/2, m) = K(m), and K, E, F, E(phi) against quadrature."""
    t0 = time.perf_counter()
    worst = 0.0
    for m in np.linspace(0.01, 0.99, 50):
        k, e = specfun.ellipk(m), specfun.ellipe(m)
        kc, ec = specfun.ellipk(1 - m), specfun.ellipe(1 - m)
        worst = max(worst, abs(e * kc + ec * k - k * kc - math.pi / 2) / (math.pi / 2))
        worst = max(worst, abs(specfun.ellipf(math.pi / 2, m) - k) / k)
        worst = max(worst, abs(specfun.ellipeinc(math.pi / 2, m) - e) / e)
    for m in (0.0, 0.3, 0.7, 0.95, -2.0):
        for phi in (0.2, 0.9, 1.4, 2.5):
            f_ref = quad(lambda t: 1.0 / math.sqrt(1 - m * math.sin(t) ** 2), 0, phi,
                         epsabs=0, epsrel=2e-14)[0]
            e_ref = quad(lambda t: math.sqrt(1 - m * math.sin(t) ** 2), 0, phi,
                         epsabs=0, epsrel=2e-14)[0]
            worst = max(worst, abs(specfun.ellipf(phi, m) - f_ref) / f_ref)
            worst = max(worst, abs(specfun.ellipeinc(phi, m) - e_ref) / e_ref)
    return Check("special_functions", worst <= rtol, worst, rtol, {}, time.perf_counter() - t0)


def check_cdf(cfg: NetworkConfig, p: PiecewiseLoS, trials: int = 1_000_000, seed: int = 0,
              limit: float = 0.005) -> Check:
    """KS distance between the closed-form CDF of Gamma_2 and Monte Carlo draws."""
    t0 = time.perf_counter()
    samples = gamma2_samples(cfg, p, trials, seed=seed)
    dist, res = ks_distance(samples, lambda y: f_gamma2(y, cfg, p))
    # dist + res bounds the supremum over all y, not just the grid
    return Check("gamma2_cdf_ks", dist + res <= limit, dist + res, limit,
                 {"h_m": cfg.h_m, "trials": trials, "grid_distance": dist, "grid_resolution": res},
                 time.perf_counter() - t0)


def check_scp(cfg: NetworkConfig, p: PiecewiseLoS, trials: int = 100_000, seed: int = 0,
              limit: float = 0.02) -> Check:
    """Interference-limited SCP against Monte Carlo."""
    t0 = time.perf_counter()
    quiet = interference_limited(cfg)
    value = scp(quiet, p).scp
    est = simulate_scp(quiet, p, trials, mode="interference-limited", seed=seed)
    gap = abs(value - est.scp)
    return Check("scp_vs_monte_carlo", gap <= limit, gap, limit,
                 {"analytic": value, "mc": est.scp, "ci": (est.ci_low, est.ci_high),
                  "pj_w": cfg.pj_w, "h_m": cfg.h_m}, time.perf_counter() - t0)


def run_all(cfg: NetworkConfig, p: PiecewiseLoS, seed: int = 0,
            progress: Callable[[Check], None] | None = None) -> list[Check]:
    checks = []
    jobs = [
        lambda: check_specfun(),
        lambda: check_closed_forms(seed),
        lambda: check_cdf(cfg, p, seed=seed),
        lambda: check_scp(cfg if cfg.pj_w >= 0.01 else cfg.replace(pj_w=0.01), p, seed=seed),
    ]
    for job in jobs:
        c = job()
        checks.append(c)
        if progress is not None:
            progress(c)
    return checks
