"""Monte Carlo estimates of the SCP and of the single-UED Gamma_2 law.

Trials are generated in fixed-size chunks, each with its own generator
spawned from the root seed, so results depend only on the seed and the
trial count and not on how many workers run the chunks.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .los import PiecewiseLoS, exact_los_probability, piecewise_los_probability
from .scene import NetworkConfig

CHUNK = 16_384
THREADS_ENV = "UAVSCP_THREADS"
MODES = ("with-noise", "interference-limited")
LOS_MODES = ("exact", "piecewise")


def default_workers() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    return min(8, os.cpu_count() or 1)


@dataclass(frozen=True)
class TrialOutcome:
    gamma1: float
    gamma2_max: float
    secrecy_capacity: float
    secure: bool


@dataclass(frozen=True)
class McEstimate:
    scp: float
    ci_low: float
    ci_high: float
    trials: int
    secure: int


def wilson_interval(successes: int, trials: int, z: float = 1.959963984540054) -> tuple[float, float]:
    if trials <= 0:
        raise ValueError("trials must be positive")
    p = successes / trials
    denom = 1.0 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


def sample_ueds(n: int, r1_m: float, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """n points uniform on a disk: (radius, angle) arrays."""
    if n < 1:
        raise ValueError("n must be at least 1")
    radius = r1_m * np.sqrt(rng.random(n))
    angle = 2.0 * math.pi * rng.random(n)
    return radius, angle


def _los_model(cfg: NetworkConfig, p: PiecewiseLoS | None, los_mode: str) -> Callable:
    if los_mode == "piecewise":
        if p is None:
            raise ValueError("piecewise LoS mode needs a PiecewiseLoS")
        return lambda r: piecewise_los_probability(p, cfg.h_m, r)
    if los_mode == "exact":
        return lambda r: exact_los_probability(cfg.environment, cfg.h_m, r)
    raise ValueError(f"los_mode must be one of {LOS_MODES}, got {los_mode!r}")


def _chunk_sizes(trials: int) -> list[int]:
    full, rest = divmod(trials, CHUNK)
    return [CHUNK] * full + ([rest] if rest else [])


def _run_chunks(fn, trials: int, seed: int, workers: int | None):
    sizes = _chunk_sizes(trials)
    seqs = np.random.SeedSequence(seed).spawn(len(sizes))
    jobs = [(size, np.random.Generator(np.random.PCG64(s))) for size, s in zip(sizes, seqs)]
    workers = default_workers() if workers is None else workers
    if workers <= 1 or len(jobs) == 1:
        return [fn(size, rng) for size, rng in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda job: fn(*job), jobs))


def _trial_chunk(cfg: NetworkConfig, los, mode: str, size: int, rng: np.random.Generator):
    """Gamma_1 and max Gamma_2 for ``size`` independent trials."""
    env = cfg.environment
    g = cfg.fspl_gain
    n0 = cfg.n0_w if mode == "with-noise" else 0.0
    ne = cfg.ne_eff if mode == "with-noise" else 0.0
    h2 = cfg.h_m**2
    jx = cfg.l_tj_m * math.cos(cfg.phi_jp)
    jy = cfg.l_tj_m * math.sin(cfg.phi_jp)
    dx = cfg.l_sd_m * math.cos(cfg.phi_d)
    dy = cfg.l_sd_m * math.sin(cfg.phi_d)
    ljd_h = math.hypot(dx - jx, dy - jy)
    p_jd = float(los(np.array(ljd_h)))

    fading = rng.exponential(1.0, size)
    jd_los = rng.random(size) < p_jd
    eta_jd = np.where(jd_los, env.eta_los, env.eta_nlos)
    jam_d = eta_jd * cfg.pj_eff * g / (ljd_h**2 + h2)
    sig_d = fading * cfg.ps_eff * g / cfg.l_sd_m**cfg.beta
    with np.errstate(divide="ignore", invalid="ignore"):
        gamma1 = 1.0 + sig_d / (jam_d + n0)

    n = cfg.n_eves
    radius, angle = sample_ueds(size * n, cfg.r1_m, rng)
    radius = radius.reshape(size, n)
    angle = angle.reshape(size, n)
    e_los = rng.random((size, n)) < los(radius)
    eta_e = np.where(e_los, env.eta_los, env.eta_nlos)
    ex = radius * np.cos(angle)
    ey = radius * np.sin(angle)
    d_je2 = (ex - jx) ** 2 + (ey - jy) ** 2
    sig_e = eta_e * cfg.ps_eff * g / (h2 + radius**2)
    with np.errstate(divide="ignore", invalid="ignore"):
        jam_e = np.where(d_je2 > 0, cfg.pj_eff * g / d_je2, np.inf)
        gamma2 = 1.0 + sig_e / (jam_e + ne)
    gamma2 = np.nan_to_num(gamma2, nan=1.0, posinf=np.inf)
    return gamma1, gamma2.max(axis=1)


def _secure(gamma1: np.ndarray, gamma2_max: np.ndarray, rt: float) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        cs = np.maximum(np.log2(gamma1) - np.log2(gamma2_max), 0.0)
    return np.nan_to_num(cs, nan=0.0) > rt


def simulate_scp(
    cfg: NetworkConfig,
    p: PiecewiseLoS | None = None,
    trials: int = 100_000,
    mode: str = "with-noise",
    los_mode: str = "piecewise",
    seed: int = 0,
    workers: int | None = None,
) -> McEstimate:
    """Fraction of trials with secrecy capacity above Rt, with a Wilson 95% interval."""
    if trials < 1000:
        raise ValueError("trials must be at least 1000")
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    los = _los_model(cfg, p, los_mode)

    def chunk(size, rng):
        g1, g2 = _trial_chunk(cfg, los, mode, size, rng)
        return int(np.count_nonzero(_secure(g1, g2, cfg.rt_bps_hz)))

    secure = sum(_run_chunks(chunk, trials, seed, workers))
    lo, hi = wilson_interval(secure, trials)
    return McEstimate(secure / trials, lo, hi, trials, secure)


def simulate_trials(
    cfg: NetworkConfig,
    p: PiecewiseLoS | None = None,
    trials: int = 1000,
    mode: str = "with-noise",
    los_mode: str = "piecewise",
    seed: int = 0,
) -> list[TrialOutcome]:
    """Per-trial outcomes, mostly for inspection and tests."""
    los = _los_model(cfg, p, los_mode)
    parts = _run_chunks(lambda size, rng: _trial_chunk(cfg, los, mode, size, rng), trials, seed, 1)
    g1 = np.concatenate([a for a, _ in parts])
    g2 = np.concatenate([b for _, b in parts])
    with np.errstate(divide="ignore", invalid="ignore"):
        cs = np.nan_to_num(np.maximum(np.log2(g1) - np.log2(g2), 0.0), nan=0.0)
    return [
        TrialOutcome(float(a), float(b), float(c), bool(c > cfg.rt_bps_hz))
        for a, b, c in zip(g1, g2, cs)
    ]


def gamma2_samples(
    cfg: NetworkConfig,
    p: PiecewiseLoS | None,
    trials: int,
    seed: int = 0,
    los_mode: str = "piecewise",
    workers: int | None = None,
) -> np.ndarray:
    """Sorted draws of one UED's 1 + SIR (noise-free, as in the closed form)."""
    single = cfg.replace(n_eves=1)
    los = _los_model(single, p, los_mode)
    parts = _run_chunks(
        lambda size, rng: _trial_chunk(single, los, "interference-limited", size, rng)[1],
        trials, seed, workers,
    )
    return np.sort(np.concatenate(parts))


def empirical_cdf_gamma2(
    cfg: NetworkConfig,
    p: PiecewiseLoS | None,
    trials: int,
    y_grid: Sequence[float],
    seed: int = 0,
    los_mode: str = "piecewise",
) -> np.ndarray:
    if trials < 10_000:
        raise ValueError("trials must be at least 1e4")
    samples = gamma2_samples(cfg, p, trials, seed, los_mode)
    return np.searchsorted(samples, np.asarray(y_grid, dtype=float), side="right") / samples.size


def ks_distance(samples: np.ndarray, cdf: Callable[[float], float], grid_size: int = 2000) -> tuple[float, float]:
    """Kolmogorov-Smirnov distance between sorted samples and a CDF.

    The CDF is evaluated at ``grid_size`` empirical quantiles; both
    functions are monotone, so the true supremum is at most the returned
    distance plus the returned resolution (the largest step of either
    function between neighbouring grid points).
    """
    n = samples.size
    idx = np.unique(np.linspace(0, n - 1, grid_size).astype(int))
    ys = samples[idx]
    f = np.array([cdf(float(y)) for y in ys])
    upper = np.searchsorted(samples, ys, side="right") / n
    lower = np.searchsorted(samples, ys, side="left") / n
    dist = float(np.max(np.maximum(np.abs(f - upper), np.abs(f - lower))))
    step_model = np.max(np.diff(np.concatenate([[0.0], f, [1.0]])))
    step_empirical = np.max(np.diff(np.concatenate([[0.0], upper, [1.0]])))
    resolution = float(max(step_model, step_empirical))
    return dist, resolution
