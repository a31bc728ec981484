"""Line-of-sight probability models for air-to-ground links.

Three models are provided: the ITU building-obstruction product, the
two-parameter sigmoid in elevation angle, and a four-branch piecewise
model that is linear in ``tan(theta)`` and ``cot(theta)`` on its two
transitional branches.  :func:`fit_piecewise` derives the piecewise
coefficients from the product by threshold-filtered least squares.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .scene import Environment

C_LOW = 0.005
C_MID = 0.5
C_UP = 0.995
DEFAULT_SAMPLES = 10_000


class FitError(ValueError):
    """The threshold-filtered sample sets are too small to fit."""


def _density_per_m(env: Environment) -> float:
    # rho2 is buildings per km^2, lengths are metres
    return math.sqrt(env.rho1 * env.rho2 * 1e-6)


def exact_los_probability(env: Environment, h_m: float, r_horiz_m):
    """ITU obstruction product for a UAV at height ``h_m``.

    ``r_horiz_m`` may be a scalar or an array; the result has the same shape.
    """
    if h_m <= 0.0:
        raise ValueError("h_m must be positive")
    r = np.asarray(r_horiz_m, dtype=float)
    if np.any(r < 0.0):
        raise ValueError("r_horiz_m must be nonnegative")
    counts = np.floor(r * _density_per_m(env) - 1.0).astype(np.int64) + 1  # f(r) + 1
    out = np.ones(r.shape)
    mask = counts > 0
    if np.any(mask):
        uniq, inv = np.unique(counts[mask], return_inverse=True)
        vals = np.array([_product(env.sigma, h_m, int(n)) for n in uniq])
        out[mask] = vals[inv]
    return out if out.ndim else float(out)


def _product(sigma: float, h_m: float, n: int) -> float:
    """Obstruction product over ``n`` equally spaced buildings.

    Counting back from the receiver end, the i-th ray height is
    (i + 1/2) H / n; factors with height above ~8.8 sigma equal 1 in double
    precision and are skipped.
    """
    two_s2 = 2.0 * sigma * sigma
    needed = min(n, int(math.ceil(8.8 * sigma * n / h_m)) + 1)
    log_p = 0.0
    chunk = 65_536
    for start in range(0, needed, chunk):
        i = np.arange(start, min(needed, start + chunk))
        heights = (i + 0.5) * h_m / n
        log_p += float(np.sum(np.log(-np.expm1(-heights * heights / two_s2))))
        if log_p < -800.0:
            return 0.0
    return math.exp(log_p)


def los_probability_large_h(env: Environment, theta_rad):
    """Limit of the obstruction product as H grows at fixed elevation angle.

    Building ``i`` counted back from the UED is cleared by a ray of height
    ``(i + 1/2) tan(theta) / k`` with ``k`` the building density per metre;
    the product runs until the factors are 1 to double precision.
    """
    theta = np.asarray(theta_rad, dtype=float)
    t = np.tan(np.clip(theta, 0.0, 0.5 * math.pi))
    step = t / (_density_per_m(env) * env.sigma * math.sqrt(2.0))
    out = np.zeros(theta.shape)
    pos = step > 0
    if np.any(pos):
        s = step[pos]
        # exp(-x^2) < 1e-17 once x > 6.3; number of terms needed per sample
        n_terms = int(np.ceil(6.5 / s.min())) + 1
        acc = np.zeros(s.shape)
        for i in range(n_terms):
            x = (i + 0.5) * s
            acc += np.log(-np.expm1(-x * x))
        out[pos] = np.exp(acc)
    out[np.isinf(t) | (theta >= 0.5 * math.pi)] = 1.0
    return out if out.ndim else float(out)


def elevation_grid(sample_count: int = DEFAULT_SAMPLES) -> np.ndarray:
    return np.linspace(0.0, 0.5 * math.pi, sample_count)


def sample_los(env: Environment, sample_count: int = DEFAULT_SAMPLES, h_ref_m: float | None = None):
    """Evenly spaced elevation angles and their obstruction-product LoS probabilities.

    ``h_ref_m=None`` samples the large-H limit; otherwise the product is
    evaluated at horizontal distance ``h_ref_m / tan(theta)``.
    """
    theta = elevation_grid(sample_count)
    if h_ref_m is None:
        return theta, los_probability_large_h(env, theta)
    with np.errstate(divide="ignore"):
        r = h_ref_m / np.tan(theta)
    p = np.zeros_like(theta)
    finite = np.isfinite(r) & (r < 1e12)
    p[finite] = exact_los_probability(env, h_ref_m, np.maximum(r[finite], 0.0))
    return theta, p


# -- sigmoid ------------------------------------------------------------------


@dataclass(frozen=True)
class SigmoidLoS:
    b_coef: float
    c_coef: float

    def __post_init__(self) -> None:
        if not self.b_coef > 0.0:
            raise ValueError(f"b_coef must be positive, got {self.b_coef}")


def sigmoid_los_probability(s: SigmoidLoS, theta_rad):
    theta = np.asarray(theta_rad, dtype=float)
    out = 1.0 / (1.0 + s.c_coef * np.exp(-s.b_coef * (theta - s.c_coef)))
    return out if out.ndim else float(out)


def fit_sigmoid(theta, p, b0: float = 10.0, c0: float = 0.1, max_iter: int = 200) -> SigmoidLoS:
    """Least-squares sigmoid fit by Gauss-Newton with backtracking."""
    theta = np.asarray(theta, dtype=float)
    p = np.asarray(p, dtype=float)
    x = np.array([b0, c0])

    def residual(v):
        return sigmoid_los_probability(SigmoidLoS(max(v[0], 1e-12), v[1]), theta) - p

    r = residual(x)
    cost = float(r @ r)
    for _ in range(max_iter):
        b, c = x
        e = np.exp(-b * (theta - c))
        d = 1.0 + c * e
        # d/db and d/dc of 1/d
        jb = c * e * (theta - c) / d**2
        jc = -(e + c * e * b) / d**2
        jac = np.column_stack([jb, jc])
        step, *_ = np.linalg.lstsq(jac, -r, rcond=None)
        t = 1.0
        while t > 1e-10:
            trial = x + t * step
            if trial[0] > 0:
                rt = residual(trial)
                ct = float(rt @ rt)
                if ct < cost:
                    break
            t *= 0.5
        else:
            break
        converged = cost - ct <= 1e-15 * max(cost, 1e-300)
        x, r, cost = trial, rt, ct
        if converged:
            break
    return SigmoidLoS(float(x[0]), float(x[1]))


# -- piecewise ----------------------------------------------------------------


@dataclass(frozen=True)
class PiecewiseLoS:
    """Four-branch model in horizontal distance r at UAV height H.

    P = 1 for r < l1; c3 r/H + c4 on [l1, l2); c1 H/r + c2 on [l2, l3);
    0 beyond l3.  Breakpoints scale linearly with H.
    """

    c1: float
    c2: float
    c3: float
    c4: float
    # root of the quadratic crossing used for l2; -1 is the usual one
    root_sign: int = -1

    def __post_init__(self) -> None:
        if not (self.c1 > 0 and self.c2 < 0 and self.c3 < 0 and self.c4 > 1):
            raise ValueError(f"coefficient signs violate c1>0, c2<0, c3<0, c4>1: {self}")
        if self.root_sign not in (-1, 1):
            raise ValueError("root_sign must be -1 or +1")
        if self._disc < 0:
            raise ValueError("transitional branches do not intersect")

    @property
    def _disc(self) -> float:
        return (self.c4 - self.c2) ** 2 + 4.0 * self.c1 * self.c3

    def l1(self, h_m: float) -> float:
        return h_m * (1.0 - self.c4) / self.c3

    def l2(self, h_m: float) -> float:
        return 2.0 * h_m * self.c1 / (self.c4 - self.c2 + self.root_sign * math.sqrt(self._disc))

    def l3(self, h_m: float) -> float:
        return -h_m * self.c1 / self.c2

    def breakpoints(self, h_m: float) -> tuple[float, float, float]:
        return self.l1(h_m), self.l2(h_m), self.l3(h_m)


def piecewise_los_probability(p: PiecewiseLoS, h_m: float, r_horiz_m):
    r = np.asarray(r_horiz_m, dtype=float)
    l1, l2, l3 = p.breakpoints(h_m)
    with np.errstate(divide="ignore", invalid="ignore"):
        near = p.c3 * r / h_m + p.c4
        far = p.c1 * h_m / r + p.c2
    out = np.where(r < l1, 1.0, np.where(r < l2, near, np.where(r < l3, far, 0.0)))
    out = np.clip(out, 0.0, 1.0)
    return out if out.ndim else float(out)


def piecewise_los_by_angle(p: PiecewiseLoS, theta_rad):
    """The piecewise model as a function of elevation angle (H cancels)."""
    theta = np.asarray(theta_rad, dtype=float)
    with np.errstate(divide="ignore"):
        r = 1.0 / np.tan(theta)
    r = np.where(theta <= 0.0, np.inf, r)
    out = piecewise_los_probability(p, 1.0, np.maximum(r, 0.0))
    return out


def _linear_fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    design = np.column_stack([x, np.ones_like(x)])
    (slope, intercept), *_ = np.linalg.lstsq(design, y, rcond=None)
    return float(slope), float(intercept)


def fit_piecewise_samples(theta, p) -> PiecewiseLoS:
    """Threshold-filtered least-squares fit of the piecewise model.

    Samples with C_LOW < P < C_MID fit ``c1 tan + c2``; samples with
    C_MID < P < C_UP fit ``c3 cot + c4``.  Both models are linear in their
    coefficients, so the least-squares problems are solved directly.  The
    crossing root is the one whose composed model fits all samples better.
    """
    theta = np.asarray(theta, dtype=float)
    p = np.asarray(p, dtype=float)
    low = (p > C_LOW) & (p < C_MID)
    high = (p > C_MID) & (p < C_UP)
    if low.sum() < 2 or high.sum() < 2:
        raise FitError(
            f"need at least 2 samples per transitional set, got {int(low.sum())} and {int(high.sum())}"
        )
    c1, c2 = _linear_fit(np.tan(theta[low]), p[low])
    c3, c4 = _linear_fit(1.0 / np.tan(theta[high]), p[high])
    best = None
    for sign in (-1, 1):
        try:
            model = PiecewiseLoS(c1, c2, c3, c4, sign)
            l1, l2, l3 = model.breakpoints(1.0)
        except (ValueError, ZeroDivisionError):
            continue
        if not (0.0 < l1 <= l2 <= l3) or not math.isfinite(l2):
            continue
        err = rmse(piecewise_los_by_angle(model, theta), p)
        if best is None or err < best[0]:
            best = (err, model)
    if best is None:
        raise FitError(f"no admissible crossing for coefficients {(c1, c2, c3, c4)}")
    return best[1]


def fit_piecewise(
    env: Environment, sample_count: int = DEFAULT_SAMPLES, h_ref_m: float | None = None
) -> PiecewiseLoS:
    if sample_count < 1000:
        raise ValueError("sample_count must be at least 1000")
    theta, p = sample_los(env, sample_count, h_ref_m)
    return fit_piecewise_samples(theta, p)


def rmse(model_probabilities: Sequence[float], exact_probabilities: Sequence[float]) -> float:
    a = np.asarray(model_probabilities, dtype=float)
    b = np.asarray(exact_probabilities, dtype=float)
    if a.size == 0 or a.shape != b.shape:
        raise ValueError("rmse needs two non-empty vectors of equal length")
    return float(np.sqrt(np.mean((a - b) ** 2)))


@dataclass(frozen=True)
class FitReport:
    environment: str
    piecewise: PiecewiseLoS
    sigmoid: SigmoidLoS
    rmse_piecewise: float
    rmse_sigmoid: float


def fit_report(
    env: Environment, sample_count: int = DEFAULT_SAMPLES, h_ref_m: float | None = None
) -> FitReport:
    """Fit both models on one sample grid and score them against the product."""
    theta, p = sample_los(env, sample_count, h_ref_m)
    pw = fit_piecewise_samples(theta, p)
    sg = fit_sigmoid(theta, p)
    return FitReport(
        env.name,
        pw,
        sg,
        rmse(piecewise_los_by_angle(pw, theta), p),
        rmse(sigmoid_los_probability(sg, theta), p),
    )


# Published coefficients for the four preset environments, with the l2
# crossing taken as the smaller-denominator root.
REFERENCE_FITS: dict[str, PiecewiseLoS] = {
    "suburban": PiecewiseLoS(4.215, -0.2007, -0.1341, 1.331),
    "urban": PiecewiseLoS(1.581, -0.1991, -0.3618, 1.341),
    "dense_urban": PiecewiseLoS(1.201, -0.2051, -0.4864, 1.346),
    "highrise_urban": PiecewiseLoS(0.4717, -0.1972, -1.223, 1.351),
}


def reference_fit(env: Environment | str) -> PiecewiseLoS:
    name = env if isinstance(env, str) else env.name
    try:
        return REFERENCE_FITS[name]
    except KeyError:
        raise KeyError(f"no reference coefficients for environment {name!r}") from None
