"""Self-contained statistical primitives: normal CDF, Kolmogorov-Smirnov
distance/p-value against N(0,1), and ordinary least squares on log-log axes.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import NonPositive, SampleTooSmall

_SQRT2 = math.sqrt(2.0)


def normal_cdf(x: float) -> float:
    """Standard normal CDF via erfc; absolute error well below 1e-10."""
    return 0.5 * math.erfc(-x / _SQRT2)


def normal_cdf_array(xs) -> np.ndarray:
    xs = np.asarray(xs, dtype=np.float64)
    out = np.fromiter((0.5 * math.erfc(-v / _SQRT2) for v in xs.ravel()),
                      dtype=np.float64, count=xs.size)
    return out.reshape(xs.shape)


@dataclass(frozen=True)
class KsResult:
    d_stat: float
    p_value: float
    sample_size: int


def _kolmogorov_sf(t: float) -> float:
    """P(sup |B(t)| > t) series: 2 sum_{j>=1} (-1)^(j-1) exp(-2 j^2 t^2)."""
    if t <= 0.0:
        return 1.0
    total = 0.0
    sign = 1.0
    for j in range(1, 1000):
        term = math.exp(-2.0 * j * j * t * t)
        total += sign * term
        if term < 1e-12:
            break
        sign = -sign
    return min(1.0, max(0.0, 2.0 * total))


def ks_test_normal(sample) -> KsResult:
    """Two-sided KS distance of a sample to N(0,1), with Stephens' small-
    sample correction t = d (sqrt(k) + 0.12 + 0.11/sqrt(k)) in the p-value.
    """
    xs = np.sort(np.asarray(sample, dtype=np.float64))
    k = xs.size
    if k < 10:
        raise SampleTooSmall(f"KS test needs >= 10 points, got {k}")
    phi = normal_cdf_array(xs)
    i = np.arange(1, k + 1, dtype=np.float64)
    d = float(max((i / k - phi).max(), (phi - (i - 1.0) / k).max()))
    sqrt_k = math.sqrt(k)
    p = _kolmogorov_sf(d * (sqrt_k + 0.12 + 0.11 / sqrt_k))
    return KsResult(d_stat=d, p_value=p, sample_size=k)


def ks_distance_cdf(exact_cdf) -> float:
    """Exact sup-distance between a finite-support CDF and N(0,1).

    Evaluates both sides of every jump; exact for lattice distributions.
    """
    phi = normal_cdf_array(exact_cdf.points)
    cdf = exact_cdf.cdf
    left = np.concatenate(([0.0], cdf[:-1]))
    return float(np.maximum(np.abs(cdf - phi), np.abs(left - phi)).max())


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    stderr_slope: float
    r2: float


def fit_loglog(xs, ys) -> SlopeFit:
    """OLS of ln(y) on ln(x): scaling exponent with its standard error."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.size != ys.size or xs.size < 3:
        raise SampleTooSmall("log-log fit needs >= 3 points")
    if (xs <= 0).any() or (ys <= 0).any():
        raise NonPositive("log-log fit needs strictly positive xs and ys")
    lx = np.log(xs)
    ly = np.log(ys)
    mx = lx.mean()
    my = ly.mean()
    dx = lx - mx
    sxx = float(np.dot(dx, dx))
    if sxx == 0.0:
        raise NonPositive("xs are all equal; slope undefined")
    slope = float(np.dot(dx, ly - my)) / sxx
    intercept = my - slope * mx
    resid = ly - (intercept + slope * lx)
    ssr = float(np.dot(resid, resid))
    sst = float(np.dot(ly - my, ly - my))
    r2 = 1.0 if sst == 0.0 else max(0.0, 1.0 - ssr / sst)
    stderr = math.sqrt(max(ssr, 0.0) / (xs.size - 2) / sxx)
    return SlopeFit(slope=slope, intercept=intercept, stderr_slope=stderr, r2=r2)
