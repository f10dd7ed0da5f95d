"""Exact ground truth for the walk at finite n.

Three independent routes, in decreasing cost:

* `enumerate_paths`  - chain rule over every path in {+1,-1,0}^n, no state
  merging (n <= 14); the reference the others are checked against.
* `distribution_dp`  - the pair (S_n, Z_n) is Markov under the step kernel,
  so the full joint law follows by dynamic programming over the triangle
  z <= m, |s| <= z (O(n^3) work, capped).
* `exact_moments`    - O(n) forward recursions for the first and second
  moments, closed in (E S, E Z, Var S, E SZ).

The moment recursions follow from the conditional step moments
E[X|counts] = (alpha/n) S + omega and E[X^2|counts] = (gamma/n) Z + tau:

    E S_{n+1}  = (1 + alpha/n) E S_n + omega
    E Z_{n+1}  = (1 + gamma/n) E Z_n + tau
    Var S_{n+1} = (1 + 2 alpha/n) Var S_n
                  + (gamma/n) E Z_n + tau - ((alpha/n) E S_n + omega)^2
    E S_{n+1}Z_{n+1} = (1 + (alpha+gamma)/n) E S_n Z_n
                  + (tau + alpha/n) E S_n + omega E Z_n + omega

(the variance line propagates the centered second moment, which avoids the
n^2 cancellation of the raw recursion; the cross recursion uses X^3 = X).
All four are validated against the DP in the test suite before anything
else relies on them.
"""

from dataclasses import dataclass

import numpy as np

from .errors import CapExceeded, DegenerateVariance
from .model import ModelParams, derive_constants

DP_CAP_DEFAULT = 400
PATH_CAP = 14


@dataclass(frozen=True)
class ExactMoments:
    n: int
    mean_s: float
    mean_z: float
    mean_s2: float
    var_s: float
    mean_sz: float


class MomentTable:
    """Exact moments for all n = 1..n_max (arrays indexed by n; slot 0 unused)."""

    def __init__(self, n_max, mean_s, mean_z, var_s, mean_sz):
        self.n_max = n_max
        self.mean_s = mean_s
        self.mean_z = mean_z
        self.var_s = var_s
        self.mean_sz = mean_sz
        self.mean_s2 = var_s + mean_s ** 2

    def row(self, n: int) -> ExactMoments:
        return ExactMoments(
            n=n,
            mean_s=float(self.mean_s[n]),
            mean_z=float(self.mean_z[n]),
            mean_s2=float(self.mean_s2[n]),
            var_s=float(self.var_s[n]),
            mean_sz=float(self.mean_sz[n]),
        )


def _solve_linear_recursion(coeff_table, x1, forcing):
    """x_{n+1} = c_n x_n + f_n  ->  x_n = C_n (x_1 + sum_{l<n} f_l / C_{l+1})."""
    terms = forcing / coeff_table[1:]
    prefix = np.concatenate(([0.0], np.cumsum(terms)))
    return coeff_table * (x1 + prefix)


def exact_moments(params: ModelParams, n_max: int) -> MomentTable:
    """Forward moment recursions for n = 1..n_max, vectorized."""
    if n_max < 1:
        raise CapExceeded("n_max must be >= 1")
    c = derive_constants(params)
    al, om, ga, ta = c.alpha, c.omega, c.gamma, c.tau

    k = np.arange(1, n_max, dtype=np.float64)  # transition n -> n+1 at n = k
    growth_a = np.concatenate(([1.0], np.cumprod(1.0 + al / k)))
    growth_b = np.concatenate(([1.0], np.cumprod(1.0 + ga / k)))
    growth_a2 = np.concatenate(([1.0], np.cumprod(1.0 + 2.0 * al / k)))
    growth_ab = np.concatenate(([1.0], np.cumprod(1.0 + (al + ga) / k)))

    mean_s = _solve_linear_recursion(growth_a, c.beta, np.full(max(n_max - 1, 0), om))
    mean_z = _solve_linear_recursion(growth_b, c.psi, np.full(max(n_max - 1, 0), ta))

    var1 = c.psi - c.beta ** 2  # Var X_1
    h = (ga / k) * mean_z[:-1] + ta - ((al / k) * mean_s[:-1] + om) ** 2
    var_s = _solve_linear_recursion(growth_a2, var1, h)

    g = (ta + al / k) * mean_s[:-1] + om * mean_z[:-1] + om
    mean_sz = _solve_linear_recursion(growth_ab, c.beta, g)  # E[S_1 Z_1] = E[X_1^3]

    def pad(arr):
        return np.concatenate(([np.nan], arr))

    return MomentTable(n_max, pad(mean_s), pad(mean_z), pad(var_s), pad(mean_sz))


@dataclass(frozen=True)
class ExactDistribution:
    """Joint law of (S_n, Z_n): probability mass per reachable (s, z) pair."""

    n: int
    mass: dict

    def total_mass(self) -> float:
        return float(sum(self.mass.values()))

    def marginal_s(self):
        """(sorted s values, probabilities) after summing out z."""
        agg = {}
        for (s, _z), w in self.mass.items():
            agg[s] = agg.get(s, 0.0) + w
        svals = np.array(sorted(agg), dtype=np.float64)
        probs = np.array([agg[int(s)] for s in svals])
        return svals, probs

    def moments(self) -> ExactMoments:
        ms = mz = ms2 = msz = 0.0
        for (s, z), w in self.mass.items():
            ms += w * s
            mz += w * z
            ms2 += w * s * s
            msz += w * s * z
        return ExactMoments(self.n, ms, mz, ms2, ms2 - ms * ms, msz)


def _triangle_to_dist(n, tri):
    total = float(tri.sum())
    if abs(total - 1.0) > 1e-10:
        raise AssertionError(f"probability mass drifted to {total!r}")
    mass = {}
    zs, js = np.nonzero(tri)
    for z, j in zip(zs.tolist(), js.tolist()):
        mass[(2 * j - z, z)] = float(tri[z, j])
    return ExactDistribution(n=n, mass=mass)


def distribution_dp(params: ModelParams, n: int, cap: int = DP_CAP_DEFAULT) -> ExactDistribution:
    """Exact joint law of (S_n, Z_n) by DP over (z, n_plus) triangles.

    States are indexed (z, j) with j = n_plus = (s + z) / 2, so each time
    slice is a dense triangle and every transition is a shifted array add.
    """
    if n < 1:
        raise CapExceeded("n must be >= 1")
    if n > cap:
        raise CapExceeded(f"n = {n} above the DP cap {cap} (O(n^3) cost)")
    p, q, r, theta = params.p, params.q, params.r, params.theta
    pq = p + q

    tri = np.zeros((2, 2))
    tri[1, 1] = p
    tri[1, 0] = q
    tri[0, 0] = r
    for m in range(1, n):
        zs = np.arange(m + 1, dtype=np.float64)[:, None]
        js = np.arange(m + 1, dtype=np.float64)[None, :]
        p_plus = (theta / m) * (js * p + (zs - js) * q) + (1.0 - theta) * p
        p_minus = (theta / m) * ((zs - js) * p + js * q) + (1.0 - theta) * q
        p_zero = (theta * pq / m) * (m - zs) + r
        nxt = np.zeros((m + 2, m + 2))
        nxt[1:, 1:] += tri * p_plus
        nxt[1:, :-1] += tri * p_minus
        nxt[:-1, :-1] += tri * p_zero
        tri = nxt
    return _triangle_to_dist(n, tri)


def dp_moment_scan(params: ModelParams, n_max: int,
                   cap: int = DP_CAP_DEFAULT):
    """Moments of the DP joint law at every step 1..n_max (one DP pass).

    Returns a list of ExactMoments; the independent cross-check for the
    O(n) moment recursions.
    """
    if n_max < 1:
        raise CapExceeded("n_max must be >= 1")
    if n_max > cap:
        raise CapExceeded(f"n_max = {n_max} above the DP cap {cap}")
    p, q, r, theta = params.p, params.q, params.r, params.theta
    pq = p + q

    def moments_of(tri, m):
        zs = np.arange(tri.shape[0], dtype=np.float64)[:, None]
        js = np.arange(tri.shape[1], dtype=np.float64)[None, :]
        s = 2.0 * js - zs
        ms = float((tri * s).sum())
        mz = float((tri * zs).sum())
        ms2 = float((tri * s * s).sum())
        msz = float((tri * s * zs).sum())
        return ExactMoments(m, ms, mz, ms2, ms2 - ms * ms, msz)

    tri = np.zeros((2, 2))
    tri[1, 1] = p
    tri[1, 0] = q
    tri[0, 0] = r
    out = [moments_of(tri, 1)]
    for m in range(1, n_max):
        zs = np.arange(m + 1, dtype=np.float64)[:, None]
        js = np.arange(m + 1, dtype=np.float64)[None, :]
        p_plus = (theta / m) * (js * p + (zs - js) * q) + (1.0 - theta) * p
        p_minus = (theta / m) * ((zs - js) * p + js * q) + (1.0 - theta) * q
        p_zero = (theta * pq / m) * (m - zs) + r
        nxt = np.zeros((m + 2, m + 2))
        nxt[1:, 1:] += tri * p_plus
        nxt[1:, :-1] += tri * p_minus
        nxt[:-1, :-1] += tri * p_zero
        tri = nxt
        out.append(moments_of(tri, m + 1))
    return out


def enumerate_paths(params: ModelParams, n: int, cap: int = PATH_CAP) -> ExactDistribution:
    """Brute-force law of (S_n, Z_n): chain rule over all 3^n paths.

    Every path keeps its own probability; nothing is merged until the final
    tally, so this is a genuinely independent check on the DP.
    """
    if n < 1:
        raise CapExceeded("n must be >= 1")
    if n > cap:
        raise CapExceeded(f"n = {n} above the enumeration cap {cap} (3^n paths)")
    p, q, r, theta = params.p, params.q, params.r, params.theta

    n_plus = np.zeros(1, dtype=np.int64)
    n_minus = np.zeros(1, dtype=np.int64)
    weight = np.ones(1)
    for m in range(n):
        if m == 0:
            w_plus = weight * p
            w_minus = weight * q
            w_zero = weight * r
        else:
            p_plus = (theta / m) * (n_plus * p + n_minus * q) + (1.0 - theta) * p
            p_minus = (theta / m) * (n_minus * p + n_plus * q) + (1.0 - theta) * q
            p_zero = (theta * (p + q) / m) * (m - n_plus - n_minus) + r
            w_plus = weight * p_plus
            w_minus = weight * p_minus
            w_zero = weight * p_zero
        weight = np.concatenate((w_plus, w_minus, w_zero))
        n_plus = np.concatenate((n_plus + 1, n_plus, n_plus))
        n_minus = np.concatenate((n_minus, n_minus + 1, n_minus))

    z = n_plus + n_minus
    keys = z * (n + 1) + n_plus
    tally = np.bincount(keys, weights=weight, minlength=(n + 1) * (n + 1))
    mass = {}
    for key in np.nonzero(tally)[0].tolist():
        zz, jj = divmod(key, n + 1)
        mass[(2 * jj - zz, zz)] = float(tally[key])
    dist = ExactDistribution(n=n, mass=mass)
    assert abs(dist.total_mass() - 1.0) <= 1e-12
    return dist


@dataclass(frozen=True)
class DiscreteCdf:
    """Finite-support CDF on standardized points (for exact KS distances)."""

    points: np.ndarray  # sorted support
    probs: np.ndarray   # point masses
    cdf: np.ndarray     # running totals, cdf[i] = P(X <= points[i])


def standardized_exact_cdf(params: ModelParams, n: int,
                           cap: int = DP_CAP_DEFAULT) -> DiscreteCdf:
    """Exact CDF of (S_n - E S_n) / sqrt(Var S_n) on its finite support."""
    dist = distribution_dp(params, n, cap=cap)
    svals, probs = dist.marginal_s()
    mean = float(np.dot(svals, probs))
    var = float(np.dot(svals * svals, probs)) - mean * mean
    if var <= 1e-14:
        raise DegenerateVariance(f"Var(S_{n}) = {var!r}; cannot standardize")
    pts = (svals - mean) / np.sqrt(var)
    return DiscreteCdf(points=pts, probs=probs, cdf=np.cumsum(probs))
