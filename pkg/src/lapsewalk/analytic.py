"""Deterministic predictions: normalizing sequences, exact expectations,
regime-dependent scaling laws, and iterated-logarithm envelopes.

The normalizer a_n (a_1 = 1, a_{n+1} = a_n (1 + alpha/n)) turns the centered
position into a martingale; its variance clock v_n = sum 1/a_k^2 diverges for
alpha <= 1/2 and converges for alpha > 1/2, which is exactly the
diffusive/superdiffusive transition. Everything here is computed by forward
recurrence in float64; log-gamma forms are reserved for tests.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    Degenerate,
    DomainTooSmall,
    OutOfDomain,
    TooSlowConvergence,
    WrongRegime,
)
from .model import (
    DerivedConstants,
    ModelParams,
    Regime,
    derive_constants,
)

_CHUNK = 1 << 19


def _check_rate(rate, name="alpha"):
    if not (0.0 <= rate < 1.0):
        raise OutOfDomain(f"{name} must lie in [0, 1), got {rate!r}")


@dataclass
class SequenceTable:
    """Values of one normalizing sequence for n = 1..n_max (index 0 unused)."""

    kind: str  # 'a' (rate alpha), 'b' (rate gamma), or 'v' (partial sums)
    rate: float
    values: np.ndarray

    def value(self, n: int) -> float:
        return float(self.values[n])

    @property
    def n_max(self) -> int:
        return len(self.values) - 1


def _growth_table(rate, n_max):
    vals = np.empty(n_max + 1)
    vals[0] = np.nan
    vals[1] = 1.0
    if n_max > 1:
        k = np.arange(1, n_max, dtype=np.float64)
        vals[2:] = np.cumprod(1.0 + rate / k)
    return vals


def a_sequence(alpha: float, n_max: int) -> SequenceTable:
    """Martingale normalizer a_n by its product recurrence."""
    _check_rate(alpha)
    return SequenceTable("a", alpha, _growth_table(alpha, n_max))


def b_sequence(gamma: float, n_max: int) -> SequenceTable:
    """Same recurrence with gamma; normalizes the activity count Z_n."""
    _check_rate(gamma, "gamma")
    return SequenceTable("b", gamma, _growth_table(gamma, n_max))


def v_sequence(alpha: float, n_max: int) -> SequenceTable:
    """Variance clock v_n = sum_{k<=n} 1/a_k^2 (strictly increasing)."""
    _check_rate(alpha)
    a = _growth_table(alpha, n_max)
    vals = np.empty(n_max + 1)
    vals[0] = np.nan
    vals[1:] = np.cumsum(1.0 / a[1:] ** 2)
    return SequenceTable("v", alpha, vals)


def growth_values(rate, ns):
    """a_n (or b_n) at the given indices without storing the full table.

    Runs the product recurrence in chunks; O(max n) time, O(chunk) memory.
    """
    _check_rate(rate)
    ns_arr = np.atleast_1d(np.asarray(ns, dtype=np.int64))
    if ns_arr.size == 0:
        return np.empty(0)
    if ns_arr.min() < 1:
        raise OutOfDomain("sequence indices start at n = 1")
    order = np.argsort(ns_arr, kind="stable")
    out = np.empty(ns_arr.size)
    running = 1.0
    lo = 1  # factor index: (1 + rate/k) for k = lo..n-1 carries a_lo to a_n
    for j in order:
        n = int(ns_arr[j])
        while lo < n:
            hi = min(n, lo + _CHUNK)
            facs = 1.0 + rate / np.arange(lo, hi, dtype=np.float64)
            running *= float(np.prod(facs))
            lo = hi
        out[j] = running
    return out if np.ndim(ns) else float(out[0])


def sum_inv_a_closed(alpha: float, n: int, a_n: float) -> float:
    """Exact value of sum_{l=1}^{n-1} 1/a_{l+1} given a_n."""
    _check_rate(alpha)
    return n / ((1.0 - alpha) * a_n) + 1.0 / (alpha - 1.0)


def v_limit_superdiffusive(alpha: float, tol: float = 1e-12,
                           max_terms: int = 10 ** 8) -> float:
    """Limit of v_n for alpha in (1/2, 1], by term-wise summation.

    Terms t_k = (Gamma(k+1) Gamma(alpha+1) / Gamma(k+alpha+1))^2 follow
    t_0 = 1, t_k = t_{k-1} (k/(k+alpha))^2. Summation stops once the current
    term drops below tol * partial_sum (and k > 10); the omitted tail, which
    decays like k^(-2*alpha) and is not negligible near alpha = 1/2, is then
    added via an Euler-Maclaurin estimate so the returned value is accurate
    to roughly the size of the last term rather than the tail.
    """
    if not (0.5 < alpha <= 1.0):
        raise OutOfDomain(f"series converges only for alpha in (1/2, 1], got {alpha!r}")
    if tol <= 0.0:
        raise OutOfDomain("tol must be positive")
    total = 1.0  # k = 0 term
    term = 1.0
    k = 0
    chunk = 1 << 16
    while k < max_terms:
        ks = np.arange(k + 1, k + 1 + chunk, dtype=np.float64)
        terms = term * np.cumprod((ks / (ks + alpha)) ** 2)
        partials = total + np.cumsum(terms)
        done = (terms < tol * partials) & (ks > 10)
        if done.any():
            stop = int(np.argmax(done))
            total = float(partials[stop])
            term = float(terms[stop])
            k = int(ks[stop])
            break
        total = float(partials[-1])
        term = float(terms[-1])
        k = int(ks[-1])
        chunk = min(chunk * 2, 1 << 22)
    else:
        raise TooSlowConvergence(
            f"no convergence after {max_terms} terms (alpha = {alpha!r})"
        )
    # tail from the first omitted index m: sum_{j>=m} t_j with
    # t_j ~ C (j+s)^(-2a), s = (1+alpha)/2 (midpoint shift of the gamma ratio)
    m = k + 1
    t_m = term * ((m / (m + alpha)) ** 2)
    ms = m + (1.0 + alpha) / 2.0
    tail = t_m * (ms / (2.0 * alpha - 1.0) + 0.5 + alpha / (6.0 * ms))
    return total + tail


def _constants(params_or_constants) -> DerivedConstants:
    if isinstance(params_or_constants, DerivedConstants):
        return params_or_constants
    return derive_constants(params_or_constants)


def expected_s(params: ModelParams, n):
    """Exact E[S_n] from the closed form beta a_n + omega a_n sum 1/a_{l+1}.

    `n` may be an int or an array of ints; arrays return an array.
    """
    c = _constants(params)
    if c.alpha < 0.0:
        raise OutOfDomain("expected_s requires alpha >= 0 (p >= q)")
    a_n = growth_values(c.alpha, n)
    ns = np.asarray(n, dtype=np.float64)
    return c.beta * a_n + c.omega * a_n * (
        ns / ((1.0 - c.alpha) * a_n) + 1.0 / (c.alpha - 1.0)
    )


def expected_z(params: ModelParams, n):
    """Exact E[Z_n]; same closed form with (psi, gamma, tau, b_n)."""
    c = _constants(params)
    if c.alpha < 0.0:
        raise OutOfDomain("expected_z requires alpha >= 0 (p >= q)")
    b_n = growth_values(c.gamma, n)
    ns = np.asarray(n, dtype=np.float64)
    return c.psi * b_n + c.tau * b_n * (
        ns / ((1.0 - c.gamma) * b_n) + 1.0 / (c.gamma - 1.0)
    )


@dataclass(frozen=True)
class RegimePrediction:
    """Limit-theorem predictions induced by the regime of alpha."""

    regime: Regime
    alpha: float
    phi: float
    lln_limit: float       # a.s. limit of S_n / n
    z_lln_limit: float     # a.s. limit of Z_n / n
    degenerate: bool       # phi = 0: variance scales collapse
    scale_formula: str

    def variance_scale(self, n) -> float:
        """Predicted Var(S_n) scale; for superdiffusive, the residual scale."""
        if self.regime is Regime.SUPERDIFFUSIVE:
            return self.residual_scale(n)
        n = np.asarray(n, dtype=np.float64)
        if self.regime is Regime.DIFFUSIVE:
            out = self.phi * n / (1.0 - 2.0 * self.alpha)
        else:
            out = self.phi * n * np.log(n)
        return out if out.ndim else float(out)

    def residual_scale(self, n):
        """Gaussian residual scale phi n / (2 alpha - 1) (superdiffusive)."""
        if self.regime is not Regime.SUPERDIFFUSIVE:
            raise WrongRegime(
                f"residual scale is superdiffusive-only, regime is {self.regime.value}"
            )
        n = np.asarray(n, dtype=np.float64)
        out = self.phi * n / (2.0 * self.alpha - 1.0)
        return out if out.ndim else float(out)

    def tail_sum_r2(self, n, a_n):
        """Asymptotic tail sum r_n^2 ~ phi n / ((2 alpha - 1) a_n^2)."""
        return self.residual_scale(n) / np.asarray(a_n, dtype=np.float64) ** 2


def regime_prediction(params: ModelParams) -> RegimePrediction:
    c = _constants(params)
    if c.alpha < 0.0:
        raise OutOfDomain("regime predictions require alpha >= 0 (p >= q)")
    degenerate = c.phi == 0.0
    if c.regime is Regime.DIFFUSIVE:
        formula = f"{c.phi:.6g} * n / {1.0 - 2.0 * c.alpha:.6g}"
    elif c.regime is Regime.CRITICAL:
        formula = f"{c.phi:.6g} * n * log(n)"
    else:
        formula = (
            f"E[W^2] * a_n^2 + {c.phi:.6g} * n / {2.0 * c.alpha - 1.0:.6g}"
            " (residual scale)"
        )
    return RegimePrediction(
        regime=c.regime,
        alpha=c.alpha,
        phi=c.phi,
        lln_limit=c.omega / (1.0 - c.alpha),
        z_lln_limit=c.tau / (1.0 - c.gamma),
        degenerate=degenerate,
        scale_formula=formula,
    )


def lil_envelope(params: ModelParams, n):
    """Iterated-logarithm envelope (the denominator of the limsup statement).

    Diffusive:   sqrt(2 (phi/(1-2a)) n loglog((phi G^2/(1-2a)) n^(1-2a)))
    Critical:    sqrt(2 phi n log n loglog(phi Gamma(3/2) log n))
    Superdiff.:  sqrt(2 (phi/(2a-1)) n log|log((phi G^2/(2a-1)) n^(1-2a))|)

    with G = Gamma(alpha + 1). Raises DomainTooSmall while the inner
    (absolute) logarithm is still <= 1, i.e. before loglog turns positive.
    """
    c = _constants(params)
    if c.alpha < 0.0:
        raise OutOfDomain("LIL envelope requires alpha >= 0")
    if c.phi <= 0.0:
        raise Degenerate("LIL envelope undefined for phi = 0")
    scalar = np.ndim(n) == 0
    ns = np.atleast_1d(np.asarray(n, dtype=np.float64))
    if (ns < 2).any():
        raise DomainTooSmall("envelope needs n >= 2")
    g2 = math.gamma(c.alpha + 1.0) ** 2
    if c.regime is Regime.DIFFUSIVE:
        span = 1.0 - 2.0 * c.alpha
        inner = np.log(c.phi * g2 / span * ns ** span)
        scale = (c.phi / span) * ns
    elif c.regime is Regime.CRITICAL:
        inner = np.log(c.phi * math.gamma(1.5) * np.log(ns))
        scale = c.phi * ns * np.log(ns)
    else:
        span = 2.0 * c.alpha - 1.0
        with np.errstate(divide="ignore"):
            inner = np.abs(np.log(c.phi * g2 / span * ns ** (-span)))
        scale = (c.phi / span) * ns
    if (inner <= 1.0).any():
        raise DomainTooSmall(
            "inner log-log argument <= 1; increase n before using the envelope"
        )
    env = np.sqrt(2.0 * scale * np.log(inner))
    return float(env[0]) if scalar else env
