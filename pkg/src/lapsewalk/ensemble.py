"""Seeded parallel ensembles with streaming moment accumulation.

Trajectory i always draws from RNG stream i, and trajectories are processed
in fixed-size chunks whose boundaries do not depend on the worker count, so
an ensemble result is a pure function of (params, n_steps, n_traj,
master_seed, snapshots, reservoir_k): scheduling can only change wall time,
never a bit of the output. Chunks run the walk in lockstep over numpy
arrays (one lane per trajectory), which is what makes 1e9 total steps
feasible without leaving float64 determinism.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .analytic import expected_s, growth_values, lil_envelope
from .errors import Degenerate, DomainTooSmall, InvalidState, WrongRegime
from .model import ModelParams, Regime, derive_constants
from .rng import RngStream, Xoshiro256Batch

CHUNK_SIZE_DEFAULT = 4096
HORIZON_FACTOR_MIN = 16


def dyadic_snapshots(n_max: int):
    """Default snapshot grid {16, 32, ...} up to and including n_max."""
    if n_max < 16:
        return [n_max]
    out = []
    m = 16
    while m <= n_max:
        out.append(m)
        m *= 2
    if out[-1] != n_max:
        out.append(n_max)
    return out


@dataclass
class MomentAccumulator:
    """Streaming count/mean and central moment sums up to fourth order.

    m2..m4 are the power sums of (x - mean); merging uses the parallel
    update formulas (Chan et al. / Pebay), which need m3 even if only m4 is
    reported, so m3 is carried too. Merging is associative up to float
    roundoff and exactly reproducible for a fixed merge order.
    """

    count: int = 0
    mean: float = 0.0
    m2: float = 0.0
    m3: float = 0.0
    m4: float = 0.0
    min: float = float("inf")
    max: float = float("-inf")

    @classmethod
    def from_values(cls, values) -> "MomentAccumulator":
        x = np.asarray(values, dtype=np.float64)
        if x.size == 0:
            return cls()
        mean = float(x.mean())
        d = x - mean
        d2 = d * d
        return cls(
            count=int(x.size),
            mean=mean,
            m2=float(d2.sum()),
            m3=float((d2 * d).sum()),
            m4=float((d2 * d2).sum()),
            min=float(x.min()),
            max=float(x.max()),
        )

    def merge(self, other: "MomentAccumulator") -> "MomentAccumulator":
        if other.count == 0:
            return MomentAccumulator(**vars(self))
        if self.count == 0:
            return MomentAccumulator(**vars(other))
        na, nb = self.count, other.count
        n = na + nb
        delta = other.mean - self.mean
        d_n = delta / n
        mean = self.mean + d_n * nb
        m2 = self.m2 + other.m2 + delta * d_n * na * nb
        m3 = (
            self.m3 + other.m3
            + delta * d_n * d_n * na * nb * (na - nb)
            + 3.0 * d_n * (na * other.m2 - nb * self.m2)
        )
        m4 = (
            self.m4 + other.m4
            + delta * d_n ** 3 * na * nb * (na * na - na * nb + nb * nb)
            + 6.0 * d_n * d_n * (na * na * other.m2 + nb * nb * self.m2)
            + 4.0 * d_n * (na * other.m3 - nb * self.m3)
        )
        return MomentAccumulator(
            count=n, mean=mean, m2=m2, m3=m3, m4=m4,
            min=min(self.min, other.min), max=max(self.max, other.max),
        )

    def standardized(self, center: float, scale: float) -> "MomentAccumulator":
        """Accumulator of (x - center)/scale, scale > 0, without raw data."""
        assert scale > 0.0
        return MomentAccumulator(
            count=self.count,
            mean=(self.mean - center) / scale,
            m2=self.m2 / scale ** 2,
            m3=self.m3 / scale ** 3,
            m4=self.m4 / scale ** 4,
            min=(self.min - center) / scale,
            max=(self.max - center) / scale,
        )

    @property
    def variance(self) -> float:
        return self.m2 / (self.count - 1) if self.count > 1 else 0.0

    @property
    def stderr(self) -> float:
        return (self.variance / self.count) ** 0.5 if self.count else 0.0


@dataclass
class EnsembleResult:
    params: ModelParams
    n_steps: int
    n_traj: int
    master_seed: int
    snapshots: list
    acc_s: list
    acc_z: list
    reservoir_k: int = 0
    sample_s: list = None   # reservoir of raw S values per snapshot
    acc_m: list = None      # filled by martingale_track


def _simulate_chunk(params: ModelParams, n_steps, snaps, master_seed, lo, hi):
    """Lockstep walk of trajectories [lo, hi); returns S, Z at snapshots."""
    p, q, theta = params.p, params.q, params.theta
    rng = Xoshiro256Batch(master_seed, np.arange(lo, hi, dtype=np.uint64))
    width = hi - lo
    n_plus = np.zeros(width)
    n_minus = np.zeros(width)
    s_rows = np.empty((len(snaps), width))
    z_rows = np.empty((len(snaps), width))
    is_snap = np.zeros(n_steps + 1, dtype=bool)
    is_snap[np.asarray(snaps, dtype=np.int64)] = True
    row = 0

    const_plus = (1.0 - theta) * p
    const_minus = (1.0 - theta) * q
    first_cum = p + q

    u = rng.uniforms()
    plus = u < p
    minus = (~plus) & (u < first_cum)
    n_plus += plus
    n_minus += minus
    if is_snap[1]:
        s_rows[row] = n_plus - n_minus
        z_rows[row] = n_plus + n_minus
        row += 1
    for m in range(1, n_steps):
        u = rng.uniforms()
        th_m = theta / m
        p_plus = (n_plus * p + n_minus * q) * th_m + const_plus
        cum = p_plus + (n_minus * p + n_plus * q) * th_m + const_minus
        plus = u < p_plus
        minus = (~plus) & (u < cum)
        n_plus += plus
        n_minus += minus
        if is_snap[m + 1]:
            s_rows[row] = n_plus - n_minus
            z_rows[row] = n_plus + n_minus
            row += 1
    return s_rows, z_rows


def _reservoir_sample(values, k, stream: RngStream):
    """Algorithm R over values in index order; full copy when k >= len."""
    n = values.size
    if k >= n:
        return values.copy()
    res = values[:k].copy()
    for i in range(k, n):
        j = int(stream.uniform() * (i + 1))
        if j < k:
            res[j] = values[i]
    return res


def _chunk_job(task):
    """Worker entry point (module-level so it pickles for process pools)."""
    params, n_steps, snaps, master_seed, lo, hi, keep_raw = task
    s_rows, z_rows = _simulate_chunk(params, n_steps, snaps, master_seed, lo, hi)
    accs_s = [MomentAccumulator.from_values(r) for r in s_rows]
    accs_z = [MomentAccumulator.from_values(r) for r in z_rows]
    return accs_s, accs_z, (s_rows if keep_raw else None)


def run_ensemble(params: ModelParams, n_steps: int, n_traj: int,
                 snapshots=None, master_seed: int = 0, reservoir_k: int = 0,
                 workers: int = 1,
                 chunk_size: int = CHUNK_SIZE_DEFAULT) -> EnsembleResult:
    """Simulate n_traj seeded trajectories, accumulating at snapshot times.

    With reservoir_k > 0 a reservoir of raw S values (per snapshot) is kept;
    the reservoir's own randomness comes from stream index n_traj so that it
    never perturbs the trajectories. workers > 1 fans chunks out to a
    process pool; chunks are pure functions of the trajectory indices in
    them and are folded in index order, so the result is identical for any
    worker count.
    """
    if n_steps < 1 or n_traj < 1:
        raise InvalidState("n_steps and n_traj must be >= 1")
    if snapshots is None or len(snapshots) == 0:
        snaps = dyadic_snapshots(n_steps)
    else:
        snaps = sorted(set(int(m) for m in snapshots))
    if snaps[0] < 1 or snaps[-1] > n_steps:
        raise InvalidState("snapshots must lie in [1, n_steps]")
    keep_raw = reservoir_k > 0

    tasks = [
        (params, n_steps, snaps, master_seed, lo, min(lo + chunk_size, n_traj),
         keep_raw)
        for lo in range(0, n_traj, chunk_size)
    ]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunk_results = list(pool.map(_chunk_job, tasks))
    else:
        chunk_results = [_chunk_job(t) for t in tasks]

    # fold in chunk-index order: bit-identical for any worker count
    acc_s = [MomentAccumulator() for _ in snaps]
    acc_z = [MomentAccumulator() for _ in snaps]
    for accs_s, accs_z, _raw in chunk_results:
        acc_s = [a.merge(b) for a, b in zip(acc_s, accs_s)]
        acc_z = [a.merge(b) for a, b in zip(acc_z, accs_z)]

    sample_s = None
    if keep_raw:
        stream = RngStream(master_seed, n_traj)
        sample_s = []
        for i in range(len(snaps)):
            raw = np.concatenate([cr[2][i] for cr in chunk_results])
            sample_s.append(_reservoir_sample(raw, reservoir_k, stream))

    return EnsembleResult(
        params=params, n_steps=n_steps, n_traj=n_traj,
        master_seed=master_seed, snapshots=snaps,
        acc_s=acc_s, acc_z=acc_z,
        reservoir_k=reservoir_k, sample_s=sample_s,
    )


def ensembles_identical(a: EnsembleResult, b: EnsembleResult) -> bool:
    """Bitwise equality of two ensemble results (determinism checks)."""
    if (a.snapshots != b.snapshots or a.n_steps != b.n_steps
            or a.n_traj != b.n_traj):
        return False
    if a.acc_s != b.acc_s or a.acc_z != b.acc_z:
        return False
    if (a.sample_s is None) != (b.sample_s is None):
        return False
    if a.sample_s is not None:
        return all(np.array_equal(x, y) for x, y in zip(a.sample_s, b.sample_s))
    return True


def martingale_track(params: ModelParams, ensemble: EnsembleResult):
    """Accumulators of M_n = (S_n - E S_n)/a_n at every snapshot.

    M is an affine map of S per snapshot, so the statistics follow exactly
    from acc_s without raw trajectories. Cached on ensemble.acc_m.
    """
    c = derive_constants(params)
    snaps = np.asarray(ensemble.snapshots, dtype=np.int64)
    means = np.atleast_1d(expected_s(params, snaps))
    norms = np.atleast_1d(growth_values(c.alpha, snaps))
    acc_m = [
        acc.standardized(float(means[i]), float(norms[i]))
        for i, acc in enumerate(ensemble.acc_s)
    ]
    ensemble.acc_m = acc_m
    return acc_m


@dataclass
class WEstimate:
    """Monte Carlo estimate of the superdiffusive limit variable W."""

    n_used: int
    mean_w: float
    var_w: float
    stderr: float
    sample: np.ndarray = field(repr=False, default=None)


def estimate_w(params: ModelParams, n_steps: int, n_traj: int,
               master_seed: int = 0, workers: int = 1,
               chunk_size: int = CHUNK_SIZE_DEFAULT) -> WEstimate:
    """Estimate W by M_{n_steps} per trajectory (superdiffusive only)."""
    c = derive_constants(params)
    if c.regime is not Regime.SUPERDIFFUSIVE:
        raise WrongRegime(f"W exists only for alpha > 1/2; regime is {c.regime.value}")
    ens = run_ensemble(params, n_steps, n_traj, snapshots=[n_steps],
                       master_seed=master_seed, reservoir_k=n_traj,
                       workers=workers, chunk_size=chunk_size)
    raw = ens.sample_s[0]
    mean_s = float(expected_s(params, n_steps))
    a_n = growth_values(c.alpha, n_steps)
    w = (raw - mean_s) / a_n
    var_w = float(w.var(ddof=1))
    return WEstimate(
        n_used=n_traj,
        mean_w=float(w.mean()),
        var_w=var_w,
        stderr=(var_w / n_traj) ** 0.5,
        sample=w,
    )


def bootstrap_variance_ci(sample, n_boot: int = 1000, level: float = 0.99,
                          seed: int = 20210905):
    """Percentile bootstrap CI for the sample variance (fixed own seed)."""
    x = np.asarray(sample, dtype=np.float64)
    rng = np.random.default_rng(seed)
    vs = np.empty(n_boot)
    for b in range(n_boot):
        idx = rng.integers(0, x.size, x.size)
        vs[b] = x[idx].var(ddof=1)
    half = 100.0 * (1.0 - level) / 2.0
    return float(np.percentile(vs, half)), float(np.percentile(vs, 100.0 - half))


def residual_clt_sample(params: ModelParams, n_steps: int, n_traj: int,
                        master_seed: int = 0,
                        horizon_factor: int = HORIZON_FACTOR_MIN,
                        workers: int = 1,
                        chunk_size: int = CHUNK_SIZE_DEFAULT) -> np.ndarray:
    """Standardized residuals (S_n - E S_n - W_hat a_n)/sqrt(phi n/(2a-1)).

    W_hat is the per-trajectory martingale value at the far horizon
    n_far = horizon_factor * n_steps. horizon_factor < 16 is refused: at
    n_far = n_steps the residuals are identically zero, and small factors
    leave most of the limit variable unresolved.
    """
    c = derive_constants(params)
    if c.regime is not Regime.SUPERDIFFUSIVE:
        raise WrongRegime(f"residual CLT needs alpha > 1/2; regime is {c.regime.value}")
    if c.phi <= 0.0:
        raise Degenerate("phi = 0: residuals cannot be standardized")
    if horizon_factor < HORIZON_FACTOR_MIN:
        raise InvalidState(f"horizon_factor must be >= {HORIZON_FACTOR_MIN}")
    n_far = horizon_factor * n_steps
    ens = run_ensemble(params, n_far, n_traj, snapshots=[n_steps, n_far],
                       master_seed=master_seed, reservoir_k=n_traj,
                       workers=workers, chunk_size=chunk_size)
    s_near, s_far = ens.sample_s
    ns = np.array([n_steps, n_far], dtype=np.int64)
    means = expected_s(params, ns)
    norms = growth_values(c.alpha, ns)
    w_hat = (s_far - means[1]) / norms[1]
    scale = (c.phi * n_steps / (2.0 * c.alpha - 1.0)) ** 0.5
    return (s_near - means[0] - w_hat * norms[0]) / scale


@dataclass
class LilDiagnostic:
    """Trace of the running LIL statistic; diagnostic only, no pass/fail."""

    params: ModelParams
    snapshots: np.ndarray
    envelopes: np.ndarray
    running_max: np.ndarray  # (n_snapshots, n_traj)

    @property
    def final_stats(self) -> np.ndarray:
        return self.running_max[-1]

    def median_trace(self) -> np.ndarray:
        return np.median(self.running_max, axis=1)


def lil_diagnostic(params: ModelParams, n_max: int, n_traj: int,
                   master_seed: int = 0, workers: int = 1,
                   chunk_size: int = CHUNK_SIZE_DEFAULT) -> LilDiagnostic:
    """Running max of |S_n - E S_n| / lil_envelope(n) over dyadic n.

    The limsup itself is untestable at finite n; this emits the statistic's
    trace so its magnitude and reproducibility can be inspected.
    """
    candidates = dyadic_snapshots(n_max)
    snaps, envs = [], []
    for m in candidates:
        try:
            envs.append(lil_envelope(params, m))
            snaps.append(m)
        except DomainTooSmall:
            continue
    if not snaps:
        raise DomainTooSmall(f"no dyadic snapshot up to {n_max} has a valid envelope")
    ens = run_ensemble(params, n_max, n_traj, snapshots=snaps,
                       master_seed=master_seed, reservoir_k=n_traj,
                       workers=workers, chunk_size=chunk_size)
    snaps_arr = np.asarray(snaps, dtype=np.int64)
    means = np.atleast_1d(expected_s(params, snaps_arr))
    envs_arr = np.asarray(envs)
    stat = np.vstack([
        np.abs(ens.sample_s[i] - means[i]) / envs_arr[i]
        for i in range(len(snaps))
    ])
    return LilDiagnostic(
        params=params,
        snapshots=snaps_arr,
        envelopes=envs_arr,
        running_max=np.maximum.accumulate(stat, axis=0),
    )
