"""Exact finite-n ground truth, three independent ways.

For small n we can afford to enumerate every path; the (S_n, Z_n) pair is
Markov, so a dynamic program reproduces the same joint law in O(n^3); and
the first two moments close under O(n) recursions. Watching all three agree
to ~1e-13 is the backbone of every other check in this package.
"""

import numpy as np

import lapsewalk as lw

params = lw.ModelParams(0.6, 0.2, 0.2, 0.5)

print("== full law at n = 10: brute-force paths vs dynamic program ==")
de = lw.enumerate_paths(params, 10)
dd = lw.distribution_dp(params, 10)
keys = sorted(set(de.mass) | set(dd.mass))
worst = max(abs(de.mass.get(k, 0) - dd.mass.get(k, 0)) for k in keys)
print(f"atoms: {len(keys)}, worst difference: {worst:.3e}")
print("a few atoms (s, z) -> probability:")
for k in keys[:3] + keys[-3:]:
    print(f"  {k}: {dd.mass[k]:.10f}")

print()
print("== moment recursions vs the DP, n = 1..150 ==")
tab = lw.exact_moments(params, 150)
worst = 0.0
for row_dp in lw.dp_moment_scan(params, 150):
    row = tab.row(row_dp.n)
    worst = max(worst, abs(row.var_s - row_dp.var_s) / max(1.0, row_dp.var_s))
print(f"worst relative Var(S_n) difference: {worst:.3e}")

print()
print("== exact standardized CDF against the normal ==")
for n in (50, 100, 200, 400):
    d = lw.ks_distance_cdf(lw.standardized_exact_cdf(params, n))
    print(f"  n = {n:4d}: exact Kolmogorov distance {d:.4f}")
print("(the distance shrinks like the central limit theorem says it should)")

print()
print("== closed-form E[S_n] against the step recursion ==")
c = lw.derive_constants(params)
es = c.beta
for n in range(1, 10 ** 4):
    es = (1 + c.alpha / n) * es + c.omega
closed = lw.expected_s(params, 10 ** 4)
print(f"closed form {closed:.10f} vs recursion {es:.10f} "
      f"(rel diff {abs(closed - es) / es:.2e})")
