"""The paper reviewing case study: simulation checked against the grid oracle.

Every composite in this network is series-parallel, so its completion time
distribution can be computed exactly on a grid and compared with the ECDF.
"""

from ndsan import analyze, critical_value, ecdf, ks_statistic, run_batch
from ndsan.netspec import load_example

net = load_example("paper-review").root
oracle = analyze(net, h=0.01)
print("grid mean: %.2f days, mass %.6f" % (oracle.mean(), oracle.total_mass))

n = 10_000
emp = ecdf(run_batch(net, n, master_seed=3))
d = ks_statistic(emp, oracle.cdf_at)
print("KS distance at N=%d: %.4f" % (n, d))
for eps in (0.20, 0.10, 0.05, 0.01):
    k = critical_value(n, eps)
    print("  eps=%.2f  K=%.4f  %s" % (eps, k, "pass" if d <= k else "fail"))

for t in (100, 110, 120, 130):
    print("P(T <= %d): simulated %.3f, exact %.3f" % (t, emp(t), oracle.cdf_at(t)))
