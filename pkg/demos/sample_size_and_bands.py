"""Sample-size planning and confidence bands from the KS distribution."""

import numpy as np

from ndsan import (
    Acyclic,
    Constant,
    Triangular,
    Trivial,
    analyze,
    confidence_band,
    ecdf,
    plan_sample_size,
    run_batch,
)

for e, c in [(0.15, 0.80), (0.05, 0.95), (0.02, 0.95), (0.02, 0.99)]:
    plan = plan_sample_size(e, c)
    print("error %.2f at %.0f%% confidence: N = %d (K = %.4f)" % (e, 100 * c, plan.N, plan.critical_value))

# A small network whose exact CDF is known: one task, then two in parallel.
net = Acyclic(
    [
        Trivial("design", Triangular(2, 4, 5)),
        Trivial("build", Triangular(1, 2, 3)),
        Trivial("test", Triangular(1, 2, 3)),
        Trivial("done", Constant(0)),
    ],
    [(0, 1), (0, 2), (1, 3), (2, 3)],
)
exact = analyze(net, h=0.01)
grid, F = exact.grid, exact.cdf_at(exact.grid)

# With N = 50 the 90% band should contain the true CDF in about 90% of batches.
hits = 0
for seed in range(200):
    lower, upper = confidence_band(ecdf(run_batch(net, 50, seed)), 0.10)
    hits += bool(np.all((lower(grid) <= F) & (F <= upper(grid))))
print("band coverage over 200 batches: %.3f" % (hits / 200))
