"""The software development case study: plan, simulate, summarize.

The project is abandoned after the study phase with probability 0.45, which
splits completion times into two well separated modes.
"""

import numpy as np

from ndsan import activity_count, ecdf, histogram, plan_sample_size, run_batch
from ndsan.netspec import load_example

doc = load_example("development-process")
print(doc.name, "-", activity_count(doc.root), "activities")

# Replications for a KS error of 0.02 at 95% confidence.
plan = plan_sample_size(0.02, 0.95)
print("replications needed:", plan.N)

batch = run_batch(doc.root, plan.N, master_seed=2024)
x = np.sort(batch.times)
gap = int(np.argmax(np.diff(x)))
print("gap between modes: (%.1f, %.1f) days" % (x[gap], x[gap + 1]))
print("lower-mode mass: %.3f (abandonment probability 0.45)" % ((gap + 1) / x.size))

F = ecdf(batch)
for p in (0.05, 0.5, 0.95):
    print("quantile %.2f: %.1f days" % (p, F.quantile(p)))

# Text histogram with 1-day bins (a, b], labelled by b.
for edge, count in histogram(batch, 1.0):
    if count:
        print("%5.0f %s" % (edge, "#" * max(1, count // 20)))
