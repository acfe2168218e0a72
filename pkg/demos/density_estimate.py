"""Approximate density from order statistics, and why it is noisy.

Each point is a difference quotient over delta consecutive order statistics.
Its relative error is about 1/sqrt(delta), so delta = 25 gives roughly 20%
noise per point whatever the sample size.
"""

import numpy as np
from scipy.integrate import trapezoid

from ndsan import Triangular, Trivial, approximate_density, ecdf, run_batch

law = Triangular(0, 1, 2)
emp = ecdf(run_batch(Trivial("a", law), 10**5, master_seed=88))

for delta in (25, 400, 2500):
    est = approximate_density(emp, delta)
    t, f = est.abscissae, est.values
    inside = (t >= 0.1) & (t <= 1.9)
    err = np.abs(f[inside] - law.pdf(t[inside]))
    print(
        "delta=%5d  points=%5d  integral=%.3f  max error=%.3f  median error=%.3f"
        % (delta, len(t), trapezoid(f, t), err.max(), np.median(err))
    )
