"""How decisions and loops change a completion time.

A decision picks exactly one branch. A loop runs its body again with the
probability listed for each passage; the last probability is 0, so the
number of repetitions is bounded.
"""

import numpy as np

from ndsan import Constant, Decision, Loop, Trivial, analyze, run_batch


def c(value, name="c"):
    return Trivial(name, Constant(value))


# Two ways forward: a short one (1 day) taken 55% of the time, a long one (2 days).
decision = Decision(c(0, "fork"), [(0.55, c(1, "short")), (0.45, c(2, "long"))], c(0, "join"))
x = run_batch(decision, 10**6, master_seed=1).times
print("decision: P(T=1) = %.4f, P(T=2) = %.4f" % (np.mean(x == 1), np.mean(x == 2)))

# A rework loop: repeat the 2-day body with probability 0.5, then 0.2, then stop.
loop = Loop(c(0, "enter"), c(2, "rework"), c(0, "leave"), [0.5, 0.2, 0.0])
x = run_batch(loop, 10**6, master_seed=2).times
for value in (0, 2, 4):
    print("loop: P(T=%d) = %.4f" % (value, np.mean(x == value)))

# The grid oracle gives the same answer without sampling.
exact = analyze(loop, h=0.01)
for t, m in zip(exact.grid, exact.mass):
    if m > 0:
        print("loop, exact: P(T=%g) = %.4f" % (t, m))
