"""The adaptive attack: probe, pick a metric, craft.

Uses a lighter estimator than the acceptance run so it finishes in
about a second.  Pass --full for delta=0.05, lambda_est=64 (~10 s).

Run: python demos/04_adaptive_attack.py [--full]
"""
import sys

import numpy as np

from bklab import learn, task
from bklab.attack import EstimatorParams, full_attack

params = EstimatorParams(0.05, 64) if "--full" in sys.argv else EstimatorParams(0.1, 4)
rng = np.random.default_rng(4)
st = task.gen(128, 1024, 8, rng)
print("estimator samples per hybrid:", params.m)

for S in ([0, 1, 2], [2, 5, 7], list(range(8))):
    h = learn.learn_partial(st, S) if len(S) < 8 else learn.learn_all(st)
    oracle = learn.ClassifierOracle.for_model(h)
    outcome, stats = full_attack(oracle, st.handles, 1, params, 5, rng, trials=200)
    rep = outcome.report
    print(f"\nsubject keys {S}  ({h.declared_bits} bits)")
    for row in rep.trace:
        print(f"  j={row['j']}  mu={row['mu']:.3f}  mu_flip={row['mu_flip']:.3f}  {'keep' if row['kept'] else 'SENSITIVE'}")
    if outcome.ok:
        print(f"  T={sorted(outcome.T)}  fooled {stats.fooled}/200  clean {stats.clean_hits}/200  "
              f"gap={stats.gap:.3f}  admissible {stats.admissible}/200")
    else:
        print(f"  abort: {outcome.reason}")
    print("  queries:", oracle.query_count)

# For a 3-key majority the first stored feature never moves the vote on its
# own, so the walk keeps it; the remaining two are enough to fool.
