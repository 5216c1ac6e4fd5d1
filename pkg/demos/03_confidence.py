"""
How many signatures does the distinguisher need?
================================================

Theoretical confidence (exact binomial tails) against an empirical run.
Pass a trial count on the command line; the default keeps this short.
"""

import math
import sys

from shmww import PARA1, confidence_level, optimal_delta
from shmww.distinguisher import log_confidence_level
from shmww.experiments import run_confidence_experiment

trials = int(sys.argv[1]) if len(sys.argv) > 1 else 10

for N in (10, 30, 50, 70, 90, 110, 130, 150):
    d = optimal_delta(N, PARA1)
    la = log_confidence_level(N, d, PARA1)
    exact = confidence_level(N, d, PARA1, conservative=False)
    print(f"N={N:4d} delta={d:.4f} alpha={math.exp(la):.4g} (log10 {la / math.log(10):8.2f}) "
          f"exact-rule alpha={exact:.4g}")

rows = run_confidence_experiment(PARA1, [70, 90, 110, 150], trials=trials, seed=1)
for r in rows:
    print(f"N={r['N']}: theory {r['alpha_theory']:.3f}, empirical {r['alpha_empirical']:.2f} "
          f"over {trials} key pairs")
