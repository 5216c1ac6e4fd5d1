"""
Leakage in the response z
=========================

Bits of z over random columns of E are set half of the time; over identity
columns much less often. 1000 signatures split the positions cleanly.
"""

import numpy as np

from shmww import PARA1, column_probabilities
from shmww.experiments import bias_summary, run_bias_experiment, write_csv

rows = run_bias_experiment(PARA1, 1000, seed=0)
summary = bias_summary(rows)
print("closed form rho_R, rho_I:", column_probabilities(PARA1))
print("measured:", {k: round(v, 4) for k, v in summary.items()})

# a text histogram of the two clusters
freq = np.array([r["frequency"] for r in rows])
labels = np.array([r["label"] for r in rows])
bins = np.linspace(0, 0.7, 29)
for lo, hi in zip(bins[:-1], bins[1:]):
    n_id = np.sum((freq >= lo) & (freq < hi) & (labels == "identity"))
    n_r = np.sum((freq >= lo) & (freq < hi) & (labels == "random"))
    if n_id or n_r:
        print(f"{lo:.3f}  {'#' * int(np.ceil(n_id / 40)):<50} {'*' * int(np.ceil(n_r / 5))}")

write_csv(rows, "bias_para1.csv")
