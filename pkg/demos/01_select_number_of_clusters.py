"""
Choosing the number of clusters
===============================

Score every candidate k in a range with four validity criteria, turn the
scores into confidences and pick the k with the best average.
"""

import numpy as np

from kselect import KRange, SynthSpec, confidence_table, generate_block_affinity, select_k, spectral_cluster
from kselect import CRITERIA, error_rate

# A noisy affinity matrix with 4 planted groups of 15 samples
affinity, truth = generate_block_affinity(SynthSpec(k=4, per_cluster=15, within_low=0.6, cross_high=0.35, seed=3))
print(f"n = {affinity.n}, planted k = {truth.K}")

###############################################################################
# Raw scores and normalized confidences for k = 2..6
table = confidence_table(affinity, KRange(2, 6), seed=42)

print("k   " + "  ".join(f"{c:>10s}" for c in CRITERIA) + "     average")
for i, k in enumerate(table.k_values):
    conf = "  ".join(f"{table.confidence[c][i]:10.3f}" for c in CRITERIA)
    print(f"{k:<3d} {conf}  {table.average[i]:10.3f}")

###############################################################################
# Every strategy reads the same table
for strategy in ("average", "voting", "random") + CRITERIA:
    print(f"{strategy:>10s}: k = {select_k(table, strategy, seed=1)}")

###############################################################################
# Cluster with the selected k and compare to the planted labels
k = select_k(table, "average")
labels = spectral_cluster(affinity, k, seed=42)
print(f"error rate at k={k}: {error_rate(labels, truth):.2f}%")
np.set_printoptions(linewidth=120)
print(labels.labels)
