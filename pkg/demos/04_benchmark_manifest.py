"""
Benchmarking selection strategies over a manifest
=================================================

Write a small synthetic dataset in the on-disk formats (matrices, labels and
a manifest), then compare strategies by MSE of the predicted k, exact-hit
accuracy and segmentation error rate, with a per-k breakdown.
"""

import tempfile
from pathlib import Path

from kselect import KRange, SequenceRecord, SynthSpec, evaluate_manifest, generate_block_affinity, read_manifest
from kselect import write_labels, write_matrix
from kselect.evalbench import format_report, write_manifest

# Same mix of group counts as a 22-sequence benchmark: 12 x 2, 4 x 3, 5 x 4, 1 x 5
composition = [2] * 12 + [3] * 4 + [4] * 5 + [5]

workdir = Path(tempfile.mkdtemp(prefix="kselect-demo-"))
records = []
for i, k in enumerate(composition):
    views = []
    for v in range(2):
        a, labels = generate_block_affinity(SynthSpec(k, 8, 0.5, 1.0, 0.0, 0.45, seed=100 * i + v))
        write_matrix(workdir / f"seq{i:02d}_v{v}.mat", a)
        views.append(workdir / f"seq{i:02d}_v{v}.mat")
    write_labels(workdir / f"seq{i:02d}.lbl", labels)
    records.append(SequenceRecord(f"seq{i:02d}", tuple(views), k, workdir / f"seq{i:02d}.lbl"))
write_manifest(workdir / "manifest.csv", records)
print("dataset written to", workdir)

###############################################################################
records = read_manifest(workdir / "manifest.csv")
print(f"{'strategy':>10s} {'MSE':>7s} {'acc %':>7s} {'err %':>7s} {'base %':>7s}")
for strategy in ("silhouette", "eigengap", "db", "ch", "random", "voting", "average"):
    agg = evaluate_manifest(records, KRange(2, 5), strategy, seed=42).aggregate
    print(f"{strategy:>10s} {agg['mse']:7.3f} {agg['accuracy']:7.2f} {agg['error_rate']:7.2f} {agg['baseline_error_rate']:7.2f}")

###############################################################################
# The full report for one strategy, as written by ``kselect evaluate``
print(format_report(evaluate_manifest(records, KRange(2, 5), "average", seed=42)))
