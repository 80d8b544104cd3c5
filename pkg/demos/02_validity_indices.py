"""
The four validity criteria on their own
=======================================

Silhouette works on a distance matrix; Davies-Bouldin and Calinski-Harabasz
work on coordinates; the eigengap comes straight from the Laplacian spectrum.
"""

import numpy as np

from kselect import AffinityMatrix, DistanceMatrix, calinski_harabasz, davies_bouldin, eigengap_gaps, silhouette

rng = np.random.default_rng(0)
centers = np.array([[0.0, 0.0], [4.0, 0.0], [0.0, 4.0]])
planted = np.repeat(np.arange(3), 20)
points = centers[planted] + rng.normal(scale=0.6, size=(60, 2))

dist = np.linalg.norm(points[:, None] - points[None], axis=2)
dist = DistanceMatrix(dist / dist.max())

###############################################################################
# Planted labels against a random relabeling: every criterion prefers the
# planted one (silhouette and CH higher, DB lower).
shuffled = rng.permutation(planted)
for name, labels in (("planted", planted), ("shuffled", shuffled)):
    print(f"{name:>9s}: silhouette={silhouette(dist, labels):.3f} "
          f"DB={davies_bouldin(points, labels):.3f} CH={calinski_harabasz(points, labels):.1f}")

###############################################################################
# Eigengap: a Gaussian affinity built from the same points has its largest
# low-end gap after the third eigenvalue.
affinity = AffinityMatrix(np.exp(-(dist.values * 6) ** 2))
gaps = eigengap_gaps(affinity)
print("first gaps:", np.round(gaps[:6], 4))
print("argmax over k in [2, 5]:", 2 + int(np.argmax(gaps[1:5])))
