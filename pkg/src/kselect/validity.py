"""Cluster validity indices used to score candidate cluster counts."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .matrix import AffinityMatrix, DistanceMatrix, laplacian, sym_eigensolve
from .spectral import ClusterAssignment

DB_RATIO_CAP = 1e12
CH_SENTINEL = 1e12
MIN_CENTROID_DIST = 1e-12


def _labels(labels) -> ClusterAssignment:
    if isinstance(labels, ClusterAssignment):
        return labels
    return ClusterAssignment.from_labels(labels)


def _points(e) -> np.ndarray:
    x = np.asarray(getattr(e, "coords", e), dtype=float)
    return x[:, None] if x.ndim == 1 else x


@dataclass(frozen=True)
class ClusterStats:
    """Per-cluster sizes, centroids and mean member-to-centroid distances."""

    K: int
    sizes: np.ndarray
    centroids: np.ndarray
    global_centroid: np.ndarray
    scatters: np.ndarray

    @classmethod
    def compute(cls, e, labels) -> "ClusterStats":
        x = _points(e)
        lab = _labels(labels)
        if x.shape[0] != lab.n:
            raise InvalidInputError(f"{x.shape[0]} points but {lab.n} labels")
        sizes = np.bincount(lab.labels, minlength=lab.K)
        centroids = np.zeros((lab.K, x.shape[1]))
        np.add.at(centroids, lab.labels, x)
        centroids /= sizes[:, None]
        member_dist = np.linalg.norm(x - centroids[lab.labels], axis=1)
        scatters = np.bincount(lab.labels, weights=member_dist, minlength=lab.K) / sizes
        return cls(lab.K, sizes, centroids, x.mean(axis=0), scatters)


def silhouette(d: DistanceMatrix, labels) -> float:
    """Mean silhouette width on a precomputed distance matrix.

    Members of singleton clusters score 0.
    """
    dist = np.asarray(getattr(d, "values", d), dtype=float)
    lab = _labels(labels)
    if lab.K < 2:
        raise InvalidInputError("silhouette needs at least 2 clusters")
    if dist.shape[0] != lab.n:
        raise InvalidInputError(f"distance matrix has n={dist.shape[0]} but there are {lab.n} labels")
    onehot = np.zeros((lab.n, lab.K))
    onehot[np.arange(lab.n), lab.labels] = 1.0
    sizes = onehot.sum(axis=0)
    sums = dist @ onehot
    own = lab.labels
    own_size = sizes[own]
    a = np.where(own_size > 1, sums[np.arange(lab.n), own] / np.maximum(own_size - 1, 1), 0.0)
    means = sums / sizes
    means[np.arange(lab.n), own] = np.inf
    b = means.min(axis=1)
    denom = np.maximum(a, b)
    s = np.where(denom > 0, (b - a) / np.where(denom > 0, denom, 1.0), 0.0)
    s = np.where(own_size > 1, s, 0.0)
    return float(np.mean(s))


def eigengap_gaps(a: AffinityMatrix, spectrum=None) -> np.ndarray:
    """Differences of consecutive ascending Laplacian eigenvalues.

    ``gaps[i - 1]`` scores the candidate cluster count ``i``.
    """
    if spectrum is None:
        spectrum = sym_eigensolve(laplacian(a))
    return np.diff(spectrum.eigenvalues)


def davies_bouldin(e, labels) -> float:
    stats = ClusterStats.compute(e, labels)
    if stats.K < 2:
        raise InvalidInputError("Davies-Bouldin needs at least 2 clusters")
    c = stats.centroids
    sep = np.linalg.norm(c[:, None, :] - c[None, :, :], axis=2)
    spread = stats.scatters[:, None] + stats.scatters[None, :]
    close = sep < MIN_CENTROID_DIST
    ratio = np.where(close, DB_RATIO_CAP, spread / np.where(close, 1.0, sep))
    ratio = np.minimum(ratio, DB_RATIO_CAP)
    np.fill_diagonal(ratio, -np.inf)
    return float(np.mean(ratio.max(axis=1)))


def calinski_harabasz(e, labels) -> float:
    """Variance-ratio criterion with squared Euclidean distances.

    Values are capped at ``CH_SENTINEL``, which is also returned when
    clusters are internally collapsed but distinct; 0 when all points
    coincide.
    """
    x = _points(e)
    stats = ClusterStats.compute(x, labels)
    n, K = x.shape[0], stats.K
    if K < 2:
        raise InvalidInputError("Calinski-Harabasz needs at least 2 clusters")
    if K >= n:
        raise InvalidInputError(f"Calinski-Harabasz needs K < n, got K={K}, n={n}")
    lab = _labels(labels).labels
    between = float(np.sum(stats.sizes * np.sum((stats.centroids - stats.global_centroid) ** 2, axis=1)))
    within = float(np.sum((x - stats.centroids[lab]) ** 2))
    if within == 0.0:
        return CH_SENTINEL if between > 0 else 0.0
    return min((between / (K - 1)) / (within / (n - K)), CH_SENTINEL)
