"""Spectral embedding and seeded k-means."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError
from .matrix import AffinityMatrix, Spectrum, laplacian, sym_eigensolve

N_RESTARTS = 10
MAX_ITER = 300
SHIFT_TOL = 1e-6
ZERO_ROW_TOL = 1e-12


@dataclass(frozen=True)
class Embedding:
    """Row-normalized spectral coordinates, one row per sample.

    ``zero_rows`` flags samples whose row norm was below 1e-12 before
    normalization; those rows are left as zeros.
    """

    coords: np.ndarray
    zero_rows: np.ndarray = field(default=None)

    def __post_init__(self):
        coords = np.atleast_2d(np.asarray(self.coords, dtype=float))
        object.__setattr__(self, "coords", coords)
        if self.zero_rows is None:
            object.__setattr__(self, "zero_rows", np.zeros(coords.shape[0], dtype=bool))

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def k(self) -> int:
        return self.coords.shape[1]


@dataclass(frozen=True, eq=False)
class ClusterAssignment:
    """Integer labels in ``[0, K)`` with every label value used."""

    labels: np.ndarray
    K: int = None

    def __post_init__(self):
        labels = np.asarray(self.labels)
        if labels.ndim != 1 or labels.size == 0:
            raise InvalidInputError("labels must be a nonempty 1-D sequence")
        if not np.issubdtype(labels.dtype, np.integer):
            if not np.all(np.equal(np.mod(labels, 1), 0)):
                raise InvalidInputError("labels must be integers")
        labels = labels.astype(np.int64)
        K = int(labels.max()) + 1 if self.K is None else int(self.K)
        if labels.min() < 0 or labels.max() >= K:
            raise InvalidInputError(f"labels must lie in [0, {K})")
        if np.unique(labels).size != K:
            raise InvalidInputError(f"labels leave some of the {K} clusters empty")
        labels = labels.copy()
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "K", K)

    @classmethod
    def from_labels(cls, labels) -> "ClusterAssignment":
        """Compact arbitrary integer ids to ``0..K-1`` in sorted-id order."""
        _, inverse = np.unique(np.asarray(labels), return_inverse=True)
        return cls(inverse.reshape(-1))

    @property
    def n(self) -> int:
        return self.labels.size

    def __len__(self):
        return self.labels.size

    def __eq__(self, other):
        if not isinstance(other, ClusterAssignment):
            return NotImplemented
        return self.K == other.K and np.array_equal(self.labels, other.labels)


def spectral_embed(a: AffinityMatrix, k: int, spectrum: Spectrum | None = None) -> Embedding:
    """Rows of the ``k`` lowest Laplacian eigenvectors, scaled to unit length.

    ``spectrum`` may be passed to reuse an eigendecomposition of
    ``laplacian(a)`` across several ``k``.
    """
    if not 2 <= k < a.n:
        raise InvalidInputError(f"k must satisfy 2 <= k < n (n={a.n}), got k={k}")
    if spectrum is None:
        spectrum = sym_eigensolve(laplacian(a))
    u = np.array(spectrum.eigenvectors[:, :k])
    norms = np.linalg.norm(u, axis=1)
    zero = norms < ZERO_ROW_TOL
    u[~zero] /= norms[~zero, None]
    u[zero] = 0.0
    return Embedding(u, zero)


def _sq_dists(x: np.ndarray, centers: np.ndarray) -> np.ndarray:
    d = np.sum(x * x, axis=1)[:, None] - 2.0 * x @ centers.T + np.sum(centers * centers, axis=1)[None, :]
    return np.maximum(d, 0.0)


def _plus_plus(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = x.shape[0]
    chosen = [int(rng.integers(n))]
    closest = np.sum((x - x[chosen[0]]) ** 2, axis=1)
    for _ in range(1, k):
        total = closest.sum()
        if total > 0:
            idx = int(rng.choice(n, p=closest / total))
        else:
            # every point coincides with a center already; pick an unused index
            unused = np.setdiff1d(np.arange(n), chosen)
            idx = int(rng.choice(unused))
        chosen.append(idx)
        closest = np.minimum(closest, np.sum((x - x[idx]) ** 2, axis=1))
    return x[chosen].copy()


def _repair_empty(x, labels, centers, d2):
    k = centers.shape[0]
    while True:
        counts = np.bincount(labels, minlength=k)
        empty = np.flatnonzero(counts == 0)
        if empty.size == 0:
            return labels
        own = d2[np.arange(x.shape[0]), labels]
        # only steal from clusters that can spare a member
        own = np.where(counts[labels] > 1, own, -np.inf)
        far = int(np.argmax(own))
        labels = labels.copy()
        labels[far] = empty[0]
        centers[empty[0]] = x[far]
        d2 = _sq_dists(x, centers)


def _lloyd(x: np.ndarray, k: int, rng: np.random.Generator):
    centers = _plus_plus(x, k, rng)
    d2 = _sq_dists(x, centers)
    labels = _repair_empty(x, np.argmin(d2, axis=1), centers, d2)
    for _ in range(MAX_ITER):
        new = np.zeros_like(centers)
        np.add.at(new, labels, x)
        new /= np.bincount(labels, minlength=k)[:, None]
        shift = np.max(np.linalg.norm(new - centers, axis=1))
        centers = new
        d2 = _sq_dists(x, centers)
        labels = _repair_empty(x, np.argmin(d2, axis=1), centers, d2)
        if shift < SHIFT_TOL:
            break
    inertia = float(np.sum((x - centers[labels]) ** 2))
    return labels, inertia


def _first_seen_order(labels: np.ndarray) -> np.ndarray:
    _, first = np.unique(labels, return_index=True)
    order = np.argsort(first)
    remap = np.empty_like(order)
    remap[labels[first[order]]] = np.arange(order.size)
    return remap[labels]


def kmeans(e, k: int, seed: int, n_restarts: int = N_RESTARTS) -> ClusterAssignment:
    """Lloyd's algorithm with k-means++ seeding and deterministic restarts.

    Restart ``r`` draws from ``default_rng(seed + r)``; the restart with the
    lowest within-cluster sum of squares wins, earliest first on ties.  Labels
    are numbered in order of first appearance.

    ``e`` is an :class:`Embedding` or an ``(n, d)`` array of points.
    """
    x = np.asarray(getattr(e, "coords", e), dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    n = x.shape[0]
    if not 1 <= k <= n:
        raise InvalidInputError(f"k must satisfy 1 <= k <= n (n={n}), got k={k}")
    best_labels, best_inertia = None, np.inf
    for r in range(n_restarts):
        labels, inertia = _lloyd(x, k, np.random.default_rng(seed + r))
        if inertia < best_inertia:
            best_labels, best_inertia = labels, inertia
    return ClusterAssignment(_first_seen_order(best_labels), k)


def spectral_cluster(a: AffinityMatrix, k: int, seed: int, spectrum: Spectrum | None = None) -> ClusterAssignment:
    return kmeans(spectral_embed(a, k, spectrum), k, seed)
