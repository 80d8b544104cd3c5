"""Confidence normalization over a candidate range and the k-selection strategies."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import InvalidInputError, NumericalError
from .matrix import AffinityMatrix, fuse, laplacian, sym_eigensolve, to_distance
from .spectral import kmeans, spectral_embed
from .validity import calinski_harabasz, davies_bouldin, silhouette

CRITERIA = ("silhouette", "eigengap", "db", "ch")
STRATEGIES = ("average", "voting", "random") + CRITERIA
CONSTANT_TOL = 1e-12


@dataclass(frozen=True)
class KRange:
    k_min: int = 2
    k_max: int = 5

    def __post_init__(self):
        if self.k_min < 2:
            raise InvalidInputError(f"k_min must be >= 2, got {self.k_min}")
        if self.k_max < self.k_min:
            raise InvalidInputError(f"k_max ({self.k_max}) must be >= k_min ({self.k_min})")

    @property
    def values(self) -> np.ndarray:
        return np.arange(self.k_min, self.k_max + 1)

    def __len__(self):
        return self.k_max - self.k_min + 1

    def check(self, n: int) -> None:
        if self.k_max >= n:
            raise InvalidInputError(f"k_max must be < n: got k_max={self.k_max} with n={n}")


def normalize_scores(raw, higher_is_better: bool = True) -> np.ndarray:
    """Min-max map raw scores to [0, 1], best score -> 1.

    A single candidate gets 1; constant scores get 0.5 everywhere.
    """
    x = np.asarray(raw, dtype=float)
    if not higher_is_better:
        x = -x
    if x.size == 1:
        return np.ones(1)
    lo, hi = x.min(), x.max()
    if hi - lo <= CONSTANT_TOL * max(np.max(np.abs(x)), np.finfo(float).tiny):
        return np.full(x.size, 0.5)
    return (x - lo) / (hi - lo)


def eigengap_confidence(k_values, best_k: int) -> np.ndarray:
    """``1 - |k - best_k| / (k_max - k_min)``; all ones for a single candidate."""
    k = np.asarray(k_values)
    width = k.max() - k.min()
    if width == 0:
        return np.ones(k.size)
    return 1.0 - np.abs(k - best_k) / width


def _argmax_smallest(values, k_values) -> int:
    # np.argmax returns the first maximum, i.e. the smallest k on ties
    return int(np.asarray(k_values)[int(np.argmax(values))])


@dataclass(frozen=True)
class ConfidenceTable:
    """Raw criterion scores and their normalized confidences over a k range.

    ``raw["eigengap"]`` holds the Laplacian gap after the k-th eigenvalue for
    each candidate k.
    """

    range: KRange
    raw: Mapping[str, np.ndarray]
    confidence: Mapping[str, np.ndarray]
    average: np.ndarray

    @classmethod
    def from_raw(cls, k_range: KRange, raw: Mapping[str, Sequence[float]]) -> "ConfidenceTable":
        missing = set(CRITERIA) - set(raw)
        if missing:
            raise InvalidInputError(f"missing raw scores for {sorted(missing)}")
        raw = {c: np.asarray(raw[c], dtype=float) for c in CRITERIA}
        for c, v in raw.items():
            if v.shape != (len(k_range),):
                raise InvalidInputError(f"{c}: expected {len(k_range)} scores, got shape {v.shape}")
        ks = k_range.values
        conf = {
            "silhouette": normalize_scores(raw["silhouette"]),
            "eigengap": eigengap_confidence(ks, _argmax_smallest(raw["eigengap"], ks)),
            "db": normalize_scores(raw["db"], higher_is_better=False),
            "ch": normalize_scores(raw["ch"]),
        }
        average = np.mean([conf[c] for c in CRITERIA], axis=0)
        return cls(k_range, raw, conf, average)

    @property
    def k_values(self) -> np.ndarray:
        return self.range.values

    @property
    def eigengap_k(self) -> int:
        return _argmax_smallest(self.raw["eigengap"], self.k_values)

    def best_k(self, criterion: str) -> int:
        return _argmax_smallest(self.confidence[criterion], self.k_values)

    def votes(self) -> list[int]:
        return [self.best_k(c) for c in CRITERIA]


def confidence_table(a: AffinityMatrix, k_range: KRange, seed: int) -> ConfidenceTable:
    """Score every candidate k with the four criteria.

    The Laplacian is decomposed once; for each k the samples are clustered in
    the k-dimensional spectral embedding with seed ``seed + k``.  Silhouette
    uses the ``1 - affinity`` distances, Davies-Bouldin and Calinski-Harabasz
    the embedding coordinates.
    """
    k_range.check(a.n)
    spectrum = sym_eigensolve(laplacian(a))
    dist = to_distance(a)
    gaps = np.diff(spectrum.eigenvalues)
    raw = {c: [] for c in CRITERIA}
    for k in k_range.values:
        k = int(k)
        try:
            emb = spectral_embed(a, k, spectrum)
            labels = kmeans(emb, k, seed + k)
            raw["silhouette"].append(silhouette(dist, labels))
            raw["db"].append(davies_bouldin(emb, labels))
            raw["ch"].append(calinski_harabasz(emb, labels))
        except (InvalidInputError, NumericalError) as exc:
            raise type(exc)(f"k={k}: {exc}") from exc
        raw["eigengap"].append(gaps[k - 1])
    return ConfidenceTable.from_raw(k_range, raw)


def check_strategy(strategy: str) -> str:
    s = strategy.lower()
    if s not in STRATEGIES:
        raise InvalidInputError(f"unknown strategy {strategy!r}; expected one of {', '.join(STRATEGIES)}")
    return s


def random_k(k_range: KRange, seed: int) -> int:
    return int(np.random.default_rng(seed).integers(k_range.k_min, k_range.k_max + 1))


def vote(votes: Sequence[int]) -> int:
    """Most frequent vote; without a unique mode, the lower middle vote."""
    values, counts = np.unique(np.asarray(votes), return_counts=True)
    top = np.flatnonzero(counts == counts.max())
    if top.size == 1:
        return int(values[top[0]])
    ordered = np.sort(votes)
    return int(ordered[(len(ordered) - 1) // 2])


def select_k(table: ConfidenceTable, strategy: str = "average", seed: int = 0) -> int:
    """Pick a cluster count from ``table``.

    ``strategy`` is ``"average"``, ``"voting"``, ``"random"`` or one of the
    criterion names for single-criterion selection.  Argmax ties go to the
    smaller k.  ``seed`` only matters for ``"random"``.
    """
    s = check_strategy(strategy)
    if s == "average":
        return _argmax_smallest(table.average, table.k_values)
    if s == "voting":
        return vote(table.votes())
    if s == "random":
        return random_k(table.range, seed)
    return table.best_k(s)


def select_for_views(
    views: Sequence[AffinityMatrix],
    k_range: KRange,
    strategy: str = "average",
    seed: int = 0,
    normalization: str | None = None,
) -> int:
    """Fuse one or more affinity views and select k on the result.

    ``normalization`` defaults to ``"degree"`` for several views and
    ``"none"`` for a single one.
    """
    views = list(views)
    if normalization is None:
        normalization = "degree" if len(views) > 1 else "none"
    fused = fuse(views, normalization)
    s = check_strategy(strategy)
    k_range.check(fused.n)
    if s == "random":
        return random_k(k_range, seed)
    return select_k(confidence_table(fused, k_range, seed), s, seed)


def format_confidence_table(table: ConfidenceTable) -> str:
    """CSV rendering: one row per k with raw scores, confidences and their mean."""
    header = ["k"] + [f"raw_{c}" for c in CRITERIA] + [f"conf_{c}" for c in CRITERIA] + ["average"]
    lines = [",".join(header)]
    for i, k in enumerate(table.k_values):
        cells = [str(int(k))]
        cells += [f"{table.raw[c][i]:.17g}" for c in CRITERIA]
        cells += [f"{table.confidence[c][i]:.17g}" for c in CRITERIA]
        cells.append(f"{table.average[i]:.17g}")
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"
