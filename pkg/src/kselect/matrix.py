"""Affinity and distance matrices, the symmetric eigensolver, Laplacians and fusion."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import InvalidInputError, NumericalError

SYMMETRY_TOL = 1e-9
DIAGONAL_TOL = 1e-6
RANGE_TOL = 1e-12

JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100


def _frozen(values: np.ndarray) -> np.ndarray:
    out = np.array(values, dtype=float, copy=True)
    out.setflags(write=False)
    return out


def _check_square(values, name: str) -> np.ndarray:
    m = np.asarray(values, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidInputError(f"{name} must be square, got shape {m.shape}")
    if m.shape[0] < 2:
        raise InvalidInputError(f"{name} needs n >= 2, got n={m.shape[0]}")
    if not np.all(np.isfinite(m)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    return m


def _symmetrized(m: np.ndarray, name: str) -> np.ndarray:
    asym = np.max(np.abs(m - m.T))
    if asym > SYMMETRY_TOL:
        i, j = np.unravel_index(np.argmax(np.abs(m - m.T)), m.shape)
        raise InvalidInputError(
            f"{name} is not symmetric: |m[{i}][{j}] - m[{j}][{i}]| = {asym:.3g} > {SYMMETRY_TOL:g}"
        )
    if asym > 0:
        m = 0.5 * (m + m.T)
    return m


def _clipped_unit(m: np.ndarray, name: str) -> np.ndarray:
    lo, hi = m.min(), m.max()
    if lo < -RANGE_TOL or hi > 1 + RANGE_TOL:
        raise InvalidInputError(f"{name} entries must lie in [0, 1], found range [{lo:.6g}, {hi:.6g}]")
    return np.clip(m, 0.0, 1.0)


@dataclass(frozen=True, eq=False)
class AffinityMatrix:
    """Symmetric pairwise similarities in [0, 1] with a unit diagonal.

    Inputs asymmetric by at most 1e-9 are averaged with their transpose and
    diagonal entries within 1e-6 of 1 are pinned to 1; anything worse is
    rejected with :class:`InvalidInputError`.
    """

    values: np.ndarray

    def __post_init__(self):
        m = _check_square(self.values, "affinity matrix")
        m = _clipped_unit(_symmetrized(m, "affinity matrix"), "affinity matrix")
        diag = np.diag(m)
        bad = np.flatnonzero(np.abs(diag - 1.0) > DIAGONAL_TOL)
        if bad.size:
            i = bad[0]
            raise InvalidInputError(f"affinity matrix diagonal must be 1, found m[{i}][{i}] = {diag[i]!r}")
        m = m.copy()
        np.fill_diagonal(m, 1.0)
        object.__setattr__(self, "values", _frozen(m))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def permuted(self, perm) -> "AffinityMatrix":
        perm = np.asarray(perm)
        return AffinityMatrix(self.values[np.ix_(perm, perm)])

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)

    def __eq__(self, other):
        if not isinstance(other, AffinityMatrix):
            return NotImplemented
        return np.array_equal(self.values, other.values)


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    """Symmetric pairwise distances in [0, 1] with a zero diagonal."""

    values: np.ndarray

    def __post_init__(self):
        m = _check_square(self.values, "distance matrix")
        m = _clipped_unit(_symmetrized(m, "distance matrix"), "distance matrix")
        if np.max(np.abs(np.diag(m))) > DIAGONAL_TOL:
            raise InvalidInputError("distance matrix diagonal must be 0")
        m = m.copy()
        np.fill_diagonal(m, 0.0)
        object.__setattr__(self, "values", _frozen(m))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)


@dataclass(frozen=True)
class Spectrum:
    """Ascending eigenvalues; ``eigenvectors[:, j]`` pairs with ``eigenvalues[j]``."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def gaps(self) -> np.ndarray:
        """``gaps[i - 1]`` is the gap after the i-th smallest eigenvalue."""
        return np.diff(self.eigenvalues)


def to_distance(a: AffinityMatrix) -> DistanceMatrix:
    return DistanceMatrix(1.0 - a.values)


def to_affinity(d: DistanceMatrix) -> AffinityMatrix:
    """Inverse of :func:`to_distance`."""
    return AffinityMatrix(1.0 - d.values)


def laplacian(a: AffinityMatrix) -> np.ndarray:
    """Symmetric normalized Laplacian ``I - D^-1/2 A D^-1/2``."""
    w = a.values
    d_inv_sqrt = 1.0 / np.sqrt(w.sum(axis=1))
    lap = np.eye(a.n) - w * np.outer(d_inv_sqrt, d_inv_sqrt)
    return 0.5 * (lap + lap.T)


@lru_cache(maxsize=64)
def _round_robin(n: int) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    # Circle-method tournament: each round is a set of disjoint (p, q) pairs and
    # every pair p < q occurs exactly once per sweep. Odd n gets a bye slot.
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        ps, qs = [], []
        for i in range(m // 2):
            p, q = players[i], players[m - 1 - i]
            if p < n and q < n:
                ps.append(min(p, q))
                qs.append(max(p, q))
        rounds.append((np.array(ps), np.array(qs)))
        players = [players[0], players[-1]] + players[1:-1]
    return tuple(rounds)


def _off_norm(m: np.ndarray) -> float:
    off = m.copy()
    np.fill_diagonal(off, 0.0)
    return float(np.linalg.norm(off))


def sym_eigensolve(m, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS) -> Spectrum:
    """Eigendecomposition of a dense symmetric matrix by cyclic Jacobi rotations.

    Pairs are visited in round-robin order so that each round applies a set of
    disjoint plane rotations at once; one sweep covers every off-diagonal pair.
    Iteration stops when the off-diagonal Frobenius norm drops below
    ``tol * ||m||_F``.  Each eigenvector is signed so that its largest-magnitude
    entry is positive.

    Raises
    ------
    NumericalError
        If ``max_sweeps`` sweeps do not reach the tolerance.
    """
    a = np.array(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidInputError(f"eigensolver needs a square matrix, got shape {a.shape}")
    n = a.shape[0]
    if n == 0:
        raise InvalidInputError("eigensolver needs a nonempty matrix")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError("eigensolver input contains non-finite entries")
    scale = np.linalg.norm(a)
    if np.max(np.abs(a - a.T), initial=0.0) > 1e-12 * max(scale, 1.0):
        raise InvalidInputError("eigensolver input is not symmetric")
    a = 0.5 * (a + a.T)
    v = np.eye(n)

    target = tol * scale
    sweeps = 0
    while _off_norm(a) > target:
        if sweeps == max_sweeps:
            raise NumericalError(f"Jacobi eigensolver did not converge in {max_sweeps} sweeps for a {n}x{n} matrix")
        for p, q in _round_robin(n):
            apq = a[p, q]
            active = np.abs(apq) > 1e-18 * (np.abs(a[p, p]) + np.abs(a[q, q]))
            if not np.any(active):
                continue
            theta = np.where(active, a[q, q] - a[p, p], 0.0) / np.where(active, 2.0 * apq, 1.0)
            big = np.abs(theta) > 1e150
            root = np.sqrt(np.where(big, 1.0, theta * theta + 1.0))
            t = np.where(big, 0.5 / np.where(big, theta, 1.0), np.sign(theta + (theta == 0)) / (np.abs(theta) + root))
            t = np.where(active, t, 0.0)
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c

            rp, rq = a[p].copy(), a[q].copy()
            a[p] = c[:, None] * rp - s[:, None] * rq
            a[q] = s[:, None] * rp + c[:, None] * rq
            cp, cq = a[:, p].copy(), a[:, q].copy()
            a[:, p] = cp * c - cq * s
            a[:, q] = cp * s + cq * c
            a[p, q] = 0.0
            a[q, p] = 0.0

            vp, vq = v[:, p].copy(), v[:, q].copy()
            v[:, p] = vp * c - vq * s
            v[:, q] = vp * s + vq * c
        sweeps += 1

    eigenvalues = np.diag(a).copy()
    order = np.argsort(eigenvalues, kind="stable")
    eigenvalues = eigenvalues[order]
    v = v[:, order]
    v /= np.linalg.norm(v, axis=0)
    lead = v[np.argmax(np.abs(v), axis=0), np.arange(n)]
    v *= np.where(lead < 0, -1.0, 1.0)
    return Spectrum(_frozen(eigenvalues), _frozen(v))


def fuse(matrices: Sequence[AffinityMatrix], normalization: str = "none") -> AffinityMatrix:
    """Element-wise mean of several views, optionally degree-normalized.

    With ``normalization="degree"`` the mean is mapped through
    ``D^-1/2 A D^-1/2``, divided by its largest entry, and the diagonal is
    reset to 1 so the result is again a valid affinity matrix.
    """
    if normalization not in ("none", "degree"):
        raise InvalidInputError(f"unknown normalization {normalization!r}; expected 'none' or 'degree'")
    matrices = list(matrices)
    if not matrices:
        raise InvalidInputError("fuse needs at least one matrix")
    n = matrices[0].n
    for i, m in enumerate(matrices):
        if m.n != n:
            raise InvalidInputError(f"matrix {i} has n={m.n}, expected n={n} (matching matrix 0)")
    if len(matrices) == 1:
        mean = matrices[0].values
    else:
        mean = np.mean([m.values for m in matrices], axis=0)
    if normalization == "none":
        return AffinityMatrix(mean)

    d_inv_sqrt = 1.0 / np.sqrt(mean.sum(axis=1))
    normed = mean * np.outer(d_inv_sqrt, d_inv_sqrt)
    normed = 0.5 * (normed + normed.T)
    normed = normed / normed.max()
    np.fill_diagonal(normed, 1.0)
    return AffinityMatrix(normed)
