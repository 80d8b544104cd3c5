import numpy as np
import pytest

from kselect import (
    ClusterAssignment,
    InvalidInputError,
    SynthSpec,
    error_rate,
    generate_block_affinity,
    kmeans,
    spectral_cluster,
    spectral_embed,
)
from kselect.evalbench import confusion_matrix


def test_cluster_assignment_validation():
    c = ClusterAssignment([0, 1, 1, 2])
    assert c.K == 3 and c.n == 4
    with pytest.raises(InvalidInputError):
        ClusterAssignment([0, 2, 2])
    with pytest.raises(InvalidInputError):
        ClusterAssignment([0, -1])
    assert ClusterAssignment.from_labels([7, 3, 7]) == ClusterAssignment([1, 0, 1])


def test_embedding_of_exact_blocks(blocks):
    a, truth = blocks([4, 5, 6])
    e = spectral_embed(a, 3)
    coords = e.coords
    for c in range(3):
        rows = coords[truth.labels == c]
        np.testing.assert_allclose(rows, np.broadcast_to(rows[0], rows.shape), atol=1e-8)
    reps = np.array([coords[truth.labels == c][0] for c in range(3)])
    np.testing.assert_allclose(reps @ reps.T, np.eye(3), atol=1e-8)


def test_embedding_k_bounds(blocks):
    a, _ = blocks([1, 1])
    with pytest.raises(InvalidInputError):
        spectral_embed(a, 2)
    a, _ = blocks([3, 3])
    with pytest.raises(InvalidInputError):
        spectral_embed(a, 1)


def test_embedding_rows_unit_norm(random_affinity):
    e = spectral_embed(random_affinity(20), 3)
    assert e.coords.shape == (20, 3)
    np.testing.assert_allclose(np.linalg.norm(e.coords, axis=1), 1.0, atol=1e-9)
    assert not e.zero_rows.any()


@pytest.mark.parametrize("seed", range(5))
def test_kmeans_two_groups_1d(seed):
    x = np.array([0.0, 0.1, 0.2, 5.0, 5.1, 5.3])
    c = kmeans(x, 2, seed)
    assert error_rate(c, [0, 0, 0, 1, 1, 1]) == 0


def test_kmeans_k_equals_n(rng):
    x = rng.normal(size=(7, 2))
    c = kmeans(x, 7, 3)
    assert sorted(c.labels.tolist()) == list(range(7))


def test_kmeans_three_blobs_match_planted(rng):
    centers = np.array([[0, 0], [6, 0], [0, 6]])
    truth = np.repeat(np.arange(3), 10)
    x = centers[truth] + rng.normal(scale=0.5, size=(30, 2))
    c = kmeans(x, 3, 11)
    conf = confusion_matrix(c, truth)
    # every predicted cluster is pure and the map to blobs is a bijection
    assert np.count_nonzero(conf) == 3
    assert sorted(conf.max(axis=0).tolist()) == [10, 10, 10]


def test_kmeans_deterministic_and_no_empty(rng):
    x = np.vstack([np.zeros((5, 2)), np.ones((5, 2))])
    first = kmeans(x, 4, 0)
    assert first.K == 4 and np.bincount(first.labels).min() >= 1
    assert kmeans(x, 4, 0) == first
    with pytest.raises(InvalidInputError):
        kmeans(x, 11, 0)


def test_spectral_cluster_exact_blocks(blocks):
    a, truth = blocks([6, 6])
    assert error_rate(spectral_cluster(a, 2, 0), truth) == 0
    a, truth = blocks([5, 3, 7, 4])
    for seed in range(10):
        assert error_rate(spectral_cluster(a, 4, seed), truth) == 0


def test_spectral_cluster_noisy_blocks():
    a, truth = generate_block_affinity(SynthSpec(3, 20, 0.8, 1.0, 0.0, 0.2, seed=5))
    assert error_rate(spectral_cluster(a, 3, 42), truth) <= 5.0


def test_spectral_cluster_permutation_equivariant(rng):
    a, truth = generate_block_affinity(SynthSpec(3, 8, 0.5, 1.0, 0.0, 0.4, seed=9))
    perm = rng.permutation(a.n)
    base = spectral_cluster(a, 3, 1)
    moved = spectral_cluster(a.permuted(perm), 3, 1)
    assert error_rate(moved, base.labels[perm]) == 0


def test_spectral_cluster_repeatable(random_affinity):
    a = random_affinity(25)
    assert spectral_cluster(a, 4, 8) == spectral_cluster(a, 4, 8)
