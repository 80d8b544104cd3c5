import numpy as np
import pytest
from scipy import stats

from kselect import (
    CRITERIA,
    ConfidenceTable,
    InvalidInputError,
    KRange,
    SynthSpec,
    confidence_table,
    generate_block_affinity,
    select_for_views,
    select_k,
)
from kselect.selection import format_confidence_table, normalize_scores, vote


def table_with(**overrides):
    raw = {"silhouette": [0.1, 0.2, 0.3, 0.4], "eigengap": [0.1, 0.2, 0.3, 0.4], "db": [1, 1, 1, 1], "ch": [1, 2, 3, 4]}
    raw.update(overrides)
    return ConfidenceTable.from_raw(KRange(2, 5), raw)


def test_krange():
    assert KRange().values.tolist() == [2, 3, 4, 5]
    with pytest.raises(InvalidInputError):
        KRange(1, 5)
    with pytest.raises(InvalidInputError):
        KRange(4, 3)
    with pytest.raises(InvalidInputError, match="k_max must be < n"):
        KRange(2, 5).check(5)


def test_min_max_normalization():
    np.testing.assert_allclose(normalize_scores([0.2, 0.8, 0.5, 0.4]), [0, 1, 0.5, 1 / 3], atol=1e-15)
    assert normalize_scores([0.4] * 4).tolist() == [0.5] * 4
    np.testing.assert_allclose(normalize_scores([3.0, 1.0, 2.0], higher_is_better=False), [0, 1, 0.5])
    assert normalize_scores([7.0]).tolist() == [1.0]


def test_eigengap_confidence_on_exact_blocks(blocks):
    a, _ = blocks([4, 4, 4])
    t = confidence_table(a, KRange(2, 5), 0)
    assert t.eigengap_k == 3
    np.testing.assert_allclose(t.confidence["eigengap"], [1 - 1 / 3, 1.0, 1 - 1 / 3, 1 - 2 / 3])


def test_table_invariants(random_affinity):
    t = confidence_table(random_affinity(15), KRange(2, 6), 3)
    for c in CRITERIA:
        conf = t.confidence[c]
        assert conf.min() >= 0 and conf.max() <= 1
        if np.ptp(t.raw[c]) > 0 and c != "eigengap":
            assert conf.max() == 1 and conf.min() == 0
    np.testing.assert_allclose(t.average, np.mean([t.confidence[c] for c in CRITERIA], axis=0), atol=1e-15)


def test_single_candidate_range(blocks):
    a, _ = blocks([3, 3, 3])
    t = confidence_table(a, KRange(3, 3), 0)
    for c in CRITERIA:
        assert t.confidence[c].tolist() == [1.0]
    assert select_k(t) == 3


def test_voting_rules():
    assert vote([2, 2, 4, 5]) == 2
    assert vote([2, 3, 4, 5]) == 3
    assert vote([2, 2, 5, 5]) == 2
    assert vote([5, 4, 4, 3]) == 4


def test_average_ties_go_to_smaller_k():
    base = table_with()
    t = ConfidenceTable(base.range, base.raw, base.confidence, np.array([0.9, 0.9, 0.3, 0.1]))
    assert select_k(t, "average") == 2


def test_single_strategies_and_votes():
    t = table_with(silhouette=[0.1, 0.9, 0.3, 0.2], eigengap=[0.1, 0.2, 0.9, 0.3], db=[0.1, 0.5, 0.6, 0.7], ch=[1, 2, 3, 9])
    assert [select_k(t, c) for c in CRITERIA] == [3, 4, 2, 5]
    assert select_k(t, "voting") == 3
    with pytest.raises(InvalidInputError):
        select_k(t, "median")


def test_random_strategy_deterministic_and_uniform():
    t = table_with()
    assert select_k(t, "random", 17) == select_k(t, "random", 17)
    draws = np.array([select_k(t, "random", s) for s in range(10_000)])
    counts = np.bincount(draws, minlength=6)[2:]
    assert stats.chisquare(counts).pvalue > 0.01


def test_affine_transform_keeps_average_choice(rng):
    for _ in range(10):
        raw = {c: rng.normal(size=4) for c in CRITERIA}
        t = ConfidenceTable.from_raw(KRange(2, 5), raw)
        c = CRITERIA[rng.integers(4)]
        moved = dict(raw, **{c: 3.7 * raw[c] - 12.0})
        t2 = ConfidenceTable.from_raw(KRange(2, 5), moved)
        np.testing.assert_allclose(t2.confidence[c], t.confidence[c], atol=1e-12)
        assert select_k(t2) == select_k(t)


def test_exact_blocks_select_planted_k(blocks):
    for k in (2, 3, 4, 5):
        a, _ = blocks([4] * k)
        t = confidence_table(a, KRange(2, 5), 42)
        assert [select_k(t, s) for s in ("average", "voting") + CRITERIA] == [k] * 6


def test_select_for_views(blocks):
    a, _ = blocks([5, 5])
    assert select_for_views([a], KRange(2, 5)) == 2
    b, _ = blocks([4, 4, 4])
    assert select_for_views([b, b], KRange(2, 5), normalization="none") == select_for_views([b], KRange(2, 5))
    with pytest.raises(InvalidInputError):
        select_for_views([a], KRange(2, 12))


def test_select_for_noisy_views():
    hits = 0
    for seed in range(20):
        views = [generate_block_affinity(SynthSpec(3, 10, 0.6, 1.0, 0.0, 0.4, seed=100 * seed + v))[0] for v in (1, 2)]
        hits += select_for_views(views, KRange(2, 5), "average", seed) == 3
    assert hits >= 18


def test_confidence_table_text_round_trip(random_affinity):
    t = confidence_table(random_affinity(12), KRange(2, 5), 0)
    lines = format_confidence_table(t).splitlines()
    header = lines[0].split(",")
    assert header[0] == "k" and len(lines) == 5
    for i, line in enumerate(lines[1:]):
        row = dict(zip(header, line.split(",")))
        assert int(row["k"]) == i + 2
        for c in CRITERIA:
            assert float(row[f"raw_{c}"]) == t.raw[c][i]
            assert float(row[f"conf_{c}"]) == t.confidence[c][i]
        assert float(row["average"]) == t.average[i]
