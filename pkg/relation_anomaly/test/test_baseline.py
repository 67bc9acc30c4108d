"""Counting baselines and their strategy wrapper."""

from __future__ import annotations

from collections import defaultdict

import numpy as np
import pytest

from relation_anomaly.analyze.seeds import stage_rng
from relation_anomaly.baseline import build_count_table, count_scores, soft_count_scores
from relation_anomaly.errors import ValidationError
from relation_anomaly.graphdata import Subgroup, SynonymMap, apply_synonyms, preprocess_dataset
from relation_anomaly.strategies import CountingStrategy, SeedContext

from .fixtures import tiny_dataset, triplet


def _ctx(seed=0):
    return SeedContext(seed=seed, rng=lambda stage: stage_rng(seed, stage))


def test_hard_count_oracle():
    pool = [triplet("cup on table")] * 3 + [triplet("shoe on table")]
    scores = count_scores(pool)
    assert scores.tolist() == pytest.approx([1 / 3, 1 / 3, 1 / 3, 1.0])


def test_rare_key_scores_highest():
    pool = [triplet("cup on table")] * 10 + [triplet("shoe on table")]
    scores = count_scores(pool)
    assert int(np.argmax(scores)) == 10
    assert scores[10] > scores[:10].max()


def test_distinct_keys_score_one():
    pool = [triplet("cup on table"), triplet("plate on table"), triplet("fork near plate")]
    assert count_scores(pool).tolist() == [1.0, 1.0, 1.0]


def test_empty_pool_rejected():
    with pytest.raises(ValidationError):
        count_scores([])
    with pytest.raises(ValidationError):
        soft_count_scores([])


def test_soft_counts_equal_hard_counts_at_full_confidence():
    pool = [triplet("cup on table", 1.0)] * 3 + [triplet("shoe on table", 1.0), triplet("plate on table", 1.0)] * 2
    assert soft_count_scores(pool).tolist() == count_scores(pool).tolist()


def test_soft_counts_equal_mass():
    pool = [triplet("cup on table", 0.5), triplet("cup on table", 0.5), triplet("shoe on table", 1.0)]
    scores = soft_count_scores(pool)
    assert scores[0] == scores[1] == scores[2] == 1.0


def test_soft_counts_match_weighted_oracle():
    rng = np.random.default_rng(0)
    texts = ["cup on table", "cup near table", "shoe on table", "plate on table", "cup on plate"]
    pool = [triplet(texts[rng.integers(len(texts))], float(rng.uniform(0.05, 1.0))) for _ in range(40)]
    mass = defaultdict(float)
    for t in pool:
        mass[t.key] += t.confidence
    expected = [1.0 / mass[t.key] for t in pool]
    assert soft_count_scores(pool).tolist() == pytest.approx(expected, rel=1e-12)


def test_soft_table_sums_confidence_per_key():
    table = build_count_table([triplet("cup on table", 0.4), triplet("cup near table", 0.3), triplet("cup on table", 0.2)], soft=True)
    assert table.weight(("cup", "on", "table")) == pytest.approx(0.6)
    assert table.weight(("cup", "near", "table")) == pytest.approx(0.3)
    assert table.weight(("shoe", "on", "table")) == 0.0


def test_injected_triplets_weigh_one():
    injected = triplet("shoe on table", 0.0).model_copy(update={"injected": True})
    assert soft_count_scores([injected, triplet("cup on table", 0.5)]).tolist() == [1.0, 2.0]


def test_duplicated_pool_keeps_ranking():
    pool = [triplet("cup on table")] * 4 + [triplet("plate on table")] * 2 + [triplet("shoe on table")]
    once = np.argsort(count_scores(pool), kind="stable")
    twice = np.argsort(count_scores(pool + pool)[: len(pool)], kind="stable")
    assert once.tolist() == twice.tolist()


def test_score_decreases_with_count():
    pool = [triplet("cup on table")] * 5 + [triplet("plate on table")] * 3 + [triplet("shoe on table")]
    scores = dict(zip((t.key for t in pool), count_scores(pool)))
    assert scores[("shoe", "on", "table")] > scores[("plate", "on", "table")] > scores[("cup", "on", "table")]


def test_full_renaming_preserves_counting_ranking():
    dataset = preprocess_dataset(tiny_dataset(n_normal=4, n_anomalous=2), top_k=30, stoplist=[])
    renamed = apply_synonyms(dataset, SynonymMap(mapping={"table": "surface", "chair": "stool"}), rate=1.0, seed=0)
    subgroups = [Subgroup(anomalous_id="a0", normal_ids=("n0", "n1", "n2"))]
    strategy = CountingStrategy()
    before = strategy.score_pools(dataset, subgroups, _ctx())["a0"]
    after = strategy.score_pools(renamed, subgroups, _ctx())["a0"]
    assert before == after


def test_counting_strategy_scores_within_each_pool():
    dataset = preprocess_dataset(tiny_dataset(n_normal=4, n_anomalous=2), top_k=30, stoplist=[])
    subgroups = [
        Subgroup(anomalous_id="a0", normal_ids=("n0",)),
        Subgroup(anomalous_id="a1", normal_ids=("n0", "n1", "n2")),
    ]
    pools = CountingStrategy().score_pools(dataset, subgroups, _ctx())
    assert set(pools) == {"a0", "a1"}
    # "fork near plate" appears once in the first pool and three times in the second
    assert pools["a0"]["n0#3"] == 1.0
    assert pools["a1"]["n0#3"] == pytest.approx(1 / 3)
    assert pools["a1"]["a1#3"] == 1.0


def test_strategy_names():
    assert CountingStrategy().name == "counting"
    assert CountingStrategy(soft=True).name == "soft_counting"
    assert not CountingStrategy().needs_training
