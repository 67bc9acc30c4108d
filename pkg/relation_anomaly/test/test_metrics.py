"""Ranking metrics and subgroup evaluation."""

from __future__ import annotations

import statistics

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from relation_anomaly.errors import DimensionMismatchError, ValidationError
from relation_anomaly.graphdata import Dataset, Subgroup, preprocess_dataset
from relation_anomaly.metrics import (
    ScoredSet,
    SeedReport,
    aggregate,
    auc_recall_k,
    auroc,
    evaluate,
    evaluate_pools,
    recall_at_k,
)

from .fixtures import anomalous_graph, tiny_dataset

FOUR = ScoredSet.build([0.9, 0.8, 0.3, 0.1], [1, 0, 1, 0])


def _pairwise_auroc(scores, labels):
    pos = [s for s, y in zip(scores, labels) if y == 1]
    neg = [s for s, y in zip(scores, labels) if y == 0]
    credit = sum(1.0 if p > n else 0.5 if p == n else 0.0 for p in pos for n in neg)
    return credit / (len(pos) * len(neg))


labelled_sets = st.integers(min_value=2, max_value=200).flatmap(
    lambda n: st.tuples(
        st.lists(st.integers(min_value=0, max_value=20).map(float), min_size=n, max_size=n),
        st.lists(st.integers(min_value=0, max_value=1), min_size=n, max_size=n),
    )
)


# auroc


def test_auroc_examples():
    assert auroc(FOUR) == pytest.approx(0.75)
    assert auroc(ScoredSet.build([3, 2, 1, 0], [1, 1, 0, 0])) == 1.0
    assert auroc(ScoredSet.build([0.5] * 5, [1, 0, 1, 0, 0])) == 0.5


def test_auroc_needs_both_classes():
    with pytest.raises(ValidationError):
        auroc(ScoredSet.build([0.1, 0.2], [1, 1]))
    with pytest.raises(ValidationError):
        auroc(ScoredSet.build([0.1, 0.2], [0, 0]))


def test_scored_set_contract():
    with pytest.raises(DimensionMismatchError):
        ScoredSet.build([0.1, 0.2], [1])
    with pytest.raises(ValidationError):
        ScoredSet.build([0.1, 0.2], [1, 2])


@given(labelled_sets)
@settings(max_examples=60, deadline=None)
def test_auroc_matches_pairwise_oracle(data):
    scores, labels = data
    assume(0 < sum(labels) < len(labels))
    assert auroc(ScoredSet.build(scores, labels)) == pytest.approx(_pairwise_auroc(scores, labels), abs=1e-12)


def test_auroc_is_invariant_to_increasing_transforms():
    rng = np.random.default_rng(0)
    for _ in range(20):
        scores = rng.normal(size=50)
        labels = rng.integers(0, 2, size=50)
        labels[:2] = [0, 1]
        base = auroc(ScoredSet.build(scores, labels))
        assert auroc(ScoredSet.build(np.exp(scores), labels)) == pytest.approx(base, abs=1e-12)
        assert auroc(ScoredSet.build(3.0 * scores - 7.0, labels)) == pytest.approx(base, abs=1e-12)


def test_flipped_labels_complement_without_ties():
    rng = np.random.default_rng(1)
    scores = rng.permutation(40).astype(float)
    labels = rng.integers(0, 2, size=40)
    labels[:2] = [0, 1]
    assert auroc(ScoredSet.build(scores, 1 - labels)) == pytest.approx(1.0 - auroc(ScoredSet.build(scores, labels)))


# recall


def test_recall_examples():
    assert recall_at_k(FOUR, 1) == 0.5
    assert recall_at_k(FOUR, 3) == 1.0
    assert recall_at_k(FOUR, 50) == 1.0
    assert recall_at_k(ScoredSet.build([0.9, 0.1], [0, 1]), 1) == 0.0


def test_recall_ties_keep_input_order():
    tied = ScoredSet.build([0.5, 0.5, 0.5], [0, 1, 0])
    assert recall_at_k(tied, 1) == 0.0
    assert recall_at_k(tied, 2) == 1.0


def test_recall_errors():
    with pytest.raises(ValidationError):
        recall_at_k(FOUR, 0)
    with pytest.raises(ValidationError):
        recall_at_k(ScoredSet.build([0.2, 0.1], [0, 0]), 1)


def test_recall_is_monotone_and_saturates():
    rng = np.random.default_rng(2)
    scored = ScoredSet.build(rng.normal(size=30), (rng.random(30) < 0.3).astype(int) | np.eye(30, dtype=int)[0])
    recalls = [recall_at_k(scored, k) for k in range(1, 31)]
    assert all(a <= b for a, b in zip(recalls, recalls[1:]))
    assert recalls[-1] == 1.0


def test_auc_recall_examples():
    assert auc_recall_k(FOUR, 1, 3) == pytest.approx(2 / 3)
    assert auc_recall_k(ScoredSet.build(np.arange(10, 0, -1), [1] + [0] * 9), 1, 10) == 1.0
    for k in (1, 2, 3):
        assert auc_recall_k(FOUR, k, k) == recall_at_k(FOUR, k)
    with pytest.raises(ValidationError):
        auc_recall_k(FOUR, 5, 2)
    with pytest.raises(ValidationError):
        auc_recall_k(FOUR, 0, 2)


@pytest.mark.parametrize("rank", [1, 4, 10])
def test_auc_recall_single_anomaly_closed_form(rank):
    n = 10
    labels = [0] * n
    labels[rank - 1] = 1
    scored = ScoredSet.build(np.arange(n, 0, -1, dtype=float), labels)
    assert auc_recall_k(scored, 1, n) == pytest.approx((n - rank + 1) / n)


def test_auc_recall_saturates_past_pool_size():
    # anomaly at rank 2 of 4: recall 0 at k = 1, then 1 for k = 2..100
    scored = ScoredSet.build([0.9, 0.8, 0.3, 0.1], [0, 1, 0, 0])
    assert auc_recall_k(scored) == pytest.approx(99 / 100)


# subgroup evaluation


def _labelled_tiny():
    return preprocess_dataset(tiny_dataset(n_normal=4, n_anomalous=2), top_k=30, stoplist=[])


SUBGROUPS = [Subgroup(anomalous_id="a0", normal_ids=("n0", "n1")), Subgroup(anomalous_id="a1", normal_ids=("n1", "n2"))]


def _perfect_scores(dataset: Dataset) -> dict[str, float]:
    return {
        g.instance_id(i): 1.0 if t.anomaly_label else 0.0 for g in dataset.graphs for i, t in enumerate(g.triplets)
    }


def test_evaluate_perfect_scores():
    dataset = _labelled_tiny()
    report = evaluate(_perfect_scores(dataset), dataset, SUBGROUPS[:1], seed=3)
    assert (report.auroc, report.auc_recall_k) == (1.0, 1.0)
    assert report.seed == 3 and report.scene == "dining"
    assert report.per_subgroup == {"a0": 1.0}


def test_evaluate_deduplicates_shared_normals():
    dataset = _labelled_tiny()
    report = evaluate(_perfect_scores(dataset), dataset, SUBGROUPS)
    # a0, a1, n0, n1, n2 with four triplets each; n1 counted once
    assert report.n_instances == 20


def test_evaluate_unscored_triplet():
    dataset = _labelled_tiny()
    scores = _perfect_scores(dataset)
    del scores["n1#2"]
    with pytest.raises(ValidationError, match="n1#2"):
        evaluate(scores, dataset, SUBGROUPS)


def test_pool_dependent_scores_are_averaged_for_auroc():
    dataset = _labelled_tiny()
    base = _perfect_scores(dataset)
    pools = {sg.anomalous_id: {iid: base[iid] for iid in _pool_ids(dataset, sg)} for sg in SUBGROUPS}
    pools["a0"]["n1#0"] = 2.0
    pools["a1"]["n1#0"] = 0.0
    report = evaluate_pools(pools, dataset, SUBGROUPS)
    # n1#0 pools to 1.0 and ties both anomalies; the other 17 normals lose to them
    assert report.auroc == pytest.approx((17 + 0.5) * 2 / 36)
    assert report.per_subgroup["a0"] == pytest.approx(99 / 100)
    assert report.per_subgroup["a1"] == 1.0
    assert report.auc_recall_k == pytest.approx((0.99 + 1.0) / 2)


def _pool_ids(dataset, subgroup):
    return [iid for image_id in subgroup.member_ids for iid in dataset.graph(image_id).instance_ids()]


def test_subgroups_without_labelled_anomaly_are_skipped():
    raw = tiny_dataset(n_normal=3, n_anomalous=1)
    missing = anomalous_graph("a9", ["cup on table", "plate on table"], ["shoe on table"])
    dataset = preprocess_dataset(raw.with_graphs(list(raw.graphs) + [missing]), top_k=30, stoplist=[], corrected=False)
    subgroups = [Subgroup(anomalous_id="a0", normal_ids=("n0",)), Subgroup(anomalous_id="a9", normal_ids=("n1",))]
    report = evaluate(_perfect_scores(dataset), dataset, subgroups)
    assert report.skipped_subgroups == ["a9"]
    assert list(report.per_subgroup) == ["a0"]


def test_evaluate_needs_subgroups():
    dataset = _labelled_tiny()
    with pytest.raises(ValidationError):
        evaluate(_perfect_scores(dataset), dataset, [])


# aggregation


def _report(seed, auroc_value, recall_value, scene="dining"):
    return SeedReport(seed=seed, scene=scene, auroc=auroc_value, auc_recall_k=recall_value)


def test_aggregate_mean_and_sample_std():
    values = [0.8, 0.6, 0.75]
    agg = aggregate([_report(s, v, 1.0 - v) for s, v in zip((2, 0, 1), values)])
    assert agg.seeds == [0, 1, 2]
    assert agg.auroc_mean == pytest.approx(statistics.mean(values))
    assert agg.auroc_std == pytest.approx(statistics.stdev(values))
    assert agg.auc_recall_k_mean == pytest.approx(statistics.mean(1.0 - v for v in values))


def test_aggregate_identical_seeds_have_zero_std():
    agg = aggregate([_report(s, 0.9, 0.7) for s in range(10)])
    assert agg.auroc_std == 0.0 and agg.auc_recall_k_std == 0.0
    assert aggregate([_report(0, 0.9, 0.7)]).auroc_std == 0.0


def test_aggregate_errors():
    with pytest.raises(ValidationError):
        aggregate([])
    with pytest.raises(ValidationError):
        aggregate([_report(0, 0.9, 0.7), _report(1, 0.9, 0.7, scene="office")])


def test_report_serialisation():
    doc = aggregate([_report(0, 0.8, 0.6), _report(1, 0.6, 0.8)]).to_dict()
    assert doc["auroc"]["mean"] == pytest.approx(0.7)
    assert [r["seed"] for r in doc["per_seed"]] == [0, 1]
