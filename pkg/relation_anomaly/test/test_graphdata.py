"""Dataset ingestion, preprocessing, splitting, subgroups, synonyms and the synthetic generator."""

from __future__ import annotations

import collections
import json

import numpy as np
import pytest
from scipy import stats

from relation_anomaly.errors import ConfigError, ContractError, ValidationError
from relation_anomaly.graphdata import (
    SynonymMap,
    SyntheticConfig,
    apply_synonyms,
    build_subgroups,
    count_mapped_occurrences,
    dataset_from_dict,
    dataset_to_dict,
    filter_minor_objects,
    gen_synthetic,
    inject_ground_truth,
    load_dataset,
    load_stoplist,
    load_synonyms,
    normal_vocabulary,
    preprocess_dataset,
    preprocess_graph,
    save_dataset,
    select_top_k,
    split_dataset,
    synonym_variants,
    zipf_weights,
)
from relation_anomaly.graphdata.models import Descriptor, SceneGraph, Triplet

from .fixtures import STOPLIST, SYNONYMS, anomalous_graph, normal_graph, tiny_dataset, triplet


def _record(image_id, label="normal", triplets=None, ground_truth=None):
    return {
        "id": image_id,
        "label": label,
        "triplets": triplets
        if triplets is not None
        else [{"subject": "cup", "predicate": "on", "object": "table", "confidence": 0.9}],
        "ground_truth": ground_truth or [],
    }


# loading


def test_empty_image_list_gives_empty_dataset():
    dataset = dataset_from_dict({"scene": "dining", "images": []})
    assert dataset.graphs == ()
    assert dataset.scene == "dining"


def test_one_normal_one_anomalous_image():
    doc = {
        "scene": "dining",
        "images": [
            _record("n0"),
            _record("a0", "anomalous", ground_truth=[{"subject": "shoe", "predicate": "on", "object": "table"}]),
        ],
    }
    dataset = dataset_from_dict(doc)
    assert len(dataset.graphs) == 2
    assert sum(len(g.ground_truth) for g in dataset.graphs) == 1
    assert dataset.anomalous_graphs[0].image_id == "a0"


def test_confidence_out_of_range_names_image_and_field():
    bad = [{"subject": "cup", "predicate": "on", "object": "table", "confidence": 1.2}]
    with pytest.raises(ValidationError) as info:
        dataset_from_dict({"scene": "dining", "images": [_record("img7", triplets=bad)]})
    assert "img7" in str(info.value)
    assert "confidence" in str(info.value)


def test_anomalous_image_without_ground_truth_is_rejected():
    with pytest.raises(ValidationError, match="a0"):
        dataset_from_dict({"scene": "dining", "images": [_record("a0", "anomalous")]})


def test_duplicate_image_ids_are_rejected():
    with pytest.raises(ValidationError, match="duplicate"):
        dataset_from_dict({"scene": "dining", "images": [_record("x"), _record("x")]})


def test_invalid_json_reports_line(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{\n  "scene": "dining",\n  "images": [,]\n}\n')
    with pytest.raises(ValidationError, match="line 3"):
        load_dataset(str(path))


def test_save_and_load_preserve_records(tmp_path):
    dataset = tiny_dataset(3, 1)
    path = save_dataset(str(tmp_path / "tiny.json"), dataset)
    restored = load_dataset(path)
    assert dataset_to_dict(restored) == dataset_to_dict(dataset)
    assert json.loads((tmp_path / "tiny.json").read_text())["scene"] == "dining"


def test_bundled_stoplist_and_synonyms():
    assert "handle" in load_stoplist(STOPLIST)
    synonyms = load_synonyms(SYNONYMS)
    assert synonyms["table"] == "surface"
    replacements = set(synonyms.mapping.values())
    assert len(replacements) == len(synonyms)
    assert not replacements & set(synonyms.mapping)


def test_bundled_synonyms_cover_synthetic_objects(dining_spec):
    synonyms = load_synonyms(SYNONYMS)
    keys = normal_vocabulary(dining_spec) + [tuple(t) for t in dining_spec.anomalous_triplets]
    nouns = {word for s, _, o in keys for word in (s, o)} - load_stoplist(STOPLIST)
    assert {word for word in nouns if word not in synonyms} <= {"fork"}


def test_conflicting_synonym_lines(tmp_path):
    path = tmp_path / "syn.tsv"
    path.write_text("table\tsurface\ntable\tdesk\n")
    with pytest.raises(ValidationError, match=":2:"):
        load_synonyms(str(path))


def test_identity_synonym_rejected(tmp_path):
    path = tmp_path / "syn.tsv"
    path.write_text("table\ttable\n")
    with pytest.raises(ValidationError):
        load_synonyms(str(path))


# top-k and filtering


def test_top_k_keeps_most_confident():
    rng = np.random.default_rng(0)
    conf = rng.uniform(0, 1, size=40)
    graph = SceneGraph(
        image_id="g",
        image_label="normal",
        triplets=tuple(Triplet(subject=f"s{i}", predicate="on", object="o", confidence=float(c)) for i, c in enumerate(conf)),
    )
    kept = select_top_k(graph, 30)
    assert len(kept) == 30
    assert sorted(t.confidence for t in kept) == sorted(conf)[10:]
    assert [t.confidence for t in kept] == sorted((t.confidence for t in kept), reverse=True)


def test_top_k_with_fewer_triplets_keeps_all():
    graph = normal_graph("g", ["cup on table"] * 10)
    assert len(select_top_k(graph, 30)) == 10


def test_top_k_tie_prefers_earlier_position():
    graph = SceneGraph(
        image_id="g",
        image_label="normal",
        triplets=(
            triplet("a on b", 0.9),
            triplet("c on d", 0.5),
            triplet("e on f", 0.5),
        ),
    )
    kept = select_top_k(graph, 2)
    assert [t.subject for t in kept] == ["a", "c"]
    with pytest.raises(ValidationError):
        select_top_k(graph, 0)


def test_filter_minor_objects():
    triplets = [triplet("door has handle"), triplet("cup on table"), triplet("handle on door")]
    assert filter_minor_objects(triplets, []) == triplets
    kept = filter_minor_objects(triplets, {"handle"})
    assert kept == [t for t in triplets if "handle" not in (t.subject, t.object)]
    assert [str(t) for t in kept] == ["cup-on-table"]


# ground truth


def test_ground_truth_present_only_sets_labels():
    graph = anomalous_graph("a", ["cup on table", "shoe on table"], ["shoe on table"])
    out = inject_ground_truth(graph)
    assert len(out.triplets) == 2
    assert [t.anomaly_label for t in out.triplets] == [False, True]
    assert not any(t.injected for t in out.triplets)


def test_ground_truth_absent_is_appended_once():
    graph = anomalous_graph("a", ["cup on table"], ["shoe on table", "table under shoe"])
    out = inject_ground_truth(graph)
    assert len(out.triplets) == 2
    added = out.triplets[-1]
    assert added.key == ("shoe", "on", "table")
    assert added.injected and added.anomaly_label
    assert added.confidence == 0.0


def test_one_of_two_phrasings_present():
    graph = anomalous_graph("a", ["cup on table", "table under shoe"], ["shoe on table", "table under shoe"])
    out = inject_ground_truth(graph)
    assert len(out.triplets) == 2
    assert out.triplets[1].anomaly_label


def test_inject_on_normal_graph_is_a_contract_error():
    with pytest.raises(ContractError):
        inject_ground_truth(normal_graph("n", ["cup on table"]))


def test_uncorrected_protocol_never_injects():
    graph = anomalous_graph("a", ["cup on table", "door has handle", "shoe on table"], ["shoe on table"])
    # top-2 drops the anomaly; the stoplist then drops the handle triplet
    out = preprocess_graph(graph, top_k=2, stoplist={"handle"}, corrected=False)
    assert [t.key for t in out.triplets] == [("cup", "on", "table")]
    assert out.triplets[0].anomaly_label is False

    corrected = preprocess_graph(graph, top_k=2, stoplist={"handle"}, corrected=True)
    assert corrected.triplets[-1].injected


def test_preprocess_dataset_labels_every_triplet():
    prepared = preprocess_dataset(tiny_dataset(4, 2), top_k=30, stoplist=())
    labels = [t.anomaly_label for g in prepared.graphs for t in g.triplets]
    assert None not in labels
    assert sum(labels) == 2


# split and subgroups


def test_split_sixty_normals():
    dataset = tiny_dataset(60, 5)
    split = split_dataset(dataset, 0.8, seed=0)
    assert len(split.train_graphs) == 48
    assert len(split.test_normal_graphs) == 12
    assert all(not g.is_anomalous for g in split.train_graphs)
    assert len(split.test_graphs) == 12 + 5


def test_split_keeps_a_test_image():
    split = split_dataset(tiny_dataset(10, 0), 0.999, seed=0)
    assert len(split.train_graphs) == 9


def test_split_is_deterministic_and_validated():
    dataset = tiny_dataset(20, 1)
    assert split_dataset(dataset, 0.8, 3).split == split_dataset(dataset, 0.8, 3).split
    with pytest.raises(ValidationError):
        split_dataset(tiny_dataset(0, 1), 0.8, 0)
    with pytest.raises(ValidationError):
        split_dataset(dataset, 1.0, 0)


def test_subgroups_of_eleven():
    split = split_dataset(tiny_dataset(60, 5), 0.8, seed=0)
    subgroups = build_subgroups(split, 11, seed=0)
    test_normals = {g.image_id for g in split.test_normal_graphs}
    assert len(subgroups) == 5
    for sg in subgroups:
        assert sg.size == 11
        assert len(set(sg.normal_ids)) == 10
        assert set(sg.normal_ids) <= test_normals


def test_subgroup_size_two_and_seed_change():
    split = split_dataset(tiny_dataset(60, 5), 0.8, seed=0)
    pairs = build_subgroups(split, 2, seed=0)
    assert all(sg.size == 2 for sg in pairs)
    a = build_subgroups(split, 11, seed=1)
    b = build_subgroups(split, 11, seed=2)
    assert len(a) == len(b)
    assert [sg.normal_ids for sg in a] != [sg.normal_ids for sg in b]


def test_subgroups_need_enough_test_normals():
    split = split_dataset(tiny_dataset(10, 2), 0.8, seed=0)
    with pytest.raises(ValidationError, match="only 2"):
        build_subgroups(split, 11, seed=0)


# synonyms


def test_rate_zero_returns_dataset_unchanged(small_synthetic):
    synonyms = load_synonyms(SYNONYMS)
    assert apply_synonyms(small_synthetic, synonyms, 0.0, seed=0) is small_synthetic


def test_rate_one_replaces_every_mapped_word(small_synthetic):
    synonyms = load_synonyms(SYNONYMS)
    out = apply_synonyms(small_synthetic, synonyms, 1.0, seed=0)
    all_triplets = [t for g in out.graphs for t in g.triplets]
    assert count_mapped_occurrences(all_triplets, synonyms) == 0
    before = [t for g in small_synthetic.graphs for t in g.triplets]
    assert sum(t.subject == "surface" or t.object == "surface" for t in all_triplets) == sum(
        t.subject == "table" or t.object == "table" for t in before
    )


def test_rate_half_within_binomial_interval(dining_spec):
    synonyms = load_synonyms(SYNONYMS)
    dataset = gen_synthetic(dining_spec, seed=1)
    before = count_mapped_occurrences([t for g in dataset.graphs for t in g.triplets], synonyms)
    out = apply_synonyms(dataset, synonyms, 0.5, seed=4)
    remaining = count_mapped_occurrences([t for g in out.graphs for t in g.triplets], synonyms)
    low, high = stats.binom.interval(0.99, before, 0.5)
    assert low <= before - remaining <= high


def test_ground_truth_gains_substituted_phrasings():
    synonyms = SynonymMap(mapping={"table": "surface", "chair": "stool"})
    graph = anomalous_graph("a", ["cup on chair"], ["cup on chair", "chair under cup"])
    dataset = tiny_dataset(2, 0).with_graphs([graph])
    out = apply_synonyms(dataset, synonyms, 0.5, seed=0)
    keys = {d.key for d in out.graphs[0].ground_truth}
    assert {("cup", "on", "stool"), ("stool", "under", "cup"), ("cup", "on", "chair")} <= keys


def test_synonym_variants_cover_every_subset():
    synonyms = SynonymMap(mapping={"table": "surface", "plate": "dish"})
    variants = synonym_variants(Descriptor(subject="plate", predicate="on", object="table"), synonyms)
    assert len(variants) == 4
    assert len({v.key for v in variants}) == 4


# synthetic generator


def test_synthetic_counts_and_ground_truth(dining_spec):
    spec = dining_spec.model_copy(update={"n_normal": 20, "n_anomalous": 10})
    dataset = gen_synthetic(spec, seed=0)
    assert len(dataset.normal_graphs) == 20
    assert len(dataset.anomalous_graphs) == 10
    assert all(len(g.triplets) == 30 for g in dataset.graphs)
    anomalous_keys = {tuple(t) for t in spec.anomalous_triplets}
    hits = sum(t.key in anomalous_keys for g in dataset.anomalous_graphs for t in g.triplets)
    assert hits == 10


def test_synthetic_without_anomalies(dining_spec):
    dataset = gen_synthetic(dining_spec.model_copy(update={"n_anomalous": 0}), seed=0)
    assert dataset.anomalous_graphs == []


def test_synthetic_is_deterministic(dining_spec):
    assert dataset_to_dict(gen_synthetic(dining_spec, 5)) == dataset_to_dict(gen_synthetic(dining_spec, 5))


def test_anomalous_pairings_never_appear_in_normal_images(dining_spec):
    dataset = gen_synthetic(dining_spec, seed=0)
    forbidden = {(s, o) for s, _, o in dining_spec.anomalous_triplets}
    for graph in dataset.normal_graphs:
        assert not any((t.subject, t.object) in forbidden for t in graph.triplets)
    assert len(normal_vocabulary(dining_spec)) == dining_spec.n_normal_types


def test_overlapping_pairings_are_a_config_error():
    spec = SyntheticConfig(
        normal_triplets=[("cup", "on", "table")],
        anomalous_triplets=[("cup", "under", "table")],
        n_normal=2,
        n_anomalous=1,
    )
    with pytest.raises(ConfigError, match="cup/table"):
        gen_synthetic(spec, seed=0)


def test_frequencies_follow_zipf_weights():
    spec = SyntheticConfig(
        normal_triplets=[("a", "on", "b"), ("c", "on", "d"), ("e", "on", "f"), ("g", "on", "h"), ("i", "on", "j")],
        zipf_exponent=1.0,
        n_normal=400,
        n_anomalous=0,
        triplets_per_image=30,
    )
    dataset = gen_synthetic(spec, seed=0)
    counts = collections.Counter(t.subject for g in dataset.graphs for t in g.triplets)
    observed = np.array([counts[s] for s in "acegi"], dtype=float)
    expected = zipf_weights(5, 1.0) * observed.sum()
    assert stats.chisquare(observed, expected).pvalue > 1e-3
