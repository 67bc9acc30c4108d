"""Word-vector loading and triplet aggregation modes."""

from __future__ import annotations

import logging

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relation_anomaly.embed import (
    EmbeddingTable,
    TripletVector,
    add_noise,
    add_noise_batch,
    embed_phrase,
    embed_triplet,
    embed_triplets,
    load_embeddings,
    vector_width,
)
from relation_anomaly.errors import ValidationError
from relation_anomaly.graphdata import load_synonyms

from .fixtures import SYNONYMS, triplet

TABLE = EmbeddingTable.from_dict(
    {
        "cup": [1.0, 0.0, 0.0],
        "on": [0.0, 1.0, 0.0],
        "table": [0.0, 0.0, 1.0],
        "sitting": [2.0, 2.0, 2.0],
        "in": [1.0, 1.0, 1.0],
        "a": [0.0, 0.0, 0.0],
        "dining": [3.0, 0.0, 0.0],
    }
)


def test_load_skips_header(tmp_path):
    path = tmp_path / "vec.txt"
    path.write_text("2 3\ncup 1 0 0\ntable 0 0 1\n")
    table = load_embeddings(str(path))
    assert table.dim == 3
    assert len(table) == 2
    assert table.lookup("cup").tolist() == [1.0, 0.0, 0.0]


def test_load_dimension_mismatch_reports_line(tmp_path):
    path = tmp_path / "vec.txt"
    path.write_text("cup 1 0 0\ntable 0 1\n")
    with pytest.raises(ValidationError, match=":2:"):
        load_embeddings(str(path))


def test_load_duplicate_keeps_last(tmp_path, caplog):
    path = tmp_path / "vec.txt"
    path.write_text("cup 1 0\ncup 2 0\n")
    with caplog.at_level(logging.WARNING):
        table = load_embeddings(str(path))
    assert table.lookup("cup").tolist() == [2.0, 0.0]
    assert "duplicate" in caplog.text


def test_bundled_toy_table(toy_table):
    assert toy_table.dim == 8
    # synonyms sit close to their originals
    for token, replacement in load_synonyms(SYNONYMS).mapping.items():
        assert token in toy_table and replacement in toy_table
        assert np.linalg.norm(toy_table.lookup(token) - toy_table.lookup(replacement)) < 0.1
    assert np.linalg.norm(toy_table.lookup("table") - toy_table.lookup("chair")) > 0.5


def test_bundled_toy_table_is_low_rank(toy_table):
    vectors = np.stack([toy_table.lookup(token) for token in toy_table])
    singular = np.linalg.svd(vectors - vectors.mean(axis=0), compute_uv=False)
    assert singular[4] < 0.05 * singular[3]


def test_vectors_are_read_only():
    with pytest.raises(ValueError):
        TABLE.lookup("cup")[0] = 5.0


def test_lookup_falls_back_to_lower_case():
    assert TABLE.lookup("Cup").tolist() == [1.0, 0.0, 0.0]
    assert TABLE.lookup("saucer") is None


def test_phrase_mean_counts_oov_as_zero():
    phrase = embed_phrase(TABLE, "sitting on")
    assert phrase.values.tolist() == [1.0, 1.5, 1.0]
    partial = embed_phrase(TABLE, "cup saucer")
    assert partial.values.tolist() == [0.5, 0.0, 0.0]
    assert partial.n_oov == 1 and not partial.all_oov


def test_all_oov_phrase_warns(caplog):
    with caplog.at_level(logging.WARNING):
        phrase = embed_phrase(TABLE, "saucer")
    assert phrase.all_oov
    assert not phrase.values.any()
    assert "out of vocabulary" in caplog.text


def test_empty_phrase_rejected():
    with pytest.raises(ValidationError):
        embed_phrase(TABLE, "   ")


def test_concat_order_is_predicate_subject_object():
    vec = embed_triplet(TABLE, triplet("cup on table"), "concat")
    assert vec.values.tolist() == [0, 1, 0, 1, 0, 0, 0, 0, 1]


def test_sum_mult_and_node_only():
    t = triplet("cup on table")
    assert embed_triplet(TABLE, t, "sum").values.tolist() == [1.0, 1.0, 1.0]
    assert embed_triplet(TABLE, t, "mult").values.tolist() == [0.0, 0.0, 0.0]
    assert embed_triplet(TABLE, t, "node_only").values.tolist() == [1, 0, 0, 0, 0, 1]


def test_template_mode_averages_sentence_words():
    vec = embed_triplet(TABLE, triplet("cup on table"), "template", scene="dining")
    # in + a + dining + cup + on + table over six words
    assert np.allclose(vec.values, np.array([5.0, 2.0, 2.0]) / 6)


def test_vector_widths():
    assert [vector_width(300, m) for m in ("concat", "sum", "mult", "node_only", "template")] == [900, 300, 300, 600, 300]
    with pytest.raises(ValidationError):
        vector_width(300, "average")


def test_embed_triplets_stacks_rows(toy_table):
    triplets = [triplet("cup on table"), triplet("plate on table"), triplet("cup on table")]
    batch = embed_triplets(toy_table, triplets, "concat")
    assert batch.shape == (3, 24)
    assert np.array_equal(batch[0], batch[2])
    assert embed_triplets(toy_table, [], "sum").shape == (0, 8)


def test_noise_sigma_zero_and_negative():
    vec = embed_triplet(TABLE, triplet("cup on table"), "sum")
    assert np.array_equal(add_noise(vec, 0.0, seed=0).values, vec.values)
    with pytest.raises(ValidationError):
        add_noise(vec, -0.1, seed=0)


def test_noise_is_seeded():
    batch = np.zeros((4, 3))
    assert np.array_equal(add_noise_batch(batch, 0.1, 3), add_noise_batch(batch, 0.1, 3))
    assert not np.array_equal(add_noise_batch(batch, 0.1, 3), add_noise_batch(batch, 0.1, 4))


def test_non_finite_triplet_vector_rejected():
    with pytest.raises(ValidationError):
        TripletVector(np.array([1.0, np.nan]), "sum")


@given(st.floats(min_value=1e-3, max_value=1.0))
@settings(max_examples=20, deadline=None)
def test_noise_sample_std_tracks_sigma(sigma):
    noisy = add_noise_batch(np.zeros((400, 25)), sigma, seed=0)
    assert abs(noisy.std() / sigma - 1.0) < 0.05
