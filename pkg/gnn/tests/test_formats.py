import numpy as np
import pytest

from gnn_harness import LoadError
from gnn_harness.formats import (
    read_dictionary,
    read_edges,
    read_embeddings,
    read_labels,
    read_manifest,
    read_split,
)
from gnn_harness.graphdata import build_in_csr, load_snapshot, make_features
from taskgen import (
    write_dictionary,
    write_edges,
    write_embeddings,
    write_labels,
    write_manifest,
    write_split,
)


def test_edges_roundtrip(tmp_path):
    edges = np.array([[0, 1], [2, 3], [1, 0]], dtype=np.uint64)
    write_edges(tmp_path / "e.bin", edges)
    assert np.array_equal(read_edges(tmp_path / "e.bin"), edges)


def test_edges_bad_magic(tmp_path):
    (tmp_path / "bad.bin").write_bytes(b"NOTEDGES" + b"\0" * 8)
    with pytest.raises(LoadError):
        read_edges(tmp_path / "bad.bin")


def test_edges_truncated(tmp_path):
    write_edges(tmp_path / "e.bin", np.array([[0, 1]], dtype=np.uint64))
    data = (tmp_path / "e.bin").read_bytes()
    (tmp_path / "short.bin").write_bytes(data[:-8])
    with pytest.raises(LoadError):
        read_edges(tmp_path / "short.bin")


def test_dictionary(tmp_path):
    write_dictionary(tmp_path / "d.txt", ["com.a", "com.b"])
    assert read_dictionary(tmp_path / "d.txt") == ["com.a", "com.b"]


def test_embeddings_roundtrip(tmp_path):
    rows = {"com.a": np.arange(4, dtype=np.float32), "com.b": np.ones(4, dtype=np.float32)}
    write_embeddings(tmp_path / "emb.bin", 4, rows)
    dim, again = read_embeddings(tmp_path / "emb.bin")
    assert dim == 4
    assert set(again) == {"com.a", "com.b"}
    assert np.array_equal(again["com.a"], rows["com.a"])


def test_split_and_labels(tmp_path):
    write_split(tmp_path / "s.json", ["com.a"], ["com.b"], ["com.c"], seed=5)
    split = read_split(tmp_path / "s.json")
    assert split["seed"] == 5 and split["train"] == ["com.a"]
    write_labels(tmp_path / "l.json", {"com.a": 0.5})
    assert read_labels(tmp_path / "l.json")["com.a"]["pc1"] == 0.5


def test_manifest_missing_field(tmp_path):
    (tmp_path / "m.json").write_text('{"snapshot_id": "X"}')
    with pytest.raises(LoadError):
        read_manifest(tmp_path / "m.json")


def test_in_csr():
    edges = np.array([[0, 2], [1, 2], [2, 0]], dtype=np.uint64)
    indptr, indices = build_in_csr(edges, 3)
    assert list(indices[indptr[2]:indptr[3]]) == [0, 1]
    assert list(indices[indptr[0]:indptr[1]]) == [2]
    assert indptr[1] == indptr[2]  # node 1 has no in-edges


def test_in_csr_symmetrize():
    edges = np.array([[0, 1]], dtype=np.uint64)
    indptr, indices = build_in_csr(edges, 2, symmetrize=True)
    assert list(indices[indptr[0]:indptr[1]]) == [1]
    assert list(indices[indptr[1]:indptr[2]]) == [0]


def test_in_csr_out_of_range():
    with pytest.raises(LoadError):
        build_in_csr(np.array([[0, 5]], dtype=np.uint64), 3)


def test_load_snapshot_masks(degree_snapshot):
    graph = load_snapshot(
        degree_snapshot["manifest"], degree_snapshot["split"],
        degree_snapshot["labels"], feature_mode="zero", feature_dim=8,
    )
    assert graph.n == 2000
    assert len(graph.train_ids) == 1200
    assert len(graph.val_ids) == 400
    assert len(graph.test_ids) == 400
    assert not np.any(graph.features)
    assert np.allclose(
        graph.labels[graph.test_ids],
        degree_snapshot["label_array"][graph.test_ids],
        atol=1e-6,
    )


def test_load_snapshot_rni_seeded(degree_snapshot):
    a = load_snapshot(degree_snapshot["manifest"], degree_snapshot["split"],
                      degree_snapshot["labels"], feature_mode="rni",
                      feature_dim=16, seed=3)
    b = load_snapshot(degree_snapshot["manifest"], degree_snapshot["split"],
                      degree_snapshot["labels"], feature_mode="rni",
                      feature_dim=16, seed=3)
    assert np.array_equal(a.features, b.features)
    c = make_features("rni", 2000, 16, seed=4)
    assert not np.array_equal(a.features, c)


def test_load_snapshot_embedding_mode(degree_snapshot, tmp_path):
    keys = [f"com.site{i:05d}" for i in range(2000)]
    rows = {k: np.full(8, i % 5, dtype=np.float32) for i, k in enumerate(keys[:1500])}
    write_embeddings(tmp_path / "emb.bin", 8, rows)
    graph = load_snapshot(
        degree_snapshot["manifest"], degree_snapshot["split"],
        degree_snapshot["labels"], feature_mode="embedding",
        embeddings_path=tmp_path / "emb.bin",
    )
    assert graph.feature_dim == 8
    assert not np.any(graph.features[1500:])  # missing rows zero-filled
    assert np.array_equal(graph.features[1], rows[keys[1]])


def test_load_snapshot_split_key_missing(degree_snapshot, tmp_path):
    write_split(tmp_path / "bad.json", ["com.absent"], ["com.site00001"], ["com.site00002"])
    with pytest.raises(LoadError):
        load_snapshot(degree_snapshot["manifest"], tmp_path / "bad.json",
                      degree_snapshot["labels"], feature_mode="zero", feature_dim=4)
