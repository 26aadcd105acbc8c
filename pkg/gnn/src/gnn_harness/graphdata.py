"""Snapshot loading: adjacency, node features, labels, split masks."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import LoadError
from .formats import read_dictionary, read_edges, read_embeddings, read_labels, read_manifest, read_split

FEATURE_MODES = ("rni", "zero", "embedding")


@dataclass
class GraphData:
    n: int
    indptr: np.ndarray        # CSR over incoming edges
    indices: np.ndarray       # concatenated in-neighbor ids (message sources)
    features: np.ndarray      # float32 (n, d)
    labels: np.ndarray        # float32 (n,), NaN where unlabeled
    train_ids: np.ndarray
    val_ids: np.ndarray
    test_ids: np.ndarray
    target: str
    feature_mode: str

    @property
    def feature_dim(self) -> int:
        return self.features.shape[1]

    @property
    def gcn_norm(self) -> np.ndarray:
        """Per-node 1/sqrt(in_degree + 1); full-graph degrees so sampled
        and full forward passes normalize identically."""
        deg = np.diff(self.indptr).astype(np.float32)
        return 1.0 / np.sqrt(deg + 1.0)

    def in_neighbors(self, node: int) -> np.ndarray:
        return self.indices[self.indptr[node]:self.indptr[node + 1]]


def build_in_csr(edges: np.ndarray, n: int, symmetrize: bool = False):
    """CSR keyed by destination: row v holds the sources pointing at v."""
    if len(edges) and int(edges.max()) >= n:
        raise LoadError(f"edge id {int(edges.max())} out of range for n={n}")
    src = edges[:, 0].astype(np.int64)
    dst = edges[:, 1].astype(np.int64)
    if symmetrize:
        src, dst = np.concatenate([src, dst]), np.concatenate([dst, src])
    order = np.argsort(dst, kind="stable")
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, dst + 1, 1)
    np.cumsum(indptr, out=indptr)
    return indptr, src[order]


def make_features(
    mode: str, n: int, dim: int, seed: int = 0,
    keys: list[str] | None = None,
    embeddings: dict[str, np.ndarray] | None = None,
) -> np.ndarray:
    """Node features per mode: standard-normal RNI, zeros, or embedding rows
    (missing rows zero-filled)."""
    if mode == "rni":
        rng = np.random.Generator(np.random.PCG64(seed))
        return rng.standard_normal((n, dim)).astype(np.float32)
    if mode == "zero":
        return np.zeros((n, dim), dtype=np.float32)
    if mode == "embedding":
        if keys is None or embeddings is None:
            raise LoadError("embedding feature mode needs keys and an embedding matrix")
        out = np.zeros((n, dim), dtype=np.float32)
        for i, key in enumerate(keys):
            row = embeddings.get(key)
            if row is not None:
                out[i] = row
        return out
    raise LoadError(f"unknown feature mode {mode!r}; expected one of {FEATURE_MODES}")


def load_snapshot(
    manifest_path: str | Path,
    split_path: str | Path,
    labels_path: str | Path,
    feature_mode: str = "rni",
    feature_dim: int = 64,
    embeddings_path: str | Path | None = None,
    seed: int = 0,
    symmetrize: bool = False,
) -> GraphData:
    """Assemble a training-ready graph from exported snapshot artifacts."""
    manifest_path = Path(manifest_path)
    manifest = read_manifest(manifest_path)
    base = manifest_path.parent
    keys = read_dictionary(base / manifest["files"]["dictionary"])
    n = len(keys)
    key_to_id = {key: i for i, key in enumerate(keys)}

    edges = read_edges(base / manifest["files"]["edges"])
    indptr, indices = build_in_csr(edges, n, symmetrize=symmetrize)

    if feature_mode == "embedding":
        if embeddings_path is None:
            raise LoadError("feature_mode 'embedding' requires an embeddings file")
        dim, rows = read_embeddings(embeddings_path)
        features = make_features("embedding", n, dim, keys=keys, embeddings=rows)
    else:
        features = make_features(feature_mode, n, feature_dim, seed=seed)

    split = read_split(split_path)
    target = split["target"]
    labels_raw = read_labels(labels_path)
    labels = np.full(n, np.nan, dtype=np.float32)
    for key, scores in labels_raw.items():
        node = key_to_id.get(key)
        score = scores.get(target)
        if node is not None and score is not None:
            labels[node] = score

    def ids_of(part: str) -> np.ndarray:
        out = []
        for key in split[part]:
            node = key_to_id.get(key)
            if node is None:
                raise LoadError(f"split node {key!r} is not in the snapshot dictionary")
            if np.isnan(labels[node]):
                raise LoadError(f"split node {key!r} has no {target} label")
            out.append(node)
        return np.asarray(out, dtype=np.int64)

    return GraphData(
        n=n, indptr=indptr, indices=indices, features=features, labels=labels,
        train_ids=ids_of("train"), val_ids=ids_of("val"), test_ids=ids_of("test"),
        target=target, feature_mode=feature_mode,
    )
