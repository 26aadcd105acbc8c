"""Synthetic-degree snapshot written in the pipeline's file formats.

The graph is assortative by construction: node i's in-degree ramps with
i and its sources come from a nearby index window, so neighbor degrees
correlate with a node's own degree.  Labels are total degree normalized
to [0, 1]; the generator knows them exactly.
"""

import json
import struct
from pathlib import Path

import numpy as np

EDGE_MAGIC = b"CGEDGE1\0"
EMBEDDING_MAGIC = b"CGEMB1\0\0"


def write_edges(path, edges: np.ndarray) -> None:
    edges = np.ascontiguousarray(edges, dtype="<u8")
    with Path(path).open("wb") as out:
        out.write(struct.pack("<8sQ", EDGE_MAGIC, len(edges)))
        out.write(edges.tobytes())


def write_dictionary(path, keys: list[str]) -> None:
    Path(path).write_text("".join(k + "\n" for k in keys))


def write_embeddings(path, dim: int, rows: dict[str, np.ndarray]) -> None:
    with Path(path).open("wb") as out:
        out.write(EMBEDDING_MAGIC)
        out.write(struct.pack("<IQ", dim, len(rows)))
        for key, vector in rows.items():
            kb = key.encode("utf-8")
            out.write(struct.pack("<H", len(kb)))
            out.write(kb)
            out.write(np.ascontiguousarray(vector, dtype="<f4").tobytes())


def write_labels(path, scores: dict[str, float]) -> None:
    Path(path).write_text(json.dumps({
        "labels": {k: {"pc1": v, "mbfc": v} for k, v in scores.items()}
    }))


def write_split(path, train, val, test, target="pc1", seed=0) -> None:
    Path(path).write_text(json.dumps({
        "target": target, "seed": seed, "ratios": [0.6, 0.2, 0.2],
        "train": list(train), "val": list(val), "test": list(test),
    }))


def write_manifest(path, files: dict, counts: dict, snapshot_id="DEGTASK") -> None:
    Path(path).write_text(json.dumps({
        "snapshot_id": snapshot_id, "timestamp": "2024-12-02",
        "files": files, "counts": counts,
        "format_versions": {"edges": "CGEDGE1"},
    }))


def degree_task(out_dir, n=2000, dmax=300, window=150, seed=0):
    """Write a full snapshot whose labels are normalized total degree.

    Returns (manifest_path, split_path, labels_path, labels array).
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)

    pairs = set()
    for i in range(n):
        d = 1 + int(round((i / (n - 1)) * dmax))
        lo, hi = max(0, i - window), min(n, i + window)
        for src in rng.integers(lo, hi, size=d):
            if int(src) != i:
                pairs.add((int(src), i))
    edges = np.array(sorted(pairs), dtype=np.uint64)

    total = np.zeros(n, dtype=np.int64)
    np.add.at(total, edges[:, 0], 1)
    np.add.at(total, edges[:, 1], 1)
    labels = (total / total.max()).astype(np.float64)

    keys = [f"com.site{i:05d}" for i in range(n)]
    order = rng.permutation(n)
    n_train, n_val = int(0.6 * n), int(0.2 * n)
    train = [keys[i] for i in order[:n_train]]
    val = [keys[i] for i in order[n_train:n_train + n_val]]
    test = [keys[i] for i in order[n_train + n_val:]]

    write_dictionary(out_dir / "dictionary.txt", keys)
    write_edges(out_dir / "edges.bin", edges)
    write_labels(out_dir / "labels.json", {k: float(labels[i]) for i, k in enumerate(keys)})
    write_split(out_dir / "split.json", train, val, test, seed=seed)
    write_manifest(
        out_dir / "manifest.json",
        files={"dictionary": "dictionary.txt", "edges": "edges.bin"},
        counts={"nodes": n, "edges": len(edges)},
    )
    return (out_dir / "manifest.json", out_dir / "split.json",
            out_dir / "labels.json", labels)
