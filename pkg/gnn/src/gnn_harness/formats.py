"""Readers for the pipeline's published artifact formats.

These parse the on-disk interfaces directly (no import of the pipeline
package): binary edge lists (``CGEDGE1``), node dictionaries (one key
per line, line number = id), embedding matrices (``CGEMB1``), split
JSON, joined-label JSON, and snapshot manifests.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from . import LoadError

EDGE_MAGIC = b"CGEDGE1\0"
EMBEDDING_MAGIC = b"CGEMB1\0\0"


def read_edges(path: str | Path) -> np.ndarray:
    """Edge list as an (m, 2) uint64 array of (src, dst) ids."""
    with Path(path).open("rb") as fp:
        header = fp.read(16)
        if len(header) < 16 or header[:8] != EDGE_MAGIC:
            raise LoadError(f"{path}: not a {EDGE_MAGIC!r} edge file")
        (count,) = struct.unpack("<Q", header[8:])
        data = np.fromfile(fp, dtype="<u8", count=count * 2)
    if len(data) != count * 2:
        raise LoadError(f"{path}: edge list shorter than its header count")
    return data.reshape(-1, 2)


def read_dictionary(path: str | Path) -> list[str]:
    with Path(path).open("r", encoding="utf-8") as fp:
        return [line.rstrip("\n") for line in fp if line != "\n"]


def read_embeddings(path: str | Path) -> tuple[int, dict[str, np.ndarray]]:
    with Path(path).open("rb") as fp:
        if fp.read(8) != EMBEDDING_MAGIC:
            raise LoadError(f"{path}: not a {EMBEDDING_MAGIC!r} embedding file")
        dim, count = struct.unpack("<IQ", fp.read(12))
        rows: dict[str, np.ndarray] = {}
        for _ in range(count):
            raw = fp.read(2)
            if len(raw) < 2:
                raise LoadError(f"{path}: truncated embedding file")
            (klen,) = struct.unpack("<H", raw)
            key = fp.read(klen).decode("utf-8")
            vector = np.frombuffer(fp.read(4 * dim), dtype="<f4")
            if len(vector) != dim:
                raise LoadError(f"{path}: truncated embedding row for {key}")
            rows[key] = vector.copy()
    return dim, rows


def read_split(path: str | Path) -> dict:
    data = json.loads(Path(path).read_text())
    for field in ("target", "seed", "train", "val", "test"):
        if field not in data:
            raise LoadError(f"{path}: split file missing {field!r}")
    return data


def read_labels(path: str | Path) -> dict[str, dict]:
    """Joined-label artifact: node key -> {pc1, mbfc}."""
    data = json.loads(Path(path).read_text())
    if "labels" not in data:
        raise LoadError(f"{path}: not a joined-labels file (no 'labels' key)")
    return data["labels"]


def read_manifest(path: str | Path) -> dict:
    data = json.loads(Path(path).read_text())
    for field in ("snapshot_id", "timestamp", "files"):
        if field not in data:
            raise LoadError(f"{path}: snapshot manifest missing {field!r}")
    return data
