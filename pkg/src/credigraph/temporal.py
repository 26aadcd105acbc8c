"""Snapshot manifests, timestamps, and cross-snapshot evolution stats.

Each crawl month is an independent snapshot whose timestamp is the
Monday of the ISO week in which the crawl began.  Snapshots join across
months by node key, never by id: id assignment is per-snapshot and the
diff statistics must not depend on it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import date, timedelta
from pathlib import Path

import numpy as np

from . import InputError
from .degrees import DegreeTable
from .graphbuild import NodeDictionary


def assign_timestamp(crawl_id: str, crawl_start: date | str) -> date:
    """Monday of the ISO week containing the crawl start."""
    if isinstance(crawl_start, str):
        try:
            crawl_start = date.fromisoformat(crawl_start)
        except ValueError as exc:
            raise InputError(f"bad crawl start date for {crawl_id!r}: {exc}") from exc
    return crawl_start - timedelta(days=crawl_start.isoweekday() - 1)


@dataclass
class SnapshotManifest:
    snapshot_id: str
    timestamp: str                       # ISO date, Monday of the crawl week
    files: dict[str, str] = field(default_factory=dict)
    counts: dict[str, int] = field(default_factory=dict)
    format_versions: dict[str, str] = field(default_factory=dict)

    def save(self, path: str | Path) -> None:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(json.dumps({
            "snapshot_id": self.snapshot_id,
            "timestamp": self.timestamp,
            "files": self.files,
            "counts": self.counts,
            "format_versions": self.format_versions,
        }, indent=1))

    @classmethod
    def load(cls, path: str | Path) -> "SnapshotManifest":
        data = json.loads(Path(path).read_text())
        return cls(
            snapshot_id=data["snapshot_id"],
            timestamp=data["timestamp"],
            files=data.get("files", {}),
            counts=data.get("counts", {}),
            format_versions=data.get("format_versions", {}),
        )


@dataclass
class SnapshotView:
    """The node keys and out-degrees a diff needs, id-assignment free."""

    keys: list[str]
    out_degrees: np.ndarray

    @classmethod
    def from_manifest(cls, path: str | Path) -> "SnapshotView":
        manifest = SnapshotManifest.load(path)
        base = Path(path).parent
        dictionary = NodeDictionary.load(base / manifest.files["dictionary"])
        table = DegreeTable(base / manifest.files["degrees"])
        return cls(keys=dictionary.id_to_key, out_degrees=np.asarray(table.deg_out))


@dataclass
class SnapshotDiff:
    overlap_nodes: int
    new_nodes: int
    vanished_nodes: int
    out_degree_increased_fraction: float | None


def snapshot_diff(prev: SnapshotView, nxt: SnapshotView) -> SnapshotDiff:
    """Join two snapshots by node key and compare out-degrees.

    The increased fraction is computed over overlapping nodes only; an
    empty overlap reports ``None`` rather than zero.
    """
    prev_index = {key: i for i, key in enumerate(prev.keys)}
    overlap = increased = 0
    for j, key in enumerate(nxt.keys):
        i = prev_index.get(key)
        if i is None:
            continue
        overlap += 1
        if int(nxt.out_degrees[j]) > int(prev.out_degrees[i]):
            increased += 1
    return SnapshotDiff(
        overlap_nodes=overlap,
        new_nodes=len(nxt.keys) - overlap,
        vanished_nodes=len(prev.keys) - overlap,
        out_degree_increased_fraction=(increased / overlap) if overlap else None,
    )


def build_temporal_graph(
    manifest_paths: list[str | Path], out_path: str | Path | None = None
) -> list[SnapshotManifest]:
    """Order snapshot manifests into a temporal-graph manifest.

    Sorts by timestamp and rejects duplicate snapshot ids or coinciding
    timestamps.  When ``out_path`` is given, writes the ordered
    manifest-of-manifests as JSON.
    """
    manifests = [SnapshotManifest.load(p) for p in manifest_paths]
    manifests.sort(key=lambda m: m.timestamp)
    ids = [m.snapshot_id for m in manifests]
    if len(set(ids)) != len(ids):
        raise InputError(f"duplicate snapshot ids: {ids}")
    stamps = [m.timestamp for m in manifests]
    for a, b in zip(stamps, stamps[1:]):
        if a >= b:
            raise InputError(f"snapshot timestamps not strictly increasing: {a} !< {b}")
    if out_path is not None:
        Path(out_path).write_text(json.dumps([
            {
                "snapshot_id": m.snapshot_id,
                "timestamp": m.timestamp,
                "files": m.files,
                "counts": m.counts,
                "format_versions": m.format_versions,
            }
            for m in manifests
        ], indent=1))
    return manifests
