"""Degree computation and single-pass degree filtering.

Degree counters live in a disk-backed file of u32 arrays accessed
through memory maps, so a billion-node table never has to be resident.
Filtering uses raw-graph degrees in one pass: survivors are nodes whose
total degree exceeds the threshold, and an edge survives iff both of
its endpoints do.  Survivors can end up isolated or as leaves in the
filtered graph; no second pass is applied.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import FormatError, InputError
from .graphbuild import EdgeWriter, edge_count, iter_edge_chunks

DEGREE_MAGIC = b"CGDEG1\0\0"
_DEG_HEADER = struct.Struct("<8sQ")
_U32_MAX = np.uint64(0xFFFFFFFF)


class DegreeTable:
    """Lazily-mapped per-node in/out degree counters."""

    def __init__(self, path: str | Path, mode: str = "r"):
        self.path = Path(path)
        with self.path.open("rb") as fp:
            magic, n = _DEG_HEADER.unpack(fp.read(_DEG_HEADER.size))
        if magic != DEGREE_MAGIC:
            raise FormatError(f"{path}: not a {DEGREE_MAGIC!r} degree file")
        self.n = n
        self.deg_in = np.memmap(self.path, dtype="<u4", mode=mode,
                                offset=_DEG_HEADER.size, shape=(n,))
        self.deg_out = np.memmap(self.path, dtype="<u4", mode=mode,
                                 offset=_DEG_HEADER.size + 4 * n, shape=(n,))

    @classmethod
    def create(cls, path: str | Path, n: int) -> "DegreeTable":
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        size = _DEG_HEADER.size + 8 * n
        with path.open("wb") as fp:
            fp.write(_DEG_HEADER.pack(DEGREE_MAGIC, n))
            fp.truncate(size)
        return cls(path, mode="r+")

    def total(self, ids: np.ndarray | slice) -> np.ndarray:
        """Total degree (in + out) as u64 for the given ids or slice."""
        return self.deg_in[ids].astype(np.uint64) + self.deg_out[ids].astype(np.uint64)

    def sums(self) -> tuple[int, int]:
        return int(self.deg_in.sum(dtype=np.uint64)), int(self.deg_out.sum(dtype=np.uint64))

    def flush(self) -> None:
        self.deg_in.flush()
        self.deg_out.flush()


def _saturating_add(array: np.memmap, ids: np.ndarray) -> None:
    uniq, counts = np.unique(ids, return_counts=True)
    new = array[uniq].astype(np.uint64) + counts.astype(np.uint64)
    array[uniq] = np.minimum(new, _U32_MAX).astype("<u4")


def compute_degrees(
    edges_path: str | Path,
    n: int,
    out_path: str | Path,
    chunk_edges: int = 1 << 20,
) -> DegreeTable:
    """One sequential pass over the edge list into a degree file."""
    table = DegreeTable.create(out_path, n)
    seen = 0
    for chunk in iter_edge_chunks(edges_path, chunk_edges):
        if len(chunk) and int(chunk.max()) >= n:
            bad = int(np.argmax(chunk.ravel() >= n))
            raise InputError(
                f"{edges_path}: node id {int(chunk.ravel()[bad])} >= n={n} "
                f"at edge offset {seen + bad // 2}"
            )
        _saturating_add(table.deg_out, chunk[:, 0])
        _saturating_add(table.deg_in, chunk[:, 1])
        seen += len(chunk)
    table.flush()
    return table


# ----------------------------------------------------------- survivor bitset

def _member(bits: np.ndarray, ids: np.ndarray) -> np.ndarray:
    return (bits[ids >> 3] >> (ids & 7).astype(np.uint8)) & 1


@dataclass
class FilteredGraph:
    edges_path: str
    compact_map_path: str
    survivor_count: int
    edge_count: int
    threshold: int
    raw_node_count: int
    raw_edge_count: int
    provenance: str | None = None


def filter_by_degree(
    edges_path: str | Path,
    degrees: DegreeTable,
    out_dir: str | Path,
    threshold: int = 3,
    chunk_edges: int = 1 << 20,
    provenance: str | None = None,
) -> FilteredGraph:
    """Single-pass degree filter over raw-graph degrees.

    Keeps edge (u, v) iff both endpoints have raw total degree strictly
    greater than ``threshold``.  Compact ids are assigned to survivors
    in ascending raw-id order.  Resident state is the survivor bitset
    (n/8 bytes) plus one chunk; the compact map is a disk-backed scratch
    array.
    """
    if threshold < 0:
        raise InputError(f"threshold must be >= 0, got {threshold}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    n = degrees.n

    bits = np.zeros((n + 7) // 8, dtype=np.uint8)
    compact = np.lib.format.open_memmap(
        out_dir / "compact_map.npy", mode="w+", dtype=np.int64, shape=(max(n, 1),)
    )
    survivors = 0
    step = max(chunk_edges, 1)
    for start in range(0, n, step):
        stop = min(start + step, n)
        alive = degrees.total(slice(start, stop)) > np.uint64(threshold)
        ranks = np.cumsum(alive)
        block = np.full(stop - start, -1, dtype=np.int64)
        block[alive] = survivors + ranks[alive] - 1
        compact[start:stop] = block
        survivors += int(ranks[-1]) if len(ranks) else 0
        idx = np.nonzero(alive)[0] + start
        np.bitwise_or.at(bits, idx >> 3, np.left_shift(1, (idx & 7)).astype(np.uint8))
    compact.flush()

    edges_out = out_dir / "edges.bin"
    with EdgeWriter(edges_out) as writer:
        for chunk in iter_edge_chunks(edges_path, chunk_edges):
            keep = (_member(bits, chunk[:, 0]) & _member(bits, chunk[:, 1])).astype(bool)
            kept = chunk[keep]
            if len(kept):
                remapped = np.column_stack(
                    (compact[kept[:, 0]], compact[kept[:, 1]])
                ).astype("<u8")
                writer.write_pairs(remapped)
        kept_edges = writer.count

    map_path = out_dir / "compact_map.tsv"
    with map_path.open("w", newline="\n") as out:
        for start in range(0, n, step):
            stop = min(start + step, n)
            block = compact[start:stop]
            for off in np.nonzero(block >= 0)[0]:
                out.write(f"{start + int(off)}\t{int(block[off])}\n")

    return FilteredGraph(
        edges_path=str(edges_out),
        compact_map_path=str(map_path),
        survivor_count=survivors,
        edge_count=kept_edges,
        threshold=threshold,
        raw_node_count=n,
        raw_edge_count=edge_count(edges_path),
        provenance=provenance,
    )


def load_compact_map(path: str | Path) -> dict[int, int]:
    mapping: dict[int, int] = {}
    with Path(path).open() as fp:
        for line in fp:
            raw, _, comp = line.rstrip("\n").partition("\t")
            mapping[int(raw)] = int(comp)
    return mapping


@dataclass
class RetentionReport:
    node_retention_pct: float
    edge_retention_pct: float


def filter_report(
    raw_nodes: int, raw_edges: int, filtered_nodes: int, filtered_edges: int
) -> RetentionReport:
    """Percent of nodes/edges the filter kept, to two decimals."""
    if raw_nodes == 0 or raw_edges == 0:
        raise InputError("retention is undefined for an empty raw graph")
    return RetentionReport(
        node_retention_pct=round(100.0 * filtered_nodes / raw_nodes, 2),
        edge_retention_pct=round(100.0 * filtered_edges / raw_edges, 2),
    )
