"""Domain-level graph construction via batched streaming aggregation.

Page links are aggregated per batch into sorted, deduplicated batch
files on disk; a single k-way merge then unifies any number of batches
into a node dictionary and a binary edge list without ever holding the
edge set in memory.  Batches may be built in parallel; the merge is a
single sequential pass.
"""

from __future__ import annotations

import heapq
import struct
from dataclasses import dataclass
from itertools import groupby
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from . import FormatError
from .hostnames import normalize_host
from .warc import PageLink

BATCH_MAGIC = "CGBATCH1"
EDGE_MAGIC = b"CGEDGE1\0"
_EDGE_HEADER = struct.Struct("<8sQ")


# ---------------------------------------------------------------- batch files

@dataclass
class BatchResult:
    path: str
    n_domains: int
    n_edges: int
    links_seen: int
    links_rejected: int
    self_loops_dropped: int


def build_batch_graph(links: Iterable[PageLink], path: str | Path) -> BatchResult:
    """Collapse one batch of page links to a sorted domain/edge batch file.

    Self-loops at domain level are dropped; links whose source or target
    host fails normalization are rejected and counted.
    """
    domains: set[str] = set()
    edges: set[tuple[str, str]] = set()
    seen = rejected = loops = 0
    for link in links:
        seen += 1
        src = normalize_host(link.source_url)
        dst = normalize_host(link.target_url)
        if src is None or dst is None:
            rejected += 1
            continue
        domains.add(src)
        domains.add(dst)
        if src == dst:
            loops += 1
            continue
        edges.add((src, dst))
    write_batch(path, domains, edges)
    return BatchResult(str(path), len(domains), len(edges), seen, rejected, loops)


def write_batch(path: str | Path, domains: set[str], edges: set[tuple[str, str]]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as out:
        out.write(f"{BATCH_MAGIC}\n")
        out.write(f"D {len(domains)}\n")
        for key in sorted(domains):
            out.write(key + "\n")
        out.write(f"E {len(edges)}\n")
        for src, dst in sorted(edges):
            out.write(f"{src}\t{dst}\n")


def _check_batch_header(fp, path) -> None:
    if fp.readline().rstrip("\n") != BATCH_MAGIC:
        raise FormatError(f"{path}: not a {BATCH_MAGIC} batch file")


def iter_batch_domains(path: str | Path) -> Iterator[str]:
    with Path(path).open("r", encoding="utf-8") as fp:
        _check_batch_header(fp, path)
        header = fp.readline().split()
        if len(header) != 2 or header[0] != "D":
            raise FormatError(f"{path}: missing domain section")
        for _ in range(int(header[1])):
            yield fp.readline().rstrip("\n")


def iter_batch_edges(path: str | Path) -> Iterator[tuple[str, str]]:
    with Path(path).open("r", encoding="utf-8") as fp:
        _check_batch_header(fp, path)
        header = fp.readline().split()
        if len(header) != 2 or header[0] != "D":
            raise FormatError(f"{path}: missing domain section")
        for _ in range(int(header[1])):
            fp.readline()
        header = fp.readline().split()
        if len(header) != 2 or header[0] != "E":
            raise FormatError(f"{path}: missing edge section")
        for _ in range(int(header[1])):
            src, _, dst = fp.readline().rstrip("\n").partition("\t")
            yield src, dst


# ------------------------------------------------------------ node dictionary

class NodeDictionary:
    """Bijection between node keys and dense ids.

    Ids are assigned in lexicographic key order, so rebuilding from the
    same key set is deterministic.
    """

    def __init__(self, keys: list[str]):
        self.id_to_key = keys
        self.key_to_id = {key: i for i, key in enumerate(keys)}

    def __len__(self) -> int:
        return len(self.id_to_key)

    def __contains__(self, key: str) -> bool:
        return key in self.key_to_id

    def id_of(self, key: str) -> int:
        return self.key_to_id[key]

    def key_of(self, node_id: int) -> str:
        return self.id_to_key[node_id]

    @classmethod
    def from_keys(cls, keys: Iterable[str]) -> "NodeDictionary":
        return cls(sorted(set(keys)))

    def save(self, path: str | Path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="\n") as out:
            for key in self.id_to_key:
                out.write(key + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "NodeDictionary":
        with Path(path).open("r", encoding="utf-8") as fp:
            return cls([line.rstrip("\n") for line in fp if line != "\n"])


# ------------------------------------------------------------ edge list files

class EdgeWriter:
    """Streaming writer for the binary edge list format.

    The header's edge count is patched on close, so edges may be
    appended without knowing the total up front.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._fp = self.path.open("wb")
        self._fp.write(_EDGE_HEADER.pack(EDGE_MAGIC, 0))
        self.count = 0

    def write_pairs(self, pairs: np.ndarray) -> None:
        pairs = np.ascontiguousarray(pairs, dtype="<u8")
        self._fp.write(pairs.tobytes())
        self.count += len(pairs)

    def write_edge(self, src: int, dst: int) -> None:
        self._fp.write(struct.pack("<QQ", src, dst))
        self.count += 1

    def close(self) -> None:
        self._fp.seek(0)
        self._fp.write(_EDGE_HEADER.pack(EDGE_MAGIC, self.count))
        self._fp.close()

    def __enter__(self) -> "EdgeWriter":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def edge_count(path: str | Path) -> int:
    with Path(path).open("rb") as fp:
        magic, count = _EDGE_HEADER.unpack(fp.read(_EDGE_HEADER.size))
    if magic != EDGE_MAGIC:
        raise FormatError(f"{path}: not a {EDGE_MAGIC!r} edge file")
    return count


def iter_edge_chunks(path: str | Path, chunk_edges: int = 1 << 20) -> Iterator[np.ndarray]:
    """Yield (k, 2) uint64 arrays of edges in file order."""
    total = edge_count(path)
    with Path(path).open("rb") as fp:
        fp.seek(_EDGE_HEADER.size)
        remaining = total
        while remaining > 0:
            take = min(remaining, chunk_edges)
            data = np.fromfile(fp, dtype="<u8", count=take * 2)
            if len(data) < take * 2:
                raise FormatError(f"{path}: edge list shorter than header count")
            yield data.reshape(-1, 2)
            remaining -= take


def read_edges(path: str | Path) -> np.ndarray:
    """Load the whole edge list; fixture-scale convenience."""
    chunks = list(iter_edge_chunks(path))
    if not chunks:
        return np.empty((0, 2), dtype=np.uint64)
    return np.concatenate(chunks)


# --------------------------------------------------------------------- merge

def _dedup_merge(iterators: list[Iterator]) -> Iterator:
    for value, _ in groupby(heapq.merge(*iterators)):
        yield value


def merge_batches(
    batch_paths: list[str | Path],
    dictionary_path: str | Path,
    edges_path: str | Path,
) -> tuple[NodeDictionary, int]:
    """K-way merge of sorted batch files into the global graph artifacts.

    Domains and edges are globally deduplicated; ids come from
    lexicographic key order, so the merged edge stream (sorted by key
    pair) is already sorted by (src, dst) id.
    """
    if not batch_paths:
        raise ValueError("merge_batches needs at least one batch file")

    keys: list[str] = list(_dedup_merge([iter_batch_domains(p) for p in batch_paths]))
    dictionary = NodeDictionary(keys)
    dictionary.save(dictionary_path)

    key_to_id = dictionary.key_to_id
    with EdgeWriter(edges_path) as writer:
        for src_key, dst_key in _dedup_merge([iter_batch_edges(p) for p in batch_paths]):
            writer.write_edge(key_to_id[src_key], key_to_id[dst_key])
        n_edges = writer.count
    return dictionary, n_edges
