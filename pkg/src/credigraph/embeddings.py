"""Per-domain embedding vectors: ingestion, storage, MRL truncation.

Real embeddings arrive through a provider interface (batched, with
per-item error slots); network-free runs use the deterministic
pseudo-provider, which hashes each text into a PCG64 seed and draws a
unit-normalized gaussian vector.  Matryoshka-style truncation keeps a
prefix of each row and renormalizes it.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Protocol

import numpy as np

from . import FormatError, InputError
from .textstore import DomainTextBundle

EMBEDDING_MAGIC = b"CGEMB1\0\0"
DEFAULT_DIM = 1024


@dataclass
class EmbeddingMatrix:
    dim: int
    rows: dict[str, np.ndarray] = field(default_factory=dict)
    provider_tag: str = ""

    def save(self, path: str | Path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("wb") as out:
            out.write(EMBEDDING_MAGIC)
            out.write(struct.pack("<IQ", self.dim, len(self.rows)))
            for key, vector in self.rows.items():
                kb = key.encode("utf-8")
                out.write(struct.pack("<H", len(kb)))
                out.write(kb)
                out.write(np.ascontiguousarray(vector, dtype="<f4").tobytes())

    @classmethod
    def load(cls, path: str | Path, provider_tag: str = "") -> "EmbeddingMatrix":
        with Path(path).open("rb") as fp:
            if fp.read(len(EMBEDDING_MAGIC)) != EMBEDDING_MAGIC:
                raise FormatError(f"{path}: not a {EMBEDDING_MAGIC!r} embedding file")
            dim, count = struct.unpack("<IQ", fp.read(12))
            rows: dict[str, np.ndarray] = {}
            for _ in range(count):
                (klen,) = struct.unpack("<H", fp.read(2))
                key = fp.read(klen).decode("utf-8")
                rows[key] = np.frombuffer(fp.read(4 * dim), dtype="<f4").copy()
        return cls(dim=dim, rows=rows, provider_tag=provider_tag)


class EmbeddingWriter:
    """Single-writer incremental persistence; row count patched on close."""

    def __init__(self, path: str | Path, dim: int):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self.dim = dim
        self._fp = self.path.open("wb")
        self._fp.write(EMBEDDING_MAGIC)
        self._fp.write(struct.pack("<IQ", dim, 0))
        self.count = 0

    def add(self, key: str, vector: np.ndarray) -> None:
        kb = key.encode("utf-8")
        self._fp.write(struct.pack("<H", len(kb)))
        self._fp.write(kb)
        self._fp.write(np.ascontiguousarray(vector, dtype="<f4").tobytes())
        self.count += 1

    def close(self) -> None:
        self._fp.seek(len(EMBEDDING_MAGIC))
        self._fp.write(struct.pack("<IQ", self.dim, self.count))
        self._fp.close()

    def __enter__(self) -> "EmbeddingWriter":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


class EmbeddingProvider(Protocol):
    """Batched text-to-vector source.

    ``embed`` maps a batch of texts to one slot per text: either a
    ``dim``-length vector or ``None`` for a per-item failure.
    """

    dim: int
    tag: str

    def embed(self, texts: list[str]) -> list[np.ndarray | None]: ...


def pseudo_embed(text: str, dim: int, seed: int) -> np.ndarray:
    """Deterministic stand-in embedding.

    sha256(seed || text) seeds PCG64; the vector is i.i.d. standard
    normal, L2-normalized.  Equal texts (with equal seeds) give equal
    vectors.
    """
    if dim < 1:
        raise InputError(f"dim must be >= 1, got {dim}")
    digest = hashlib.sha256(seed.to_bytes(8, "little", signed=True) + text.encode("utf-8"))
    rng = np.random.Generator(np.random.PCG64(int.from_bytes(digest.digest()[:8], "little")))
    vector = rng.standard_normal(dim)
    norm = np.linalg.norm(vector)
    if norm > 0:
        vector /= norm
    return vector.astype(np.float32)


class PseudoProvider:
    """Network-free provider backed by :func:`pseudo_embed`."""

    def __init__(self, dim: int = DEFAULT_DIM, seed: int = 0):
        self.dim = dim
        self.seed = seed
        self.tag = f"pseudo-{dim}d-s{seed}"

    def embed(self, texts: list[str]) -> list[np.ndarray | None]:
        return [pseudo_embed(text, self.dim, self.seed) for text in texts]


@dataclass
class IngestReport:
    rows: int
    misses: list[str] = field(default_factory=list)


def ingest_embeddings(
    bundles: Iterable[DomainTextBundle],
    provider: EmbeddingProvider,
    batch_size: int = 64,
    retries: int = 2,
    out_path: str | Path | None = None,
) -> tuple[EmbeddingMatrix, IngestReport]:
    """One vector per bundle, batched against the provider.

    A batch that raises is retried up to ``retries`` times; texts still
    failing afterwards (batch- or item-level) become recorded misses,
    never pipeline failures.  A vector of the wrong length is a hard
    error: provider and configuration disagree.  With ``out_path`` the
    matrix is persisted incrementally, batch by batch.
    """
    matrix = EmbeddingMatrix(dim=provider.dim, provider_tag=provider.tag)
    report = IngestReport(rows=0)
    writer = EmbeddingWriter(out_path, provider.dim) if out_path else None

    def run_batch(keys: list[str], texts: list[str]) -> None:
        slots: list[np.ndarray | None] | None = None
        for _ in range(retries + 1):
            try:
                slots = provider.embed(texts)
                break
            except Exception:
                slots = None
        if slots is None:
            report.misses.extend(keys)
            return
        for key, vector in zip(keys, slots):
            if vector is None:
                report.misses.append(key)
                continue
            vector = np.asarray(vector, dtype=np.float32)
            if vector.shape != (provider.dim,):
                raise InputError(
                    f"provider returned dim {vector.shape} for {key}, "
                    f"configured dim is {provider.dim}"
                )
            if not np.all(np.isfinite(vector)):
                report.misses.append(key)
                continue
            matrix.rows[key] = vector
            if writer is not None:
                writer.add(key, vector)
            report.rows += 1

    try:
        keys: list[str] = []
        texts: list[str] = []
        for bundle in bundles:
            keys.append(bundle.node)
            texts.append(bundle.merged_text)
            if len(keys) == batch_size:
                run_batch(keys, texts)
                keys, texts = [], []
        if keys:
            run_batch(keys, texts)
    finally:
        if writer is not None:
            writer.close()
    return matrix, report


def mrl_truncate(matrix: EmbeddingMatrix, k: int) -> EmbeddingMatrix:
    """Keep the first ``k`` coordinates of each row, renormalized to unit
    norm (zero rows stay zero)."""
    if k <= 0 or k > matrix.dim:
        raise InputError(f"target dim {k} outside [1, {matrix.dim}]")
    rows: dict[str, np.ndarray] = {}
    for key, vector in matrix.rows.items():
        prefix = vector[:k].astype(np.float32)
        norm = np.linalg.norm(prefix)
        rows[key] = prefix / norm if norm > 0 else prefix
    return EmbeddingMatrix(
        dim=k, rows=rows, provider_tag=f"{matrix.provider_tag}/mrl{k}"
    )
