"""Per-domain text bundles from WET documents.

Documents are grouped by node key with an external sort (bounded
resident memory), then each domain keeps a representative sample: its
three longest and three shortest documents, merged longest-first then
shortest-ascending, each prefixed with its fetch timestamp.  Domains
with no archived text can be filled through an injected homepage-fetch
interface; the core pipeline itself never touches the network.
"""

from __future__ import annotations

import heapq
import json
import os
import struct
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from operator import itemgetter
from itertools import groupby, islice
from pathlib import Path
from typing import Iterable, Iterator, Protocol

from . import FormatError
from .hostnames import key_to_host, normalize_host
from .warc import WetDocument

BUNDLE_MAGIC = b"CGTXT1\0\0"
DEFAULT_MERGED_LIMIT = 32_768


@dataclass
class DomainTextBundle:
    node: str
    documents_kept: list[dict]          # {url, fetch_time, text}
    merged_text: str
    total_documents_seen: int
    truncation_limit: int = DEFAULT_MERGED_LIMIT


# ------------------------------------------------------------------ grouping

@dataclass
class GroupIndex:
    path: str
    n_domains: int
    n_documents: int
    skipped: int


def _doc_row(doc: WetDocument) -> tuple[str, dict] | None:
    key = normalize_host(doc.url)
    if key is None:
        return None
    return key, {
        "key": key,
        "url": doc.url,
        "fetch_time": doc.fetch_time.isoformat() if doc.fetch_time else None,
        "text": doc.text,
    }


def group_documents(
    docs: Iterable[WetDocument],
    out_path: str | Path,
    run_size: int = 50_000,
) -> GroupIndex:
    """External sort-by-domain of a document stream into a grouped file.

    Documents are spilled to sorted runs of ``run_size`` and k-way
    merged, so resident memory is bounded by the run size, not the
    stream.  URLs that fail host normalization are skipped and counted.
    """
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    skipped = 0
    total = 0
    runs: list = []

    rows = iter(docs)
    while True:
        batch = []
        for doc in islice(rows, run_size):
            row = _doc_row(doc)
            if row is None:
                skipped += 1
                continue
            batch.append(row)
        if not batch:
            break
        batch.sort(key=lambda r: (r[0], r[1]["url"]))
        run = tempfile.TemporaryFile(
            mode="w+", encoding="utf-8", dir=os.environ.get("CREDIGRAPH_SCRATCH")
        )
        for key, payload in batch:
            run.write(json.dumps(payload, ensure_ascii=False) + "\n")
        run.seek(0)
        runs.append(run)
        total += len(batch)

    def load(run) -> Iterator[tuple[str, str]]:
        for line in run:
            record = json.loads(line)
            yield (record["key"], record["url"]), line

    n_domains = 0
    last_key = None
    with out_path.open("w", encoding="utf-8", newline="\n") as out:
        for (key, _url), line in heapq.merge(*(load(r) for r in runs), key=itemgetter(0)):
            if key != last_key:
                n_domains += 1
                last_key = key
            out.write(line if line.endswith("\n") else line + "\n")
    for run in runs:
        run.close()
    return GroupIndex(str(out_path), n_domains, total, skipped)


def iter_groups(path: str | Path) -> Iterator[tuple[str, list[dict]]]:
    """Yield (node key, documents) from a grouped file, in key order."""
    with Path(path).open("r", encoding="utf-8") as fp:
        records = (json.loads(line) for line in fp)
        for key, group in groupby(records, key=itemgetter("key")):
            yield key, list(group)


# ------------------------------------------------------------------ sampling

def sample_representative(
    node: str,
    documents: list[dict],
    limit: int = DEFAULT_MERGED_LIMIT,
) -> DomainTextBundle:
    """Keep the three longest and three shortest documents of a group.

    Length is unicode scalar count, ties broken by URL so the kept set
    is independent of input order.  Groups of six or fewer keep every
    document once.  Merge order: longest-first, then shortest-ascending,
    each document prefixed by its fetch time; the merged text is
    truncated to ``limit`` characters.
    """
    if not documents:
        raise ValueError(f"empty document group for {node}")
    ordered = sorted(documents, key=lambda d: (-len(d["text"]), d["url"]))
    k = len(ordered)
    head = ordered[: min(3, k)]
    tail = ordered[max(3, k - 3):][::-1]
    kept = head + tail
    merged = "\n".join(f"[{d['fetch_time']}] {d['text']}" for d in kept)[:limit]
    return DomainTextBundle(
        node=node,
        documents_kept=[
            {"url": d["url"], "fetch_time": d["fetch_time"], "text": d["text"]} for d in kept
        ],
        merged_text=merged,
        total_documents_seen=k,
        truncation_limit=limit,
    )


# -------------------------------------------------------------- bundle store

def write_bundles(path: str | Path, bundles: Iterable[DomainTextBundle]) -> int:
    """Length-prefixed UTF-8 bundle records under a version header."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with path.open("wb") as out:
        out.write(BUNDLE_MAGIC)
        for bundle in bundles:
            payload = json.dumps(
                {
                    "node": bundle.node,
                    "total_documents_seen": bundle.total_documents_seen,
                    "truncation_limit": bundle.truncation_limit,
                    "documents_kept": bundle.documents_kept,
                    "merged_text": bundle.merged_text,
                },
                ensure_ascii=False,
            ).encode("utf-8")
            out.write(struct.pack("<I", len(payload)))
            out.write(payload)
            count += 1
    return count


def iter_bundles(path: str | Path) -> Iterator[DomainTextBundle]:
    with Path(path).open("rb") as fp:
        if fp.read(len(BUNDLE_MAGIC)) != BUNDLE_MAGIC:
            raise FormatError(f"{path}: not a {BUNDLE_MAGIC!r} bundle store")
        while True:
            raw_len = fp.read(4)
            if not raw_len:
                return
            (length,) = struct.unpack("<I", raw_len)
            record = json.loads(fp.read(length).decode("utf-8"))
            yield DomainTextBundle(
                node=record["node"],
                documents_kept=record["documents_kept"],
                merged_text=record["merged_text"],
                total_documents_seen=record["total_documents_seen"],
                truncation_limit=record["truncation_limit"],
            )


def export_jsonl(path: str | Path, out_path: str | Path) -> int:
    count = 0
    with Path(out_path).open("w", encoding="utf-8", newline="\n") as out:
        for bundle in iter_bundles(path):
            out.write(json.dumps(
                {"node": bundle.node, "merged_text": bundle.merged_text,
                 "total_documents_seen": bundle.total_documents_seen},
                ensure_ascii=False,
            ) + "\n")
            count += 1
    return count


# ------------------------------------------------------------ homepage fetch

class HomepageFetcher(Protocol):
    """Bounded-concurrency homepage text source.

    ``fetch`` returns the homepage text or ``None`` when the domain has
    none; exceptions count as per-domain soft failures.  Implementations
    declare ``max_in_flight`` and ``timeout`` and must be callable from
    multiple workers.
    """

    max_in_flight: int
    timeout: float

    def fetch(self, node: str) -> str | None: ...


class StubFetcher:
    """Desk-mode fetcher answering from a local map; never hits the network."""

    def __init__(self, pages: dict[str, str], max_in_flight: int = 8, timeout: float = 5.0):
        self.pages = dict(pages)
        self.max_in_flight = max_in_flight
        self.timeout = timeout

    def fetch(self, node: str) -> str | None:
        return self.pages.get(node)


@dataclass
class FetchOutcome:
    bundles: list[DomainTextBundle]
    misses: list[str] = field(default_factory=list)
    failures: list[str] = field(default_factory=list)


def fetch_missing(
    domains: list[str],
    fetcher: HomepageFetcher,
    fetch_time: str | None = None,
    limit: int = DEFAULT_MERGED_LIMIT,
) -> FetchOutcome:
    """Fill text-less domains from the fetch interface.

    Successes become single-document bundles; absent pages are recorded
    as misses and fetcher exceptions as failures.  Neither aborts the
    batch.
    """
    outcome = FetchOutcome(bundles=[])
    if not domains:
        return outcome

    def one(node: str) -> tuple[str, str | None, str | None]:
        try:
            return node, fetcher.fetch(node), None
        except Exception as exc:  # soft failure by contract
            return node, None, str(exc)

    workers = max(1, getattr(fetcher, "max_in_flight", 8))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(one, domains))

    for node, text, error in results:
        if error is not None:
            outcome.failures.append(node)
        elif text is None:
            outcome.misses.append(node)
        else:
            url = f"https://{key_to_host(node)}/"
            doc = {"url": url, "fetch_time": fetch_time, "text": text}
            outcome.bundles.append(
                DomainTextBundle(
                    node=node,
                    documents_kept=[doc],
                    merged_text=f"[{fetch_time}] {text}"[:limit],
                    total_documents_seen=1,
                    truncation_limit=limit,
                )
            )
    return outcome
