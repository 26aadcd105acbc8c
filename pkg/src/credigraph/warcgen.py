"""Synthetic WARC/WAT/WET corpora with recorded ground truth.

Full crawl months are terabytes; desk-scale verification runs on
generated archives whose node sets, edge sets, and per-domain document
counts are known by construction.  The writer is also the round-trip
oracle for the archive reader.
"""

from __future__ import annotations

import gzip
import json
import random
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from pathlib import Path

from .hostnames import normalize_host

_TLDS = ("com", "org", "net", "info", "io")
_WORDS = (
    "news", "daily", "report", "wire", "post", "times", "journal", "press",
    "chronicle", "gazette", "herald", "观察", "tribune", "dispatch", "digest",
)


@dataclass
class RecordSpec:
    record_type: str
    headers: dict[str, str]
    payload: bytes


def encode_record(spec: RecordSpec) -> bytes:
    headers = dict(spec.headers)
    headers.setdefault("WARC-Type", spec.record_type)
    headers["Content-Length"] = str(len(spec.payload))
    lines = ["WARC/1.0"]
    lines += [f"{name}: {value}" for name, value in headers.items()]
    block = "\r\n".join(lines).encode("utf-8") + b"\r\n\r\n"
    return block + spec.payload + b"\r\n\r\n"


def write_archive(path: str | Path, records: list[RecordSpec], compress: bool = True) -> None:
    """Write records to a WARC file, one gzip member per record when compressed."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("wb") as out:
        for spec in records:
            data = encode_record(spec)
            out.write(gzip.compress(data) if compress else data)


def warcinfo_record(date: datetime, filename: str) -> RecordSpec:
    payload = f"software: credigraph-fixture\r\nisPartOf: {filename}\r\n".encode()
    return RecordSpec(
        "warcinfo",
        {"WARC-Date": _fmt_date(date), "WARC-Filename": filename,
         "Content-Type": "application/warc-fields"},
        payload,
    )


def wat_record(
    page_url: str,
    date: datetime,
    anchor_urls: list[str],
    image_urls: list[str] = (),
    head_link_urls: list[str] = (),
) -> RecordSpec:
    """A WAT metadata record whose envelope lists the page's links."""
    links = [{"path": "A@/href", "url": u, "text": "link"} for u in anchor_urls]
    links += [{"path": "IMG@/src", "url": u} for u in image_urls]
    envelope = {
        "Envelope": {
            "WARC-Header-Metadata": {"WARC-Target-URI": page_url},
            "Payload-Metadata": {
                "HTTP-Response-Metadata": {
                    "HTML-Metadata": {
                        "Head": {"Link": [{"path": "LINK@/href", "url": u} for u in head_link_urls]},
                        "Links": links,
                    }
                }
            },
        }
    }
    return RecordSpec(
        "metadata",
        {"WARC-Target-URI": page_url, "WARC-Date": _fmt_date(date),
         "Content-Type": "application/json"},
        json.dumps(envelope).encode("utf-8"),
    )


def wet_record(
    url: str, date: datetime, text: str, languages: list[str] = ()
) -> RecordSpec:
    headers = {
        "WARC-Target-URI": url,
        "WARC-Date": _fmt_date(date),
        "Content-Type": "text/plain",
    }
    if languages:
        headers["WARC-Identified-Content-Language"] = ",".join(languages)
    return RecordSpec("conversion", headers, text.encode("utf-8"))


def _fmt_date(date: datetime) -> str:
    return date.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def corrupt_member(path: str | Path, member_index: int) -> None:
    """Flip bytes inside the Nth gzip member of a member-per-record file."""
    path = Path(path)
    data = bytearray(path.read_bytes())
    starts = []
    idx = 0
    while True:
        idx = data.find(b"\x1f\x8b\x08", idx)
        if idx < 0:
            break
        starts.append(idx)
        idx += 3
    if member_index >= len(starts):
        raise IndexError(f"archive has {len(starts)} members")
    start = starts[member_index]
    end = starts[member_index + 1] if member_index + 1 < len(starts) else len(data)
    middle = start + (end - start) // 2
    for i in range(middle, min(middle + 8, end)):
        data[i] ^= 0xFF
    path.write_bytes(bytes(data))


@dataclass
class CorpusTruth:
    """Everything the generator knows about a synthetic crawl month."""

    seed: int
    snapshot_id: str
    crawl_start: str
    domains: list[str]                      # node keys, sorted
    edges: list[tuple[str, str]]            # deduped key pairs, sorted
    page_links: int                         # raw page-level link count
    wat_files: list[str]
    wet_files: list[str]
    doc_counts: dict[str, int]              # node key -> WET docs written
    wet_record_count: int
    labels_file: str | None = None
    labeled_domains: list[str] = field(default_factory=list)
    textless_domains: list[str] = field(default_factory=list)  # in-graph, no WET docs

    @property
    def n_nodes(self) -> int:
        return len(self.domains)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def save(self, path: str | Path) -> None:
        data = {
            "seed": self.seed,
            "snapshot_id": self.snapshot_id,
            "crawl_start": self.crawl_start,
            "domains": self.domains,
            "edges": [list(e) for e in self.edges],
            "page_links": self.page_links,
            "wat_files": self.wat_files,
            "wet_files": self.wet_files,
            "doc_counts": self.doc_counts,
            "wet_record_count": self.wet_record_count,
            "labels_file": self.labels_file,
            "labeled_domains": self.labeled_domains,
            "textless_domains": self.textless_domains,
        }
        Path(path).write_text(json.dumps(data, indent=1))

    @classmethod
    def load(cls, path: str | Path) -> "CorpusTruth":
        data = json.loads(Path(path).read_text())
        data["edges"] = [tuple(e) for e in data["edges"]]
        return cls(**data)


def _make_hosts(rng: random.Random, n_domains: int) -> list[str]:
    hosts = []
    seen = set()
    while len(hosts) < n_domains:
        word = rng.choice(_WORDS)
        name = f"{word}{rng.randrange(10_000)}"
        tld = rng.choice(_TLDS)
        host = f"{name}.{tld}"
        # a slice of subdomains so parent/child distinctness is exercised
        if hosts and rng.random() < 0.2:
            parent = rng.choice(hosts)
            host = f"{rng.choice(_WORDS)}.{parent}"
        if host not in seen:
            seen.add(host)
            hosts.append(host)
    return hosts


def generate_corpus(
    out_dir: str | Path,
    n_domains: int = 200,
    n_links: int = 10_000,
    seed: int = 7,
    wat_files: int = 3,
    wet_files: int = 2,
    max_docs_per_domain: int = 8,
    labeled_fraction: float = 0.5,
    textless_fraction: float = 0.1,
    snapshot_id: str = "FIXTURE-2024-51",
    crawl_start: str = "2024-12-05",
    with_image_links: bool = True,
    link_variant: int = 0,
) -> CorpusTruth:
    """Write a synthetic crawl month under ``out_dir`` and return its truth.

    Layout: ``wat/*.warc.gz``, ``wet/*.warc.gz``, ``labels.csv``,
    ``ground_truth.json``.  Corpora sharing a seed but differing in
    ``link_variant`` share a domain universe while their link sets (and
    so out-degrees) evolve, which is what multi-month fixtures need.
    A ``textless_fraction`` of hosts gets no WET documents, exercising
    the homepage-fetch fallback; labels go to text-bearing domains only.
    """
    out_dir = Path(out_dir)
    host_rng = random.Random(seed)
    rng = random.Random(seed * 1_000_003 + link_variant)
    base_date = datetime.fromisoformat(crawl_start).replace(tzinfo=timezone.utc)

    hosts = _make_hosts(host_rng, n_domains)
    pages = {host: [f"https://{host}/p{j}" for j in range(host_rng.randint(1, 6))]
             for host in hosts}

    raw_links: list[tuple[str, str]] = []
    for _ in range(n_links):
        src_host = rng.choice(hosts)
        dst_host = rng.choice(hosts)
        src = rng.choice(pages[src_host])
        dst = rng.choice(pages[dst_host])
        raw_links.append((src, dst))

    # ground truth by direct aggregation of the same link list
    key_of = {}
    for host in hosts:
        key_of[host] = normalize_host(f"https://{host}/")
    domain_set = set()
    edge_set = set()
    per_page: dict[str, list[str]] = {}
    for src, dst in raw_links:
        per_page.setdefault(src, []).append(dst)
        src_key = normalize_host(src)
        dst_key = normalize_host(dst)
        domain_set.update((src_key, dst_key))
        if src_key != dst_key:
            edge_set.add((src_key, dst_key))

    date = base_date
    wat_paths = []
    page_items = sorted(per_page.items())
    rng.shuffle(page_items)
    shards = [page_items[i::wat_files] for i in range(wat_files)]
    for i, shard in enumerate(shards):
        records = [warcinfo_record(date, f"wat-{i:03d}")]
        for page, targets in shard:
            images = [f"https://cdn{rng.randrange(100)}.example/{rng.randrange(999)}.png"] \
                if with_image_links and rng.random() < 0.3 else []
            records.append(wat_record(page, date, targets, image_urls=images))
            date += timedelta(seconds=rng.randint(1, 300))
        path = out_dir / "wat" / f"part-{i:03d}.warc.gz"
        write_archive(path, records)
        wat_paths.append(str(path))

    doc_counts: dict[str, int] = {}
    wet_records: list[RecordSpec] = []
    textless_hosts = set(rng.sample(hosts, int(len(hosts) * textless_fraction)))
    for host in hosts:
        if host in textless_hosts:
            continue
        key = key_of[host]
        n_docs = rng.randint(1, max_docs_per_domain)
        doc_counts[key] = n_docs
        for j in range(n_docs):
            length = rng.randint(20, 2000)
            text = f"doc {j} of {host} " + "".join(
                rng.choice("abcdefghij klmnop qrstuv wxyz") for _ in range(length)
            )
            langs = [rng.choice(["eng", "fra", "deu", "zho"])] if rng.random() < 0.8 else []
            wet_records.append(
                wet_record(f"https://{host}/p{j}", date, text, languages=langs)
            )
            date += timedelta(seconds=rng.randint(1, 120))
    rng.shuffle(wet_records)
    wet_paths = []
    for i in range(wet_files):
        shard = wet_records[i::wet_files]
        records = [warcinfo_record(base_date, f"wet-{i:03d}")] + shard
        path = out_dir / "wet" / f"part-{i:03d}.warc.gz"
        write_archive(path, records)
        wet_paths.append(str(path))

    textless_keys = sorted(domain_set & {key_of[h] for h in textless_hosts})
    labelable = sorted(domain_set - set(textless_keys))
    labeled = sorted(rng.sample(labelable, int(len(labelable) * labeled_fraction)))
    labels_path = out_dir / "labels.csv"
    with labels_path.open("w") as out:
        out.write("domain,pc1,mbfc\n")
        for key in labeled:
            host = ".".join(reversed(key.split(".")))
            out.write(f"{host},{rng.random():.4f},{rng.random():.4f}\n")

    truth = CorpusTruth(
        seed=seed,
        snapshot_id=snapshot_id,
        crawl_start=crawl_start,
        domains=sorted(domain_set),
        edges=sorted(edge_set),
        page_links=len(raw_links),
        wat_files=wat_paths,
        wet_files=wet_paths,
        doc_counts=doc_counts,
        wet_record_count=len(wet_records),
        labels_file=str(labels_path),
        labeled_domains=labeled,
        textless_domains=textless_keys,
    )
    truth.save(out_dir / "ground_truth.json")
    return truth
